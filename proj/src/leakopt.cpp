#include "seclossy/leakopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "seclossy/enhance.hpp"
#include "seclossy/errors.hpp"

namespace seclossy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Multiplier system in units where every residual is dimensionless:
// N = c M, S^ = S / c, with c = 1 / ||K_{X|V}^{-1}||.
struct ScaledSystem {
  Matrix g1;  // c (K_V^{-1} - (K_V + S_Y)^{-1})
  Matrix g2;  // c ((K_U + S_Z)^{-1} - (K_U + S_Y)^{-1})
  std::array<Matrix, 3> s;  // slacks K_U - K_V, F - K_V, K_X - K_U over c
  double c = 1.0;
};

struct Residuals {
  std::array<Matrix, 5> r;
  double max_norm() const {
    double out = 0.0;
    for (const auto& x : r) {
      out = std::max(out, x.norm());
    }
    return out;
  }
};

using Triple = std::array<Matrix, 3>;  // N_U, N_D, N_X

ScaledSystem scaled_system(const AlignedModel& m, const DistortionConstraint& d, const AuxiliaryPair& pair) {
  const SymMatrix& v = pair.k_xv;
  const SymMatrix& u = pair.k_xu;
  const Matrix v_inv = spd_inverse(v).mat();
  ScaledSystem sys;
  sys.c = 1.0 / v_inv.norm();
  sys.g1 = sys.c * (v_inv - spd_inverse(v + m.sigma_y()).mat());
  sys.g2 = sys.c * (spd_inverse(u + m.sigma_z()).mat() - spd_inverse(u + m.sigma_y()).mat());
  sys.s = {(u - v).mat() / sys.c, (f_of_d(m, d) - v).mat() / sys.c, (m.k_x() - u).mat() / sys.c};
  return sys;
}

Residuals residuals(const ScaledSystem& sys, const Triple& n) {
  return Residuals{{n[0] + n[1] - sys.g1, n[0] - n[2] - sys.g2, n[0] * sys.s[0], n[1] * sys.s[1], n[2] * sys.s[2]}};
}

Matrix sym(const Matrix& a) { return 0.5 * (a + a.transpose()); }

Triple project(const Triple& n) {
  return {project_psd(SymMatrix(n[0])).mat(), project_psd(SymMatrix(n[1])).mat(), project_psd(SymMatrix(n[2])).mat()};
}

// Minimum-norm solution of the unconstrained linear system, then clipped to the cone.
Triple linear_guess(const ScaledSystem& sys) {
  const Eigen::Index n = sys.g1.rows();
  std::vector<std::pair<Eigen::Index, Eigen::Index>> coords;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      coords.emplace_back(i, j);
    }
  }
  const auto np = static_cast<Eigen::Index>(coords.size());
  const Eigen::Index nn = n * n;
  Matrix a = Matrix::Zero(5 * nn, 3 * np);
  Vector b = Vector::Zero(5 * nn);
  b.segment(0, nn) = Eigen::Map<const Vector>(sys.g1.data(), nn);
  b.segment(nn, nn) = Eigen::Map<const Vector>(sys.g2.data(), nn);
  const Triple zero{Matrix::Zero(n, n), Matrix::Zero(n, n), Matrix::Zero(n, n)};
  const Residuals base = residuals(sys, zero);
  for (int var = 0; var < 3; ++var) {
    for (Eigen::Index k = 0; k < np; ++k) {
      Triple probe = zero;
      const auto [i, j] = coords[static_cast<std::size_t>(k)];
      probe[var](i, j) = 1.0;
      probe[var](j, i) = 1.0;
      const Residuals r = residuals(sys, probe);
      for (int blk = 0; blk < 5; ++blk) {
        const Matrix delta = r.r[blk] - base.r[blk];
        a.block(blk * nn, var * np + k, nn, 1) = Eigen::Map<const Vector>(delta.data(), nn);
      }
    }
  }
  const Vector z = a.completeOrthogonalDecomposition().solve(b);
  Triple out = zero;
  for (int var = 0; var < 3; ++var) {
    for (Eigen::Index k = 0; k < np; ++k) {
      const auto [i, j] = coords[static_cast<std::size_t>(k)];
      out[var](i, j) = z(var * np + k);
      out[var](j, i) = z(var * np + k);
    }
  }
  return project(out);
}

// Accelerated projected gradient on 1/2 sum ||r||^2 with adaptive restart.
Triple refine(const ScaledSystem& sys, Triple start, int max_iters) {
  double s_max = 0.0;
  for (const auto& s : sys.s) {
    s_max = std::max(s_max, s.operatorNorm());
  }
  const double step = 1.0 / (3.0 + s_max * s_max);
  Triple best = start;
  double best_res = residuals(sys, start).max_norm();
  Triple x = start;
  Triple y = start;
  double theta = 1.0;
  double prev_obj = kInf;
  for (int it = 0; it < max_iters && best_res > 1e-14; ++it) {
    const Residuals ry = residuals(sys, y);
    const Triple grad{ry.r[0] + ry.r[1] + sym(ry.r[2] * sys.s[0]), ry.r[0] + sym(ry.r[3] * sys.s[1]),
                      -ry.r[1] + sym(ry.r[4] * sys.s[2])};
    Triple next = project({y[0] - step * grad[0], y[1] - step * grad[1], y[2] - step * grad[2]});
    const Residuals rn = residuals(sys, next);
    double obj = 0.0;
    for (const auto& r : rn.r) {
      obj += r.squaredNorm();
    }
    const double res = rn.max_norm();
    if (res < best_res) {
      best_res = res;
      best = next;
    }
    const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    const double mom = obj > prev_obj ? 0.0 : (theta - 1.0) / theta_next;
    theta = obj > prev_obj ? 1.0 : theta_next;
    for (int k = 0; k < 3; ++k) {
      y[k] = next[k] + mom * (next[k] - x[k]);
    }
    x = std::move(next);
    prev_obj = obj;
  }
  return best;
}

double scalar_objective(double sigx2, double sigy2, double sigz2, double s_v, double s_u) {
  return 0.5 * std::log(sigx2 / s_v) - 0.5 * std::log((s_u + sigy2) / (s_v + sigy2)) +
         0.5 * std::log((s_u + sigz2) / sigz2);
}

std::vector<double> log_grid(double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  const double lo = 1e-4 * hi;
  for (int k = 0; k < n; ++k) {
    const double frac = n == 1 ? 0.0 : static_cast<double>(n - 1 - k) / (n - 1);
    out[static_cast<std::size_t>(k)] = hi * std::pow(lo / hi, frac);
  }
  return out;
}

}  // namespace

double KktCertificate::max_residual() const {
  double out = 0.0;
  for (const auto& [name, value] : residuals) {
    out = std::max(out, value);
  }
  return out;
}

ChainProblem leakage_problem(const AlignedModel& m, const DistortionConstraint& d) {
  const Eigen::Index n = m.dim();
  const Matrix eye = Matrix::Identity(n, n);
  const Matrix zero = Matrix::Zero(n, n);
  ChainProblem p{{}, 0.5 * (logdet(m.k_x()) - logdet(m.sigma_z())), m.k_x(), f_of_d(m, d)};
  p.terms.push_back({-0.5, zero, {1.0, 0.0}, {eye, eye}});
  p.terms.push_back({-0.5, m.sigma_y().mat(), {0.0, 1.0}, {eye, eye}});
  p.terms.push_back({0.5, m.sigma_y().mat(), {1.0, 0.0}, {eye, eye}});
  p.terms.push_back({0.5, m.sigma_z().mat(), {0.0, 1.0}, {eye, eye}});
  return p;
}

LeakageSolution minimize_leakage(const AlignedModel& m, const DistortionConstraint& d, const SolverOptions& opts) {
  if (opts.restarts < 1 || !(opts.tol_feas > 0.0) || !(opts.tol_grad > 0.0)) {
    throw ConfigError("solver options: restarts >= 1 and positive tolerances required");
  }
  if (!psd_check(d.d()).is_pd) {
    throw InfeasibleDistortion("minimum leakage requires a positive definite D");
  }
  const ChainProblem p = leakage_problem(m, d);
  BarrierOptions bopts;
  bopts.t_init = opts.barrier_init;
  bopts.t_final = opts.barrier_final;
  bopts.max_newton = opts.max_iters;
  bopts.tol_decrement = opts.tol_grad;
  bopts.step_init = opts.step_init;

  std::optional<BarrierResult> best;
  int iterations = 0;
  for (const auto& [v0, u0] : chain_starts(p, opts.restarts, opts.seed)) {
    BarrierResult r = solve_chain(p, v0, u0, bopts);
    iterations += r.iterations;
    const bool better = !best || (r.converged && !best->converged) ||
                        (r.converged == best->converged && r.value < best->value);
    if (better) {
      best = std::move(r);
    }
  }

  LeakageSolution sol;
  sol.pair = AuxiliaryPair{best->x0, best->x1};
  sol.value = leakage_objective(m, sol.pair);
  sol.converged = best->converged;
  sol.iterations = iterations;
  KktCertificate warm{best->m_chain, best->m_cap, best->m_upper, {}};
  sol.certificate = recover_multipliers(m, d, sol.pair, warm);
  return sol;
}

std::map<std::string, double> kkt_residuals(const AlignedModel& m, const DistortionConstraint& d,
                                            const AuxiliaryPair& pair, const SymMatrix& m_u,
                                            const SymMatrix& m_d, const SymMatrix& m_x) {
  const ScaledSystem sys = scaled_system(m, d, pair);
  const Residuals r = residuals(sys, {sys.c * m_u.mat(), sys.c * m_d.mat(), sys.c * m_x.mat()});
  return {{"stationarity_v", r.r[0].norm()},
          {"stationarity_u", r.r[1].norm()},
          {"slack_uv", r.r[2].norm()},
          {"slack_d", r.r[3].norm()},
          {"slack_x", r.r[4].norm()}};
}

KktCertificate recover_multipliers(const AlignedModel& m, const DistortionConstraint& d,
                                   const AuxiliaryPair& pair, const std::optional<KktCertificate>& warm) {
  const ScaledSystem sys = scaled_system(m, d, pair);
  Triple start = linear_guess(sys);
  double start_res = residuals(sys, start).max_norm();
  if (warm) {
    const Triple w = project({sys.c * warm->m_u.mat(), sys.c * warm->m_d.mat(), sys.c * warm->m_x.mat()});
    const double w_res = residuals(sys, w).max_norm();
    if (w_res < start_res) {
      start = w;
      start_res = w_res;
    }
  }
  const Triple n = refine(sys, start, 20000);
  KktCertificate out{SymMatrix(n[0] / sys.c), SymMatrix(n[1] / sys.c), SymMatrix(n[2] / sys.c), {}};
  out.residuals = kkt_residuals(m, d, pair, out.m_u, out.m_d, out.m_x);
  return out;
}

bool certify(const AlignedModel& m, const DistortionConstraint& d, const LeakageSolution& sol, double tol) {
  try {
    if (!pair_feasible(m, d, sol.pair, 1e-9) || !psd_check(sol.pair.k_xv, 0.0).is_pd) {
      return false;
    }
    if (sol.certificate.residuals.size() != 5 || !(sol.certificate.max_residual() < tol)) {
      return false;
    }
    const EnhancedChannel e = enhance(m, d, sol);
    return std::abs(sol.value - closed_form_lbar(m, d, e)) < tol;
  } catch (const Error&) {
    return false;
  }
}

double gradient_selfcheck(const AlignedModel& m, const AuxiliaryPair& pair) {
  const ObjectiveGradient g = objective_gradient(m, pair);
  const Eigen::Index n = m.dim();
  const double h = 1e-5 * std::min(min_eigenvalue(pair.k_xv), min_eigenvalue(m.k_x()));
  double max_err = 0.0;
  double max_grad = 0.0;
  for (int var = 0; var < 2; ++var) {
    const Matrix& an = var == 0 ? g.grad_v.mat() : g.grad_u.mat();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i; j < n; ++j) {
        Matrix dir = Matrix::Zero(n, n);
        dir(i, j) = 1.0;
        dir(j, i) = 1.0;
        AuxiliaryPair plus = pair;
        AuxiliaryPair minus = pair;
        SymMatrix& p_var = var == 0 ? plus.k_xv : plus.k_xu;
        SymMatrix& m_var = var == 0 ? minus.k_xv : minus.k_xu;
        p_var = p_var + SymMatrix(h * dir);
        m_var = m_var - SymMatrix(h * dir);
        const double fd = (leakage_objective(m, plus) - leakage_objective(m, minus)) / (2.0 * h);
        const double exact = i == j ? an(i, i) : an(i, j) + an(j, i);
        max_err = std::max(max_err, std::abs(fd - exact));
        max_grad = std::max(max_grad, std::abs(exact));
      }
    }
  }
  return max_grad > 0.0 ? max_err / max_grad : max_err;
}

ScalarGridResult scalar_grid_oracle(double sigx2, double sigy2, double sigz2, double d, int grid_n) {
  if (!(sigx2 > 0.0 && sigy2 > 0.0 && sigz2 > 0.0) || grid_n < 1) {
    throw InfeasibleDistortion("scalar oracle needs positive variances and grid_n >= 1");
  }
  const double cond = sigx2 * sigy2 / (sigx2 + sigy2);
  if (!(d > 0.0) || d > cond * (1.0 + 1e-12)) {
    throw InfeasibleDistortion("scalar oracle needs 0 < d <= sigx2 sigy2 / (sigx2 + sigy2)");
  }
  const double f = sigy2 * d / (sigy2 - d);
  const auto su_grid = log_grid(sigx2, grid_n);
  const auto sv_grid = log_grid(std::min(f, sigx2), grid_n);
  ScalarGridResult best{0.0, 0.0, kInf};
  for (double su : su_grid) {
    for (double sv : sv_grid) {
      if (sv > su) {
        break;
      }
      const double val = scalar_objective(sigx2, sigy2, sigz2, sv, su);
      if (val < best.value) {
        best = {sv, su, val};
      }
    }
  }
  return best;
}

}  // namespace seclossy
