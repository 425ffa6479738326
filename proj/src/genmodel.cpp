#include "seclossy/genmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>

#include "seclossy/errors.hpp"

namespace seclossy {

namespace {

void reduce_one(const Matrix& h, Eigen::Index n, Matrix& r, Vector& lambda) {
  Eigen::JacobiSVD<Matrix> svd(h, Eigen::ComputeFullV);
  r = svd.matrixV();
  lambda = Vector::Zero(n);
  const Vector& sv = svd.singularValues();
  lambda.head(std::min<Eigen::Index>(sv.size(), n)) = sv.head(std::min<Eigen::Index>(sv.size(), n));
}

SymMatrix rotate(const Matrix& r, const Vector& diag) { return SymMatrix(r * diag.asDiagonal() * r.transpose()); }

bool is_spd(const SymMatrix& a) {
  Eigen::LLT<Matrix> llt(a.mat());
  return llt.info() == Eigen::Success && (llt.matrixLLT().diagonal().array() > 0.0).all();
}

double rel(const SymMatrix& a, const SymMatrix& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

// 1/2 log|I + G^{1/2} X G^{1/2}| with G^{1/2} = R (Lambda + alpha) R^T.
double half_logdet_gain(const Matrix& r, const Vector& lambda, double alpha, const SymMatrix& x) {
  const Matrix root = r * (lambda.array() + alpha).matrix().asDiagonal() * r.transpose();
  return 0.5 * logdet(SymMatrix::identity(x.dim()) + x.congruence(root));
}

double slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const auto n = static_cast<double>(xs.size());
  if (xs.size() < 2) {
    return 0.0;
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double lx = std::log(xs[i]);
    const double ly = std::log(std::max(ys[i], 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ChainProblem base_problem(const GeneralModel& g, const SymMatrix& d) {
  const Eigen::Index n = g.dim();
  const Eigen::Index my = g.h_y().rows();
  const Matrix eye = Matrix::Identity(n, n);
  const Matrix eye_y = Matrix::Identity(my, my);
  ChainProblem p{{}, 0.5 * logdet(g.k_x()), g.k_x(), f_o(g, d)};
  p.terms.push_back({-0.5, Matrix::Zero(n, n), {1.0, 0.0}, {eye, eye}});
  p.terms.push_back({-0.5, eye_y, {0.0, 1.0}, {g.h_y(), g.h_y()}});
  p.terms.push_back({0.5, eye_y, {1.0, 0.0}, {g.h_y(), g.h_y()}});
  return p;
}

}  // namespace

GeneralModel::GeneralModel(SymMatrix k_x, Matrix h_y, Matrix h_z)
    : k_x_(std::move(k_x)), h_y_(std::move(h_y)), h_z_(std::move(h_z)) {
  if (h_y_.cols() != k_x_.dim() || h_z_.cols() != k_x_.dim() || h_y_.rows() < 1 || h_z_.rows() < 1) {
    throw DimensionMismatch("general model: H_Y and H_Z need dim(K_X) columns and at least one row");
  }
  if (!psd_check(k_x_, 0.0).is_pd) {
    throw NotPositiveDefinite("K_X must be positive definite");
  }
}

SymMatrix AlphaFamily::sigma_y_alpha(double alpha) const {
  return rotate(r_y, (lambda_y.array() + alpha).square().inverse().matrix());
}

SymMatrix AlphaFamily::sigma_z_alpha(double alpha) const {
  return rotate(r_z, (lambda_z.array() + alpha).square().inverse().matrix());
}

SymMatrix AlphaFamily::gain_y_alpha(double alpha) const {
  return rotate(r_y, (lambda_y.array() + alpha).square().matrix());
}

SymMatrix AlphaFamily::gain_z_alpha(double alpha) const {
  return rotate(r_z, (lambda_z.array() + alpha).square().matrix());
}

AlphaFamily svd_reduce(const GeneralModel& g) {
  AlphaFamily fam;
  reduce_one(g.h_y(), g.dim(), fam.r_y, fam.lambda_y);
  reduce_one(g.h_z(), g.dim(), fam.r_z, fam.lambda_z);
  return fam;
}

SymMatrix general_cond_cov_xy(const GeneralModel& g) {
  return spd_inverse(spd_inverse(g.k_x()) + SymMatrix(g.h_y().transpose() * g.h_y()));
}

void check_general_distortion(const GeneralModel& g, const SymMatrix& d) {
  if (d.dim() != g.dim()) {
    throw DimensionMismatch("distortion matrix dimension does not match the model");
  }
  if (!psd_check(d).is_pd) {
    throw InfeasibleDistortion("distortion violates 0 < D");
  }
  if (!psd_order(d, general_cond_cov_xy(g))) {
    throw InfeasibleDistortion("distortion violates D <= K_{X|Y}");
  }
}

double alpha_star(AlphaFamily& fam, const SymMatrix& d) {
  const SymMatrix d_inv = spd_inverse(d);
  auto ok = [&](double alpha) { return is_spd(d_inv - fam.gain_y_alpha(alpha)); };
  constexpr double kMinAlpha = 1e-12;
  if (!ok(kMinAlpha)) {
    throw InfeasibleDistortion("no alpha > 1e-12 keeps Sigma_{Y,alpha} - D positive definite");
  }
  double lo = kMinAlpha;
  double hi = 1.0;
  while (ok(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) {
      throw Degenerate("alpha* bracket diverged");
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  fam.alpha_star = 0.5 * lo;
  return fam.alpha_star;
}

SymMatrix f_o(const GeneralModel& g, const SymMatrix& d) {
  const SymMatrix inner = spd_inverse(d) - SymMatrix(g.h_y().transpose() * g.h_y());
  if (!is_spd(inner)) {
    throw NotPositiveDefinite("D^{-1} - H_Y^T H_Y is not positive definite");
  }
  return spd_inverse(inner);
}

SymMatrix f_alpha(const AlphaFamily& fam, const SymMatrix& d, double alpha) {
  return spd_inverse(spd_inverse(d) - fam.gain_y_alpha(alpha));
}

ChainProblem general_problem(const GeneralModel& g, const SymMatrix& d) {
  ChainProblem p = base_problem(g, d);
  const Eigen::Index my = g.h_y().rows();
  p.terms.push_back({0.5, Matrix::Identity(my, my), {0.0, 1.0}, {g.h_y(), g.h_y()}});
  return p;
}

ChainProblem general_problem_hz(const GeneralModel& g, const SymMatrix& d) {
  ChainProblem p = base_problem(g, d);
  const Eigen::Index mz = g.h_z().rows();
  p.terms.push_back({0.5, Matrix::Identity(mz, mz), {0.0, 1.0}, {g.h_z(), g.h_z()}});
  return p;
}

GeneralBounds general_bounds(const GeneralModel& g, const SymMatrix& d, const SolverOptions& opts) {
  check_general_distortion(g, d);
  BarrierOptions bopts;
  bopts.t_init = opts.barrier_init;
  bopts.t_final = opts.barrier_final;
  bopts.max_newton = opts.max_iters;
  bopts.tol_decrement = opts.tol_grad;
  bopts.step_init = opts.step_init;

  auto solve = [&](const ChainProblem& p, int& iterations) {
    std::optional<BarrierResult> best;
    for (const auto& [v0, u0] : chain_starts(p, opts.restarts, opts.seed)) {
      BarrierResult r = solve_chain(p, v0, u0, bopts);
      iterations += r.iterations;
      if (!best || (r.converged && !best->converged) || (r.converged == best->converged && r.value < best->value)) {
        best = std::move(r);
      }
    }
    return *best;
  };

  GeneralBounds out;
  out.r_min = 0.5 * (logdet(general_cond_cov_xy(g)) - logdet(d));
  const BarrierResult stated = solve(general_problem(g, d), out.iterations);
  const BarrierResult with_hz = solve(general_problem_hz(g, d), out.iterations);
  out.ie_min = stated.value;
  out.ie_min_hz = with_hz.value;
  out.pair = AuxiliaryPair{stated.x0, stated.x1};
  out.converged = stated.converged && with_hz.converged;
  return out;
}

double general_pair_leakage(const GeneralModel& g, const AuxiliaryPair& pair) {
  const Eigen::Index my = g.h_y().rows();
  const Eigen::Index mz = g.h_z().rows();
  const SymMatrix iy = SymMatrix::identity(my);
  const SymMatrix iz = SymMatrix::identity(mz);
  return 0.5 * (logdet(g.k_x()) - logdet(pair.k_xv)) -
         0.5 * (logdet(iy + pair.k_xu.congruence(g.h_y())) - logdet(iy + pair.k_xv.congruence(g.h_y()))) +
         0.5 * logdet(iz + pair.k_xu.congruence(g.h_z()));
}

double alpha_pair_leakage(const GeneralModel& g, const AlphaFamily& fam, double alpha, const AuxiliaryPair& pair) {
  return 0.5 * (logdet(g.k_x()) - logdet(pair.k_xv)) -
         (half_logdet_gain(fam.r_y, fam.lambda_y, alpha, pair.k_xu) -
          half_logdet_gain(fam.r_y, fam.lambda_y, alpha, pair.k_xv)) +
         half_logdet_gain(fam.r_z, fam.lambda_z, alpha, pair.k_xu);
}

std::vector<double> default_alpha_grid() { return {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}; }

LimitReport limit_checks(const GeneralModel& g, const SymMatrix& d, const std::vector<double>& alphas,
                         int sampled_pairs, std::uint64_t seed, double leakage_eps) {
  check_general_distortion(g, d);
  AlphaFamily fam = svd_reduce(g);
  LimitReport rep;
  rep.alpha_star = alpha_star(fam, d);

  const SymMatrix kxy = general_cond_cov_xy(g);
  const SymMatrix fo = f_o(g, d);
  const SymMatrix kx_inv = spd_inverse(g.k_x());
  const ChainProblem p = general_problem_hz(g, d);
  const auto pairs = chain_starts(p, std::max(sampled_pairs, 1), seed);

  for (double alpha : alphas) {
    if (!(alpha > 0.0) || alpha > rep.alpha_star) {
      continue;
    }
    LimitRow row;
    row.alpha = alpha;
    row.kxy_residual = rel(spd_inverse(kx_inv + fam.gain_y_alpha(alpha)), kxy);
    row.f_residual = rel(f_alpha(fam, d, alpha), fo);
    row.leakage_gap = -std::numeric_limits<double>::infinity();
    for (const auto& [v, u] : pairs) {
      const AuxiliaryPair pr{v, u};
      row.leakage_gap = std::max(row.leakage_gap, alpha_pair_leakage(g, fam, alpha, pr) - general_pair_leakage(g, pr));
    }
    rep.rows.push_back(row);
  }
  if (rep.rows.empty()) {
    return rep;
  }
  std::sort(rep.rows.begin(), rep.rows.end(), [](const LimitRow& a, const LimitRow& b) { return a.alpha > b.alpha; });

  rep.monotone = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    rep.monotone = rep.monotone && rep.rows[i].kxy_residual < rep.rows[i - 1].kxy_residual &&
                   rep.rows[i].f_residual < rep.rows[i - 1].f_residual;
  }
  std::vector<double> xs, ky, fy;
  for (const auto& row : rep.rows) {
    if (row.alpha <= 1e-2) {
      xs.push_back(row.alpha);
      ky.push_back(row.kxy_residual);
      fy.push_back(row.f_residual);
    }
  }
  rep.slope_kxy = slope(xs, ky);
  rep.slope_f = slope(xs, fy);
  const LimitRow& last = rep.rows.back();
  rep.converged = last.kxy_residual < 1e-6 && last.f_residual < 1e-6;
  rep.leakage_ordering = last.leakage_gap <= leakage_eps;
  return rep;
}

}  // namespace seclossy
