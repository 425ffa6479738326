#include "seclossy/barrier.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <utility>

#include "seclossy/errors.hpp"

namespace seclossy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Coord {
  Eigen::Index i;
  Eigen::Index j;
};

std::vector<Coord> sym_coords(Eigen::Index n) {
  std::vector<Coord> out;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      out.push_back({i, j});
    }
  }
  return out;
}

// Barrier terms for X_1 - X_0, upper - X_1 and cap - X_0, in that order.
std::vector<LogDetTerm> barrier_terms(const ChainProblem& p, double t) {
  const Eigen::Index n = p.upper.dim();
  const Matrix eye = Matrix::Identity(n, n);
  const Matrix zero = Matrix::Zero(n, n);
  std::vector<LogDetTerm> out(3);
  out[0] = LogDetTerm{-t, zero, {-1.0, 1.0}, {eye, eye}};
  out[1] = LogDetTerm{-t, p.upper.mat(), {0.0, -1.0}, {eye, eye}};
  out[2] = LogDetTerm{-t, p.cap.mat(), {-1.0, 0.0}, {eye, eye}};
  return out;
}

Matrix term_argument(const LogDetTerm& term, const std::array<const Matrix*, 2>& x) {
  Matrix a = term.offset;
  for (int v = 0; v < 2; ++v) {
    if (term.sign[v] != 0.0) {
      a.noalias() += term.sign[v] * term.map[v] * *x[v] * term.map[v].transpose();
    }
  }
  return 0.5 * (a + a.transpose());
}

bool factor(const Matrix& a, Eigen::LLT<Matrix>& llt) {
  llt.compute(a);
  if (llt.info() != Eigen::Success) {
    return false;
  }
  const auto diag = llt.matrixLLT().diagonal();
  return (diag.array() > 0.0).all() && diag.allFinite();
}

double eval_terms(const std::vector<LogDetTerm>& terms, const std::array<const Matrix*, 2>& x) {
  double total = 0.0;
  Eigen::LLT<Matrix> llt;
  for (const auto& term : terms) {
    if (!factor(term_argument(term, x), llt)) {
      return kInf;
    }
    total += term.coef * 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  }
  return total;
}

struct Local {
  Vector grad;
  Matrix hess;
};

// Gradient and Hessian in the symmetric coordinates E_ii, E_ij + E_ji.
Local derivatives(const std::vector<LogDetTerm>& terms, const std::array<const Matrix*, 2>& x,
                  const std::vector<Coord>& coords) {
  const auto np = static_cast<Eigen::Index>(coords.size());
  Local out{Vector::Zero(2 * np), Matrix::Zero(2 * np, 2 * np)};
  Eigen::LLT<Matrix> llt;
  for (const auto& term : terms) {
    if (!factor(term_argument(term, x), llt)) {
      throw NotPositiveDefinite("barrier derivatives evaluated outside the domain");
    }
    const Matrix a_inv = llt.solve(Matrix::Identity(term.offset.rows(), term.offset.cols()));
    for (int va = 0; va < 2; ++va) {
      if (term.sign[va] == 0.0) {
        continue;
      }
      const Matrix g = term.coef * term.sign[va] * term.map[va].transpose() * a_inv * term.map[va];
      for (Eigen::Index k = 0; k < np; ++k) {
        const auto [i, j] = coords[k];
        out.grad(va * np + k) += i == j ? g(i, i) : g(i, j) + g(j, i);
      }
      for (int vb = 0; vb < 2; ++vb) {
        if (term.sign[vb] == 0.0) {
          continue;
        }
        const Matrix c = term.map[va].transpose() * a_inv * term.map[vb];
        const double scale = -term.coef * term.sign[va] * term.sign[vb];
        // m(r, s) = c^T(r, i) c(j, s) + c^T(r, j) c(i, s) for B_k = E_ij + E_ji.
        auto m = [&](Eigen::Index r, Eigen::Index s, Eigen::Index i, Eigen::Index j) {
          double v = c(i, r) * c(j, s);
          if (i != j) {
            v += c(j, r) * c(i, s);
          }
          return v;
        };
        for (Eigen::Index k = 0; k < np; ++k) {
          const auto [i, j] = coords[k];
          for (Eigen::Index l = 0; l < np; ++l) {
            const auto [p, q] = coords[l];
            const double tr = p == q ? m(p, p, i, j) : m(p, q, i, j) + m(q, p, i, j);
            out.hess(va * np + k, vb * np + l) += scale * tr;
          }
        }
      }
    }
  }
  out.hess = 0.5 * (out.hess + out.hess.transpose());
  return out;
}

Matrix coords_to_matrix(const Vector& v, Eigen::Index offset, const std::vector<Coord>& coords,
                        Eigen::Index n) {
  Matrix out = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < coords.size(); ++k) {
    const auto [i, j] = coords[k];
    const double val = v(offset + static_cast<Eigen::Index>(k));
    out(i, j) += val;
    if (i != j) {
      out(j, i) += val;
    }
  }
  return out;
}

bool strictly_feasible(const ChainProblem& p, const Matrix& x0, const Matrix& x1) {
  Eigen::LLT<Matrix> llt;
  return factor(x0, llt) && factor(x1 - x0, llt) && factor(p.upper.mat() - x1, llt) &&
         factor(p.cap.mat() - x0, llt);
}

SymMatrix random_contraction(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.05, 0.95);
  Matrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      g(i, j) = normal(rng);
    }
  }
  const Matrix o = Eigen::HouseholderQR<Matrix>(g).householderQ();
  Vector ev(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    ev(i) = uniform(rng);
  }
  return SymMatrix(o * ev.asDiagonal() * o.transpose());
}

}  // namespace

double chain_objective(const ChainProblem& p, const SymMatrix& x0, const SymMatrix& x1) {
  return p.constant + eval_terms(p.terms, {&x0.mat(), &x1.mat()});
}

std::array<SymMatrix, 2> chain_gradient(const ChainProblem& p, const SymMatrix& x0, const SymMatrix& x1) {
  const Eigen::Index n = x0.dim();
  Matrix g0 = Matrix::Zero(n, n);
  Matrix g1 = Matrix::Zero(n, n);
  const std::array<const Matrix*, 2> x{&x0.mat(), &x1.mat()};
  for (const auto& term : p.terms) {
    const Matrix a_inv = spd_inverse(SymMatrix(term_argument(term, x))).mat();
    Matrix* targets[2] = {&g0, &g1};
    for (int v = 0; v < 2; ++v) {
      if (term.sign[v] != 0.0) {
        *targets[v] += term.coef * term.sign[v] * term.map[v].transpose() * a_inv * term.map[v];
      }
    }
  }
  return {SymMatrix(g0), SymMatrix(g1)};
}

std::array<SymMatrix, 2> chain_center(const ChainProblem& p) {
  const SymMatrix inv_sum = spd_inverse(p.cap) + spd_inverse(p.upper);
  const SymMatrix v = 0.5 * spd_inverse(inv_sum);
  const SymMatrix u = 0.5 * (v + p.upper);
  return {v, u};
}

std::vector<std::array<SymMatrix, 2>> chain_starts(const ChainProblem& p, int count, std::uint64_t seed) {
  const auto [vc, uc] = chain_center(p);
  const SymMatrix& cap = p.cap;
  const SymMatrix& up = p.upper;
  std::vector<std::array<SymMatrix, 2>> targets{{cap, cap}, {cap, up}, {cap, 0.5 * (cap + up)}};
  std::mt19937_64 rng(seed);
  const SymMatrix cap_root = psd_sqrt(cap);
  while (static_cast<int>(targets.size()) < count) {
    const SymMatrix v(cap_root.mat() * random_contraction(cap.dim(), rng).mat() * cap_root.mat());
    const SymMatrix gap_root = psd_sqrt(project_psd(up - v));
    const SymMatrix u = v + SymMatrix(gap_root.mat() * random_contraction(cap.dim(), rng).mat() * gap_root.mat());
    targets.push_back({v, u});
  }
  targets.resize(static_cast<std::size_t>(std::max(count, 1)), {vc, uc});

  std::vector<std::array<SymMatrix, 2>> out;
  for (const auto& [tv, tu] : targets) {
    SymMatrix v = 0.9 * tv + 0.1 * vc;
    SymMatrix u = 0.9 * tu + 0.1 * uc;
    if (!strictly_feasible(p, v.mat(), u.mat())) {
      v = vc;
      u = uc;
    }
    out.push_back({v, u});
  }
  return out;
}

BarrierResult solve_chain(const ChainProblem& p, const SymMatrix& x0_init, const SymMatrix& x1_init,
                          const BarrierOptions& opts) {
  const Eigen::Index n = p.upper.dim();
  const auto coords = sym_coords(n);
  const auto np = static_cast<Eigen::Index>(coords.size());
  if (!strictly_feasible(p, x0_init.mat(), x1_init.mat())) {
    throw InvalidOrder("barrier start is not strictly feasible");
  }
  Matrix x0 = x0_init.mat();
  Matrix x1 = x1_init.mat();

  BarrierResult out{x0_init, x1_init, 0.0, SymMatrix::zero(n), SymMatrix::zero(n), SymMatrix::zero(n), false, 0};
  double t = opts.t_init;
  bool last_stage = false;
  bool stage_ok = false;
  while (true) {
    if (t <= opts.t_final * (1.0 + 1e-12)) {
      t = opts.t_final;
      last_stage = true;
    }
    std::vector<LogDetTerm> terms = p.terms;
    const auto extra = barrier_terms(p, t);
    terms.insert(terms.end(), extra.begin(), extra.end());

    stage_ok = false;
    for (int it = 0; it < opts.max_newton; ++it) {
      ++out.iterations;
      const std::array<const Matrix*, 2> x{&x0, &x1};
      const double phi = eval_terms(terms, x);
      const Local d = derivatives(terms, x, coords);
      Eigen::SelfAdjointEigenSolver<Matrix> es(d.hess);
      const Vector lam = es.eigenvalues();
      const double floor = std::max(1e-12 * lam.cwiseAbs().maxCoeff(), 1e-300);
      const Vector inv = lam.cwiseAbs().cwiseMax(floor).cwiseInverse();
      const Vector step = -(es.eigenvectors() * (inv.asDiagonal() * (es.eigenvectors().transpose() * d.grad)));
      const double slope = d.grad.dot(step);
      const double decrement = -slope;
      if (0.5 * decrement < opts.tol_decrement) {
        stage_ok = true;
        break;
      }
      const Matrix dx0 = coords_to_matrix(step, 0, coords, n);
      const Matrix dx1 = coords_to_matrix(step, np, coords, n);
      double alpha = opts.step_init;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
        const Matrix t0 = x0 + alpha * dx0;
        const Matrix t1 = x1 + alpha * dx1;
        const double trial = eval_terms(terms, {&t0, &t1});
        if (!std::isfinite(trial)) {
          continue;
        }
        // Near the minimizer the Armijo test drowns in rounding; a feasible step is enough.
        if (trial <= phi + 1e-4 * alpha * slope || decrement < 1e-10) {
          x0 = t0;
          x1 = t1;
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        stage_ok = decrement < 1e-8;
        break;
      }
    }
    if (last_stage) {
      break;
    }
    t *= opts.t_factor;
  }

  out.x0 = SymMatrix(x0);
  out.x1 = SymMatrix(x1);
  out.value = chain_objective(p, out.x0, out.x1);
  out.m_chain = 2.0 * t * spd_inverse(out.x1 - out.x0);
  out.m_upper = 2.0 * t * spd_inverse(p.upper - out.x1);
  out.m_cap = 2.0 * t * spd_inverse(p.cap - out.x0);
  out.converged = stage_ok && std::isfinite(out.value);
  return out;
}

}  // namespace seclossy
