#include "seclossy/auxgauss.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "seclossy/errors.hpp"

namespace seclossy {

namespace {

Matrix sample_gaussian(const SymMatrix& cov, int samples, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const Matrix root = psd_sqrt(cov).mat();
  Matrix z(cov.dim(), samples);
  for (int s = 0; s < samples; ++s) {
    for (Eigen::Index i = 0; i < cov.dim(); ++i) {
      z(i, s) = normal(rng);
    }
  }
  return root * z;
}

}  // namespace

GaussianAuxRealization construct(const SymMatrix& k_x, const AuxiliaryPair& pair) {
  const SymMatrix& v = pair.k_xv;
  const SymMatrix& u = pair.k_xu;
  if (v.dim() != k_x.dim() || u.dim() != k_x.dim()) {
    throw DimensionMismatch("construct: pair and K_X dimensions differ");
  }
  if (!psd_check(v, 0.0).is_pd) {
    throw InvalidOrder("construct: K_{X|V} must be positive definite");
  }
  if (!psd_order(v, u)) {
    throw InvalidOrder("construct: K_{X|V} <= K_{X|U} violated");
  }
  if (!psd_order(u, k_x)) {
    throw InvalidOrder("construct: K_{X|U} <= K_X violated");
  }

  const SymMatrix kx_inv = spd_inverse(k_x);
  const SymMatrix a = project_psd(spd_inverse(v) - kx_inv);
  const SymMatrix b = project_psd(spd_inverse(u) - kx_inv);
  const SimultaneousDiagonalization sd = simultaneous_diagonalize(a, b);

  GaussianAuxRealization r;
  r.w = sd.w;
  r.lambda_v = sd.lambda_a.cwiseSqrt();
  r.lambda_u = sd.lambda_b.cwiseSqrt();
  const double zero_tol = 1e-12 * std::max(r.lambda_v.maxCoeff(), 1e-300);
  for (Eigen::Index i = 0; i < r.lambda_v.size(); ++i) {
    r.lambda_u(i) = r.lambda_v(i) > zero_tol ? std::min(r.lambda_u(i), r.lambda_v(i)) : 0.0;
  }
  r.a_v = r.lambda_v.asDiagonal() * r.w;
  r.a_u = r.lambda_u.asDiagonal() * r.w;
  const Vector ratio = r.lambda_u.cwiseProduct(diag_pseudo_inverse(r.lambda_v, zero_tol));
  r.a_uv = ratio.asDiagonal();
  r.sigma_tilde_n = SymMatrix::diagonal((Vector::Ones(ratio.size()) - ratio.cwiseAbs2()).cwiseMax(0.0));
  return r;
}

AuxiliaryPair verify_conditional_covariances(const SymMatrix& k_x, const GaussianAuxRealization& r) {
  const SymMatrix kx_inv = spd_inverse(k_x);
  return AuxiliaryPair{spd_inverse(kx_inv + SymMatrix(r.a_v.transpose() * r.a_v)),
                       spd_inverse(kx_inv + SymMatrix(r.a_u.transpose() * r.a_u))};
}

double verify_markov(const SymMatrix& k_x, const GaussianAuxRealization& r) {
  const Matrix& k = k_x.mat();
  const Eigen::Index n = k_x.dim();
  const SymMatrix k_v(r.a_v * k * r.a_v.transpose() + Matrix::Identity(n, n));
  const Matrix k_vx = r.a_v * k;
  const Matrix k_ux = r.a_u * k;
  const Matrix k_uv = r.a_u * k * r.a_v.transpose() + r.a_uv;
  const Matrix gap = k_ux - k_uv * spd_solve(k_v, k_vx);
  return gap.norm() / std::max(1.0, k.norm());
}

MonteCarloReport monte_carlo_check(const SymMatrix& k_x, const SymMatrix& sigma_y,
                                   const GaussianAuxRealization& r, const SymMatrix& k_xv, int samples,
                                   std::uint64_t seed) {
  if (samples < 2) {
    throw ConfigError("monte_carlo_check: at least two samples required");
  }
  const Eigen::Index n = k_x.dim();
  std::mt19937_64 rng(seed);
  const Matrix x = sample_gaussian(k_x, samples, rng);
  const Matrix n_v = sample_gaussian(SymMatrix::identity(n), samples, rng);
  const Matrix n_y = sample_gaussian(sigma_y, samples, rng);

  Matrix joint(3 * n, samples);
  joint << x, r.a_v * x + n_v, x + n_y;
  const Matrix centered = joint.colwise() - joint.rowwise().mean();
  const Matrix cov = centered * centered.transpose() / static_cast<double>(samples - 1);
  const Matrix c_xx = cov.topLeftCorner(n, n);
  const Matrix c_xo = cov.topRightCorner(n, 2 * n);
  const SymMatrix c_oo(cov.bottomRightCorner(2 * n, 2 * n));

  MonteCarloReport out;
  out.empirical = SymMatrix(c_xx - c_xo * spd_solve(c_oo, c_xo.transpose()));
  out.predicted = cond_cov_given_v_and_y(k_xv, sigma_y);
  const Matrix& p = out.predicted.mat();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double se = std::sqrt((p(i, i) * p(j, j) + p(i, j) * p(i, j)) / samples);
      out.max_z = std::max(out.max_z, std::abs(out.empirical(i, j) - p(i, j)) / se);
    }
  }
  out.within_3se = out.max_z <= 3.0;
  return out;
}

}  // namespace seclossy
