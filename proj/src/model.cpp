#include "seclossy/model.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "seclossy/errors.hpp"

namespace seclossy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_pd(const SymMatrix& a, const char* name) {
  if (!psd_check(a, 0.0).is_pd) {
    throw NotPositiveDefinite(std::string(name) + " must be positive definite");
  }
}

bool is_spd(const SymMatrix& a) {
  Eigen::LLT<Matrix> llt(a.mat());
  return llt.info() == Eigen::Success && (llt.matrixLLT().diagonal().array() > 0.0).all();
}

}  // namespace

AlignedModel::AlignedModel(SymMatrix k_x, SymMatrix sigma_y, SymMatrix sigma_z)
    : k_x_(std::move(k_x)), sigma_y_(std::move(sigma_y)), sigma_z_(std::move(sigma_z)) {
  if (sigma_y_.dim() != k_x_.dim() || sigma_z_.dim() != k_x_.dim()) {
    throw DimensionMismatch("aligned model: K_X, Sigma_Y, Sigma_Z must share one dimension");
  }
  require_pd(k_x_, "K_X");
  require_pd(sigma_y_, "Sigma_Y");
  require_pd(sigma_z_, "Sigma_Z");
}

DistortionConstraint::DistortionConstraint(const AlignedModel& m, SymMatrix d) : d_(std::move(d)) {
  if (d_.dim() != m.dim()) {
    throw DimensionMismatch("distortion matrix dimension does not match the model");
  }
  if (!psd_check(d_).is_psd) {
    throw InfeasibleDistortion("distortion violates 0 <= D (negative eigenvalue)");
  }
  const SymMatrix k_xy = cond_cov_xy(m);
  if (!psd_order(d_, k_xy)) {
    throw InfeasibleDistortion("distortion violates D <= K_{X|Y}");
  }
}

SymMatrix cond_cov_xy(const AlignedModel& m) {
  const Matrix solved = spd_solve(m.k_x() + m.sigma_y(), m.sigma_y().mat());
  return SymMatrix(m.k_x().mat() * solved);
}

SymMatrix f_of_d(const AlignedModel& m, const DistortionConstraint& d) {
  const SymMatrix gap = m.sigma_y() - d.d();
  if (!is_spd(gap)) {
    throw InfeasibleDistortion("Sigma_Y - D is not positive definite");
  }
  // Sigma_Y (Sigma_Y - D)^{-1} Sigma_Y - Sigma_Y == Sigma_Y (Sigma_Y - D)^{-1} D, without cancellation.
  return SymMatrix(m.sigma_y().mat() * spd_solve(gap, d.d().mat()));
}

SymMatrix cond_cov_given_v_and_y(const SymMatrix& k_xv, const SymMatrix& sigma_y) {
  const Matrix solved = spd_solve(k_xv + sigma_y, sigma_y.mat());
  return SymMatrix(sigma_y.mat() - sigma_y.mat() * solved);
}

Lemma4Sides lemma4_sides(const SymMatrix& k_xv, const AlignedModel& m, const DistortionConstraint& d,
                         double tol) {
  Lemma4Sides sides;
  const SymMatrix k_xvy = cond_cov_given_v_and_y(k_xv, m.sigma_y());
  const SymMatrix f = f_of_d(m, d);
  const SymMatrix lhs_gap = d.d() - k_xvy;
  const SymMatrix rhs_gap = f - k_xv;
  sides.conditional_below_d = psd_check(lhs_gap, tol * (1.0 + max_abs_eigenvalue(d.d()))).is_psd;
  sides.kxv_below_f = psd_check(rhs_gap, tol * (1.0 + max_abs_eigenvalue(f))).is_psd;
  return sides;
}

bool lemma4_equivalent(const SymMatrix& k_xv, const AlignedModel& m, const DistortionConstraint& d,
                       double tol) {
  return lemma4_sides(k_xv, m, d, tol).conditional_below_d;
}

RateBound rate_lower_bound(const AlignedModel& m, const DistortionConstraint& d) {
  const SymMatrix k_xy = cond_cov_xy(m);
  const PsdCheckReport d_report = psd_check(d.d());
  if (!d_report.is_psd || !psd_order(d.d(), k_xy)) {
    throw InfeasibleDistortion("rate bound requires 0 <= D <= K_{X|Y}");
  }
  if (!is_spd(d.d()) || d_report.min_eigenvalue <= 1e-14 * (1.0 + max_abs_eigenvalue(d.d()))) {
    return RateBound{kInf, kInf};
  }
  const SymMatrix f = f_of_d(m, d);
  RateBound out;
  out.nats = 0.5 * (logdet(k_xy) - logdet(d.d()));
  out.via_f = 0.5 * (logdet(m.k_x()) - logdet(f)) -
              0.5 * (logdet(m.k_x() + m.sigma_y()) - logdet(f + m.sigma_y()));
  return out;
}

double leakage_objective(const AlignedModel& m, const AuxiliaryPair& pair) {
  if (!is_spd(pair.k_xv)) {
    return kInf;
  }
  const SymMatrix& sy = m.sigma_y();
  const SymMatrix& sz = m.sigma_z();
  return 0.5 * (logdet(m.k_x()) - logdet(pair.k_xv)) -
         0.5 * (logdet(pair.k_xu + sy) - logdet(pair.k_xv + sy)) +
         0.5 * (logdet(pair.k_xu + sz) - logdet(sz));
}

ObjectiveGradient objective_gradient(const AlignedModel& m, const AuxiliaryPair& pair) {
  const SymMatrix& sy = m.sigma_y();
  const SymMatrix& sz = m.sigma_z();
  return ObjectiveGradient{
      0.5 * (spd_inverse(pair.k_xv + sy) - spd_inverse(pair.k_xv)),
      0.5 * (spd_inverse(pair.k_xu + sz) - spd_inverse(pair.k_xu + sy)),
  };
}

bool pair_feasible(const AlignedModel& m, const DistortionConstraint& d, const AuxiliaryPair& pair,
                   double tol) {
  const double scaled = tol * (1.0 + max_abs_eigenvalue(m.k_x()));
  const SymMatrix f = f_of_d(m, d);
  return psd_check(pair.k_xv, scaled).is_psd && psd_order(pair.k_xv, pair.k_xu, scaled) &&
         psd_order(pair.k_xu, m.k_x(), scaled) && psd_order(pair.k_xv, f, scaled);
}

}  // namespace seclossy
