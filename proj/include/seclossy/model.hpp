#pragma once

#include <utility>

#include "seclossy/matkernel.hpp"

namespace seclossy {

/// Source X ~ N(0, K_X) observed as Y = X + N_Y at the legitimate decoder and
/// Z = X + N_Z at the eavesdropper. All three covariances must be positive
/// definite and share one dimension.
class AlignedModel {
 public:
  AlignedModel(SymMatrix k_x, SymMatrix sigma_y, SymMatrix sigma_z);

  const SymMatrix& k_x() const { return k_x_; }
  const SymMatrix& sigma_y() const { return sigma_y_; }
  const SymMatrix& sigma_z() const { return sigma_z_; }
  Eigen::Index dim() const { return k_x_.dim(); }

 private:
  SymMatrix k_x_;
  SymMatrix sigma_y_;
  SymMatrix sigma_z_;
};

/// Mean-square-error matrix D. The checked constructor enforces
/// 0 <= D <= K_{X|Y} for the model it is bound to; solver inner loops may use
/// the unchecked factory.
class DistortionConstraint {
 public:
  DistortionConstraint(const AlignedModel& m, SymMatrix d);
  static DistortionConstraint unchecked(SymMatrix d) { return DistortionConstraint(std::move(d)); }

  const SymMatrix& d() const { return d_; }

 private:
  explicit DistortionConstraint(SymMatrix d) : d_(std::move(d)) {}
  SymMatrix d_;
};

/// Conditional covariances (K_{X|V}, K_{X|U}) standing in for the auxiliaries.
struct AuxiliaryPair {
  SymMatrix k_xv;
  SymMatrix k_xu;
};

struct ObjectiveGradient {
  SymMatrix grad_v;
  SymMatrix grad_u;
};

struct RateBound {
  double nats = 0.0;   // 1/2 log |K_{X|Y}| / |D|
  double via_f = 0.0;  // same quantity written through F(D)
};

/// K_{X|Y} = K_X (K_X + Sigma_Y)^{-1} Sigma_Y.
SymMatrix cond_cov_xy(const AlignedModel& m);

/// F(D) = Sigma_Y (Sigma_Y - D)^{-1} Sigma_Y - Sigma_Y.
/// Throws InfeasibleDistortion when Sigma_Y - D is not positive definite.
SymMatrix f_of_d(const AlignedModel& m, const DistortionConstraint& d);

/// K_{X|VY} = Sigma_Y - Sigma_Y (K_{X|V} + Sigma_Y)^{-1} Sigma_Y.
SymMatrix cond_cov_given_v_and_y(const SymMatrix& k_xv, const SymMatrix& sigma_y);

struct Lemma4Sides {
  bool conditional_below_d = false;  // K_{X|VY} <= D
  bool kxv_below_f = false;          // K_{X|V} <= F(D)
};

Lemma4Sides lemma4_sides(const SymMatrix& k_xv, const AlignedModel& m, const DistortionConstraint& d,
                         double tol = 1e-9);

/// Returns (K_{X|VY} <= D). Contract: always equal to (K_{X|V} <= F(D)).
bool lemma4_equivalent(const SymMatrix& k_xv, const AlignedModel& m, const DistortionConstraint& d,
                       double tol = 1e-9);

/// Wyner-Ziv rate bound. A singular PSD D yields +infinity in both fields.
RateBound rate_lower_bound(const AlignedModel& m, const DistortionConstraint& d);

/// 1/2 log|K_X|/|K_{X|V}| - 1/2 log|K_{X|U}+S_Y|/|K_{X|V}+S_Y| + 1/2 log|K_{X|U}+S_Z|/|S_Z|.
/// +infinity when K_{X|V} is singular.
double leakage_objective(const AlignedModel& m, const AuxiliaryPair& pair);

ObjectiveGradient objective_gradient(const AlignedModel& m, const AuxiliaryPair& pair);

/// 0 <= K_{X|V} <= K_{X|U} <= K_X and K_{X|V} <= F(D), each to tol.
bool pair_feasible(const AlignedModel& m, const DistortionConstraint& d, const AuxiliaryPair& pair,
                   double tol);

}  // namespace seclossy
