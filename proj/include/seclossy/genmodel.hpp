#pragma once

#include <vector>

#include "seclossy/leakopt.hpp"

namespace seclossy {

/// Y = H_Y X + N_Y and Z = H_Z X + N_Z with identity noise covariances.
/// H_Y and H_Z may have any number of rows; their columns match dim(K_X).
class GeneralModel {
 public:
  GeneralModel(SymMatrix k_x, Matrix h_y, Matrix h_z);

  const SymMatrix& k_x() const { return k_x_; }
  const Matrix& h_y() const { return h_y_; }
  const Matrix& h_z() const { return h_z_; }
  Eigen::Index dim() const { return k_x_.dim(); }

 private:
  SymMatrix k_x_;
  Matrix h_y_;
  Matrix h_z_;
};

/// H = Q diag(lambda) R^T reduced to square n x n factors: missing singular
/// values are zero-padded after the computed ones, surplus noise-only rows dropped.
struct AlphaFamily {
  Matrix r_y;
  Matrix r_z;
  Vector lambda_y;
  Vector lambda_z;
  double alpha_star = 0.0;

  /// R (Lambda + alpha I)^{-2} R^T
  SymMatrix sigma_y_alpha(double alpha) const;
  SymMatrix sigma_z_alpha(double alpha) const;
  /// R (Lambda + alpha I)^2 R^T, the inverse of the above without forming it.
  SymMatrix gain_y_alpha(double alpha) const;
  SymMatrix gain_z_alpha(double alpha) const;
};

AlphaFamily svd_reduce(const GeneralModel& g);

/// (K_X^{-1} + H_Y^T H_Y)^{-1}
SymMatrix general_cond_cov_xy(const GeneralModel& g);

/// Checks 0 < D <= K_{X|Y} for the general model. Throws InfeasibleDistortion.
void check_general_distortion(const GeneralModel& g, const SymMatrix& d);

/// Half of the largest alpha on a bisection grid with D^{-1} - R_Y (Lambda_Y + alpha)^2 R_Y^T > 0.
/// Also stored into fam.alpha_star. Throws InfeasibleDistortion below 1e-12.
double alpha_star(AlphaFamily& fam, const SymMatrix& d);

/// (D^{-1} - H_Y^T H_Y)^{-1}. Throws NotPositiveDefinite.
SymMatrix f_o(const GeneralModel& g, const SymMatrix& d);

/// (D^{-1} - R_Y (Lambda_Y + alpha)^2 R_Y^T)^{-1}
SymMatrix f_alpha(const AlphaFamily& fam, const SymMatrix& d, double alpha);

/// Leakage bound objective with the H_Y-only third term, exactly as the
/// outer bound for this model is stated. It does not depend on H_Z.
ChainProblem general_problem(const GeneralModel& g, const SymMatrix& d);

/// Same chain with the eavesdropper term 1/2 log|H_Z K_{X|U} H_Z^T + I|.
ChainProblem general_problem_hz(const GeneralModel& g, const SymMatrix& d);

struct GeneralBounds {
  double r_min = 0.0;
  double ie_min = 0.0;      // stated bound, H_Y only
  double ie_min_hz = 0.0;   // diagnostic with the H_Z eavesdropper term
  AuxiliaryPair pair;
  bool converged = false;
  int iterations = 0;
};

GeneralBounds general_bounds(const GeneralModel& g, const SymMatrix& d, const SolverOptions& opts = {});

/// Leakage of a fixed pair in the original model (H_Z eavesdropper term).
double general_pair_leakage(const GeneralModel& g, const AuxiliaryPair& pair);

/// Leakage of a fixed pair in the alpha-perturbed aligned model.
double alpha_pair_leakage(const GeneralModel& g, const AlphaFamily& fam, double alpha, const AuxiliaryPair& pair);

struct LimitRow {
  double alpha = 0.0;
  double kxy_residual = 0.0;   // ||K_{X|Y_alpha} - K_{X|Y}|| / ||K_{X|Y}||
  double f_residual = 0.0;     // ||F_alpha(D) - F_o(D)|| / ||F_o(D)||
  double leakage_gap = 0.0;    // max over sampled pairs of I_alpha - I_o
};

struct LimitReport {
  std::vector<LimitRow> rows;
  double alpha_star = 0.0;
  double slope_kxy = 0.0;      // log-log slope over rows with alpha <= 1e-2
  double slope_f = 0.0;
  bool monotone = false;
  bool converged = false;      // both residuals < 1e-6 at the smallest alpha
  bool leakage_ordering = false;
};

/// Default grid {1e-1, ..., 1e-6}.
std::vector<double> default_alpha_grid();

/// Alphas above alpha* are skipped. leakage_eps bounds I_alpha - I_o at the smallest alpha.
LimitReport limit_checks(const GeneralModel& g, const SymMatrix& d, const std::vector<double>& alphas,
                         int sampled_pairs = 16, std::uint64_t seed = 7, double leakage_eps = 1e-5);

}  // namespace seclossy
