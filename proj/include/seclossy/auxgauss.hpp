#pragma once

#include <cstdint>

#include "seclossy/model.hpp"

namespace seclossy {

/// Jointly Gaussian auxiliaries V = A_V X + N_V and U = A_U X + N_U with
/// N_V ~ N(0, I) and N_U = A_UV N_V + N~, N~ ~ N(0, I - A_UV A_UV^T)
/// independent of N_V. Then U = A_UV V + N~, so U -> V -> X.
struct GaussianAuxRealization {
  Matrix a_v;
  Matrix a_u;
  Matrix a_uv;
  SymMatrix sigma_tilde_n;
  Matrix w;
  Vector lambda_v;
  Vector lambda_u;
};

/// Realizes (K_{X|V}, K_{X|U}) for 0 < K_{X|V} <= K_{X|U} <= K_X.
/// Throws InvalidOrder when the chain is violated beyond the default cone tolerance.
GaussianAuxRealization construct(const SymMatrix& k_x, const AuxiliaryPair& pair);

/// (K_X^{-1} + A_V^T A_V)^{-1} and (K_X^{-1} + A_U^T A_U)^{-1}.
AuxiliaryPair verify_conditional_covariances(const SymMatrix& k_x, const GaussianAuxRealization& r);

/// ||K_UX - K_UV K_V^{-1} K_VX||_F / max(1, ||K_X||_F) for the joint law of (U, V, X).
double verify_markov(const SymMatrix& k_x, const GaussianAuxRealization& r);

struct MonteCarloReport {
  SymMatrix empirical;   // sample K_{X|VY}
  SymMatrix predicted;   // cond_cov_given_v_and_y(K_{X|V}, Sigma_Y)
  double max_z = 0.0;    // largest entrywise gap in standard errors
  bool within_3se = false;
};

/// Draws samples of (X, V, Y) with Y = X + N_Y and compares the empirical
/// conditional covariance of X given (V, Y) with the closed form.
MonteCarloReport monte_carlo_check(const SymMatrix& k_x, const SymMatrix& sigma_y,
                                   const GaussianAuxRealization& r, const SymMatrix& k_xv, int samples,
                                   std::uint64_t seed);

}  // namespace seclossy
