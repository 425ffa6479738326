#pragma once

#include <array>
#include <map>
#include <string>

#include "seclossy/leakopt.hpp"

namespace seclossy {

/// Enhanced side-information noise covariance built from an optimum and its
/// multiplier M_U. property_report holds the residuals of verify_lemma6.
struct EnhancedChannel {
  SymMatrix sigma_y_tilde;
  std::map<std::string, double> property_report;
};

/// Names of the six enhancement properties, in order.
inline constexpr std::array<const char*, 6> kEnhancementProperties{
    "enhanced_psd", "enhanced_below_noise", "inverse_shift", "ratio_u_v", "ratio_u_x", "ratio_v_f"};

/// [(K_{X|U} + Sigma_Y)^{-1} + M_U]^{-1} - K_{X|U}. Returns Sigma_Y itself
/// when M_U is exactly zero.
EnhancedChannel enhance(const AlignedModel& m, const DistortionConstraint& d, const LeakageSolution& sol);

/// Residuals of the six properties. Order violations are reported as the
/// most negative eigenvalue relative to the noise scale; identities as
/// ||lhs - rhs|| / ||rhs||.
std::map<std::string, double> verify_lemma6(const AlignedModel& m, const DistortionConstraint& d,
                                            const LeakageSolution& sol, const SymMatrix& sigma_y_tilde);

/// 1/2 log|K_X|/|F| - 1/2 log|K_X + S~|/|F + S~| + 1/2 log|K_X + S_Z|/|S_Z|.
double closed_form_lbar(const AlignedModel& m, const DistortionConstraint& d, const EnhancedChannel& e);

/// The four successive expressions linking the closed form to the objective
/// at the solution: closed form, F replaced by K_{X|V}, K_X replaced by
/// K_{X|U}, enhanced noise replaced by Sigma_Y.
std::array<double, 4> chain_values(const AlignedModel& m, const DistortionConstraint& d,
                                   const LeakageSolution& sol, const EnhancedChannel& e);

/// True when each successive pair of chain_values agrees to tol.
bool verify_chain(const AlignedModel& m, const DistortionConstraint& d, const LeakageSolution& sol,
                  const EnhancedChannel& e, double tol);

}  // namespace seclossy
