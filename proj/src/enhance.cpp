#include "seclossy/enhance.hpp"

#include <algorithm>
#include <cmath>

#include "seclossy/errors.hpp"

namespace seclossy {

namespace {

double rel_gap(const Matrix& lhs, const Matrix& rhs) {
  const double scale = rhs.norm();
  return (lhs - rhs).norm() / (scale > 0.0 ? scale : 1.0);
}

double half_log_ratio(const SymMatrix& num, const SymMatrix& den) { return 0.5 * (logdet(num) - logdet(den)); }

}  // namespace

EnhancedChannel enhance(const AlignedModel& m, const DistortionConstraint& d, const LeakageSolution& sol) {
  const SymMatrix& u = sol.pair.k_xu;
  const SymMatrix& m_u = sol.certificate.m_u;
  EnhancedChannel out{m.sigma_y(), {}};
  if (!m_u.mat().isZero(0.0)) {
    const SymMatrix bracket = spd_inverse(u + m.sigma_y()) + m_u;
    if (!psd_check(bracket, 0.0).is_pd) {
      throw NotPositiveDefinite("enhancement bracket is not positive definite");
    }
    out.sigma_y_tilde = spd_inverse(bracket) - u;
  }
  out.property_report = verify_lemma6(m, d, sol, out.sigma_y_tilde);
  return out;
}

std::map<std::string, double> verify_lemma6(const AlignedModel& m, const DistortionConstraint& d,
                                            const LeakageSolution& sol, const SymMatrix& st) {
  const SymMatrix& v = sol.pair.k_xv;
  const SymMatrix& u = sol.pair.k_xu;
  const SymMatrix& sy = m.sigma_y();
  const SymMatrix& sz = m.sigma_z();
  const SymMatrix& kx = m.k_x();
  const SymMatrix f = f_of_d(m, d);
  const double noise_scale = std::max(max_abs_eigenvalue(sy), max_abs_eigenvalue(sz));

  std::map<std::string, double> r;
  r["enhanced_psd"] = std::max(0.0, -min_eigenvalue(st)) / noise_scale;
  r["enhanced_below_noise"] =
      std::max({0.0, -min_eigenvalue(sy - st), -min_eigenvalue(sz - st)}) / noise_scale;

  const Matrix v_st_inv = spd_inverse(v + st).mat();
  const Matrix u_st_inv = spd_inverse(u + st).mat();
  r["inverse_shift"] = rel_gap(v_st_inv, spd_inverse(v + sy).mat() + sol.certificate.m_u.mat());
  r["ratio_u_v"] = rel_gap(u_st_inv * (v + st).mat(), spd_solve(u + sy, (v + sy).mat()));
  r["ratio_u_x"] = rel_gap(u_st_inv * (kx + st).mat(), spd_solve(u + sz, (kx + sz).mat()));
  r["ratio_v_f"] = rel_gap(v_st_inv * (f + st).mat(), spd_solve(v, f.mat()));
  return r;
}

double closed_form_lbar(const AlignedModel& m, const DistortionConstraint& d, const EnhancedChannel& e) {
  const SymMatrix f = f_of_d(m, d);
  const SymMatrix& st = e.sigma_y_tilde;
  return half_log_ratio(m.k_x(), f) - half_log_ratio(m.k_x() + st, f + st) +
         half_log_ratio(m.k_x() + m.sigma_z(), m.sigma_z());
}

std::array<double, 4> chain_values(const AlignedModel& m, const DistortionConstraint& d,
                                   const LeakageSolution& sol, const EnhancedChannel& e) {
  const SymMatrix& v = sol.pair.k_xv;
  const SymMatrix& u = sol.pair.k_xu;
  const SymMatrix& st = e.sigma_y_tilde;
  const SymMatrix& kx = m.k_x();
  const SymMatrix& sz = m.sigma_z();
  const double eaves_full = half_log_ratio(kx + sz, sz);
  const double eaves_u = half_log_ratio(u + sz, sz);
  return {
      closed_form_lbar(m, d, e),
      half_log_ratio(kx, v) - half_log_ratio(kx + st, v + st) + eaves_full,
      half_log_ratio(kx, v) - half_log_ratio(u + st, v + st) + eaves_u,
      leakage_objective(m, sol.pair),
  };
}

bool verify_chain(const AlignedModel& m, const DistortionConstraint& d, const LeakageSolution& sol,
                  const EnhancedChannel& e, double tol) {
  const auto values = chain_values(m, d, sol, e);
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    if (!(std::abs(values[i] - values[i + 1]) < tol)) {
      return false;
    }
  }
  return true;
}

}  // namespace seclossy
