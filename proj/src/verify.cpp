#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "seclossy/auxgauss.hpp"
#include "seclossy/cli.hpp"
#include "seclossy/enhance.hpp"
#include "seclossy/errors.hpp"
#include "seclossy/examples.hpp"
#include "seclossy/sampling.hpp"

namespace seclossy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Suite {
  const char* name;
  double threshold;
  // Returns the residual of one case; exceptions count as +inf.
  std::function<double(Rng&, int)> run_case;
};

double rate_identity_case(Rng& rng, int k) {
  const AlignedInstance inst = random_aligned(1 + k % 6, rng);
  const RateBound r = rate_lower_bound(inst.model, DistortionConstraint(inst.model, inst.d));
  return std::abs(r.nats - r.via_f) / std::max(1.0, std::abs(r.nats));
}

double equivalence_case(Rng& rng, int k) {
  const AlignedInstance inst = random_aligned(1 + k % 6, rng);
  const DistortionConstraint d(inst.model, inst.d);
  const Matrix root = psd_sqrt(f_of_d(inst.model, d)).mat();
  double disagreements = 0.0;
  for (int j = 0; j < 10; ++j) {
    const SymMatrix k_xv(root * random_spd(inst.model.dim(), rng, 0.5, 1.5).mat() * root);
    const Lemma4Sides s = lemma4_sides(k_xv, inst.model, d);
    disagreements += s.conditional_below_d != s.kxv_below_f ? 1.0 : 0.0;
  }
  return disagreements;
}

double certificate_case(Rng& rng, int k) {
  const AlignedInstance inst = random_aligned(1 + k % 4, rng);
  const DistortionConstraint d(inst.model, inst.d);
  const LeakageSolution sol = minimize_leakage(inst.model, d);
  const EnhancedChannel e = enhance(inst.model, d, sol);
  double r = std::max(sol.certificate.max_residual(), std::abs(sol.value - closed_form_lbar(inst.model, d, e)));
  for (const auto& [name, value] : e.property_report) {
    r = std::max(r, value);
  }
  return sol.converged ? r : kInf;
}

double gradient_case(Rng& rng, int k) {
  const SymMatrix k_x = random_spd(1 + k % 6, rng);
  AlignedModel m(k_x, random_spd(k_x.dim(), rng), random_spd(k_x.dim(), rng));
  return gradient_selfcheck(m, random_chain_pair(k_x, rng));
}

double realization_case(Rng& rng, int k) {
  const SymMatrix k_x = random_spd(1 + k % 6, rng);
  const AuxiliaryPair pair = random_chain_pair(k_x, rng);
  const GaussianAuxRealization r = construct(k_x, pair);
  const AuxiliaryPair back = verify_conditional_covariances(k_x, r);
  const Eigen::Index n = k_x.dim();
  const SymMatrix noise(Matrix::Identity(n, n) - r.a_uv * r.a_uv.transpose());
  if (min_eigenvalue(noise) < -1e-12) {
    return kInf;
  }
  return std::max({(back.k_xv - pair.k_xv).norm() / pair.k_xv.norm(), (back.k_xu - pair.k_xu).norm() / pair.k_xu.norm(),
                   (r.a_uv * r.a_v - r.a_u).norm() / std::max(1.0, r.a_u.norm()), verify_markov(k_x, r)});
}

double general_case(Rng& rng, int k) {
  const Eigen::Index n = 1 + k % 4;
  const GeneralInstance inst = random_general(n, rng);
  const LimitReport rep = limit_checks(inst.model, inst.d, default_alpha_grid());
  if (rep.rows.empty() || rep.rows.back().alpha > 1e-6 || !rep.leakage_ordering || rep.slope_kxy < 0.9 ||
      rep.slope_f < 0.9) {
    return kInf;
  }
  double r = std::max(rep.rows.back().kxy_residual, rep.rows.back().f_residual);

  // identity gains against the aligned solver with unit noise
  const SymMatrix k_x = random_spd(n, rng, 0.2, 1.0);
  const Matrix eye = Matrix::Identity(n, n);
  const GeneralModel g(k_x, eye, eye);
  const AlignedModel a(k_x, SymMatrix::identity(n), SymMatrix::identity(n));
  const Matrix root = psd_sqrt(cond_cov_xy(a)).mat();
  const SymMatrix d(root * random_spd(n, rng, 0.1, 0.9).mat() * root);
  const GeneralBounds gb = general_bounds(g, d);
  const LeakageSolution sol = minimize_leakage(a, DistortionConstraint(a, d));
  const double rate = rate_lower_bound(a, DistortionConstraint(a, d)).nats;
  r = std::max({r, std::abs(gb.ie_min - sol.value), std::abs(gb.r_min - rate)});
  return gb.converged && sol.converged ? r : kInf;
}

// Residual is how far the smallest strict gap falls short of 1e-5.
double gap_case(Rng& rng, int k) {
  std::uniform_real_distribution<double> unif(0.2, 3.0);
  std::uniform_real_distribution<double> frac(0.05, 0.95);
  auto channel = [&](bool y_better) {
    ScalarChannel c{unif(rng), unif(rng), unif(rng), 0.0};
    if ((c.sigy2 < c.sigz2) != y_better) {
      std::swap(c.sigy2, c.sigz2);
    }
    if (c.sigy2 == c.sigz2) {
      c.sigz2 *= y_better ? 1.5 : 0.5;
    }
    c.d = frac(rng) * c.cond_var();
    return c;
  };
  double margin = kInf;
  if (k % 2 == 0) {
    const ScalarChannel c = channel(true);
    margin = scalar_ie_ins(c) - scalar_ie_min(c);
  } else {
    const ParallelModel p{channel(true), channel(false)};
    const double base = parallel_ie_min(p).total;
    margin = std::min(parallel_ie_min_phi(p).total - base, parallel_ie_min_s(p).total - base);
  }
  return std::max(0.0, 1e-5 - margin);
}

}  // namespace

std::vector<SuiteResult> run_verification(std::uint64_t seed, int trials, std::optional<double> tol) {
  const std::vector<Suite> suites{
      {"rate_identity", 1e-9, rate_identity_case},
      {"distortion_equivalence", 0.0, equivalence_case},
      {"solver_certificate", 1e-6, certificate_case},
      {"gradient_check", 1e-5, gradient_case},
      {"aux_realization", 1e-8, realization_case},
      {"general_limits", 1e-6, general_case},
      {"example_gaps", 1e-12, gap_case},
  };
  std::vector<SuiteResult> out;
  for (std::size_t s = 0; s < suites.size(); ++s) {
    const Suite& suite = suites[s];
    Rng rng(seed + 1000003ULL * s);
    SuiteResult r;
    r.name = suite.name;
    r.threshold = tol.value_or(suite.threshold);
    // general limits solve two problems per case; a fifth of the trials keeps the budget
    const int cases = s == 5 ? std::max(1, trials / 5) : trials;
    for (int k = 0; k < cases; ++k) {
      double res = kInf;
      try {
        res = suite.run_case(rng, k);
      } catch (const Error&) {
      }
      r.max_residual = std::max(r.max_residual, std::isnan(res) ? kInf : res);
      ++r.cases;
    }
    r.passed = r.max_residual <= r.threshold;
    out.push_back(r);
  }
  return out;
}

}  // namespace seclossy
