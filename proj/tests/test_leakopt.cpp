#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "seclossy/enhance.hpp"
#include "seclossy/errors.hpp"
#include "seclossy/examples.hpp"
#include "seclossy/sampling.hpp"

using namespace seclossy;

namespace {

SymMatrix sc(double v) { return SymMatrix::scalar(v); }

// Pair with K_{X|V} below both K_{X|U} and F, through the parallel sum of the two caps.
AuxiliaryPair random_feasible_pair(const AlignedModel& m, const SymMatrix& f, Rng& rng) {
  const AuxiliaryPair chain = random_chain_pair(m.k_x(), rng);
  const Matrix par = oracle::inv(oracle::inv(chain.k_xu.mat()) + oracle::inv(f.mat()));
  const Matrix root = psd_sqrt(SymMatrix(par)).mat();
  return {SymMatrix(root * random_spd(m.dim(), rng, 0.05, 0.99).mat() * root), chain.k_xu};
}

}  // namespace

TEST_CASE("scalar optimum against the dense grid") {
  const AlignedModel m(sc(1.0), sc(0.5), sc(1.0));
  const DistortionConstraint d(m, sc(0.25));
  const LeakageSolution sol = minimize_leakage(m, d);
  const oracle::GridMin g = oracle::scalar_grid(1.0, 0.5, 1.0, 0.25, 400);
  CHECK(sol.converged);
  CHECK(std::abs(sol.value - g.value) < 2e-3);
  // the grid hits the boundary optimum exactly; the barrier stops inside it
  CHECK(sol.value <= g.value + 1e-8);
  CHECK(std::abs(sol.value - 0.5 * std::log(8.0 / 3.0)) < 1e-8);
  CHECK(sol.pair.k_xv(0, 0) == doctest::Approx(g.s_v).epsilon(2e-3));
  CHECK(sol.pair.k_xu(0, 0) == doctest::Approx(g.s_u).epsilon(2e-3));
  CHECK(sol.value == doctest::Approx(leakage_objective(m, sol.pair)).epsilon(1e-10));
  CHECK(certify(m, d, sol, 1e-6));
}

TEST_CASE("scalar_grid_oracle") {
  const ScalarGridResult r = scalar_grid_oracle(1.0, 0.5, 1.0, 0.25, 400);
  const oracle::GridMin g = oracle::scalar_grid(1.0, 0.5, 1.0, 0.25, 400);
  CHECK(std::abs(r.value - g.value) < 2e-3);
  CHECK(r.s_v == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(r.s_u == doctest::Approx(1.0).epsilon(1e-9));

  // no binding constraint at d = cond var
  const ScalarGridResult top = scalar_grid_oracle(1.0, 0.5, 1.0, 1.0 / 3.0, 400);
  CHECK(top.value == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-9));
  CHECK(top.s_v == doctest::Approx(1.0));

  // equal noises: the value only depends on s_v
  const ScalarGridResult eq = scalar_grid_oracle(1.0, 0.7, 0.7, 0.2, 400);
  const double f = 0.7 * 0.2 / 0.5;
  const double one_d = oracle::grid_1d(
      [](double s) { return 0.5 * std::log(1.0 / s) + 0.5 * std::log((s + 0.7) / 0.7); }, f, 4000);
  CHECK(std::abs(eq.value - one_d) < 1e-3);
  CHECK_THROWS_AS(scalar_grid_oracle(1.0, 0.5, 1.0, 0.5, 10), InfeasibleDistortion);
}

TEST_CASE("equal noises, D at the rate-zero point") {
  const AlignedModel m(2.0 * SymMatrix::identity(2), SymMatrix::identity(2), SymMatrix::identity(2));
  const DistortionConstraint d(m, cond_cov_xy(m));
  const LeakageSolution sol = minimize_leakage(m, d);
  // 1-D oracle over V = sI with F = K_X = 2I
  const double grid = oracle::grid_1d(
      [](double s) { return 2.0 * (0.5 * std::log(2.0 / s) + 0.5 * std::log(s + 1.0)); }, 2.0, 4000);
  CHECK(std::abs(sol.value - grid) < 1e-6);
  CHECK(sol.value == doctest::Approx(std::log(3.0)).epsilon(1e-8));
}

TEST_CASE("parallel instance against per-subchannel grids") {
  const ParallelModel p = example2_default();
  const AlignedModel m = parallel_as_aligned(p);
  const DistortionConstraint d(m, parallel_distortion(p));
  const LeakageSolution sol = minimize_leakage(m, d);
  const double grid = oracle::scalar_grid(1.0, 0.5, 1.0, 0.25, 400).value +
                      oracle::scalar_grid(1.0, 1.0, 0.5, 0.25, 400).value;
  CHECK(std::abs(sol.value - grid) < 4e-3);
  CHECK(sol.value == doctest::Approx(1.29513).epsilon(1e-5));
}

TEST_CASE("recover_multipliers") {
  SUBCASE("scalar optimum matches closed-form multipliers") {
    const AlignedModel m(sc(1.0), sc(0.5), sc(1.0));
    const DistortionConstraint d(m, sc(0.25));
    const KktCertificate c = recover_multipliers(m, d, {sc(0.5), sc(1.0)});
    // V = F active with M_U = 0: M_D = 1/V - 1/(V + s_y), M_X = 1/(U + s_y) - 1/(U + s_z)
    CHECK(c.m_u(0, 0) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(c.m_d(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(c.m_x(0, 0) == doctest::Approx(1.0 / 1.5 - 0.5).epsilon(1e-6));
    CHECK(c.max_residual() < 1e-6);
    CHECK(c.residuals.size() == 5);
    for (const char* key : {"stationarity_v", "stationarity_u", "slack_uv", "slack_d", "slack_x"}) {
      CHECK(c.residuals.count(key) == 1);
    }
  }
  SUBCASE("equal noises with K_{X|U} interior") {
    Rng rng(21);
    const SymMatrix s = random_spd(3, rng);
    const AlignedModel m(random_spd(3, rng), s, s);
    const DistortionConstraint d(m, 0.5 * cond_cov_xy(m));
    const SymMatrix f = f_of_d(m, d);
    const SymMatrix u = 0.5 * (f + m.k_x());
    const KktCertificate c = recover_multipliers(m, d, {f, u});
    const Matrix md = oracle::inv(f.mat()) - oracle::inv(f.mat() + s.mat());
    CHECK(c.m_u.norm() < 1e-6);
    CHECK(c.m_x.norm() < 1e-6);
    CHECK(oracle::rel(c.m_d.mat(), md) < 1e-6);
    CHECK(c.max_residual() < 1e-6);
  }
  SUBCASE("interior non-optimal pair leaves stationarity unresolved") {
    Rng rng(22);
    const AlignedInstance inst = random_aligned(3, rng);
    const DistortionConstraint d(inst.model, inst.d);
    const SymMatrix f = f_of_d(inst.model, d);
    const AuxiliaryPair p{0.3 * f, 0.5 * (f + inst.model.k_x())};
    const KktCertificate c = recover_multipliers(inst.model, d, p);
    const ObjectiveGradient g = objective_gradient(inst.model, p);
    CHECK(c.residuals.at("stationarity_v") > 1e-3);
    CHECK(g.grad_v.norm() > 1e-3);
  }
}

TEST_CASE("kkt_residuals") {
  const AlignedModel m(sc(1.0), sc(0.5), sc(1.0));
  const DistortionConstraint d(m, sc(0.25));
  const auto r = kkt_residuals(m, d, {sc(0.5), sc(1.0)}, sc(0.0), sc(1.0), sc(1.0 / 6.0));
  for (const auto& [k, v] : r) {
    CHECK_MESSAGE(v < 1e-12, k);
  }
  const auto bad = kkt_residuals(m, d, {sc(0.5), sc(1.0)}, sc(0.0), sc(0.5), sc(1.0 / 6.0));
  CHECK(bad.at("stationarity_v") > 0.1);
}

TEST_CASE("certify") {
  const AlignedModel m(sc(1.0), sc(0.5), sc(1.0));
  const DistortionConstraint d(m, sc(0.25));
  const LeakageSolution sol = minimize_leakage(m, d);
  CHECK(certify(m, d, sol, 1e-6));

  LeakageSolution moved = sol;
  moved.pair.k_xv = sc(0.45);
  moved.value = leakage_objective(m, moved.pair);
  moved.certificate = recover_multipliers(m, d, moved.pair);
  CHECK(moved.value > sol.value);
  CHECK_FALSE(certify(m, d, moved, 1e-6));

  LeakageSolution infeasible = sol;
  infeasible.pair.k_xv = sc(0.6);
  CHECK_FALSE(certify(m, d, infeasible, 1e-6));
}

TEST_CASE("gradient_selfcheck") {
  const AlignedModel m(sc(1.0), sc(0.5), sc(1.0));
  CHECK(gradient_selfcheck(m, {sc(0.3), sc(0.7)}) < 1e-6);
  Rng rng(23);
  const AlignedModel m3(random_spd(3, rng), random_spd(3, rng), random_spd(3, rng));
  CHECK(gradient_selfcheck(m3, random_chain_pair(m3.k_x(), rng)) < 1e-5);
  // ill-conditioned: reported, finite
  const AlignedModel ill(SymMatrix::diagonal((Vector(2) << 1.0, 1e-8).finished()), SymMatrix::identity(2),
                         SymMatrix::identity(2));
  CHECK(std::isfinite(gradient_selfcheck(ill, {0.5 * ill.k_x(), 0.8 * ill.k_x()})));
}

TEST_CASE("solver properties on random instances") {
  Rng rng(24);
  for (int k = 0; k < 8; ++k) {
    const Eigen::Index n = 1 + k % 3;
    const AlignedInstance inst = random_aligned(n, rng);
    const DistortionConstraint d(inst.model, inst.d);
    const LeakageSolution sol = minimize_leakage(inst.model, d);
    CHECK(sol.converged);
    CHECK(pair_feasible(inst.model, d, sol.pair, 1e-9));
    const SymMatrix f = f_of_d(inst.model, d);
    for (int s = 0; s < 100; ++s) {
      const AuxiliaryPair p = random_feasible_pair(inst.model, f, rng);
      const Matrix &kx = inst.model.k_x().mat(), &sy = inst.model.sigma_y().mat(), &sz = inst.model.sigma_z().mat();
      CHECK(sol.value <= oracle::leakage(kx, sy, sz, p.k_xv.mat(), p.k_xu.mat()) + 1e-9);
    }
  }
}

TEST_CASE("degraded and reverse-degraded closed forms") {
  Rng rng(25);
  for (int k = 0; k < 6; ++k) {
    const Eigen::Index n = 1 + k % 3;
    const SymMatrix kx = random_spd(n, rng);
    const SymMatrix a = random_spd(n, rng, 0.2, 1.0);
    const SymMatrix b = a + random_spd(n, rng, 0.1, 1.0);
    const bool degraded = k % 2 == 0;
    const AlignedModel m(kx, degraded ? a : b, degraded ? b : a);
    const Matrix root = psd_sqrt(cond_cov_xy(m)).mat();
    const DistortionConstraint d(m, SymMatrix(root * random_spd(n, rng, 0.1, 0.9).mat() * root));
    const Matrix& s = m.sigma_y().mat();
    const Matrix f = s * oracle::inv(s - d.d().mat()) * s - s;
    const Matrix &kxm = kx.mat(), &sz = m.sigma_z().mat();
    // U = phi when Y is the better channel, U = V otherwise; V = F in both
    const double expected = degraded ? oracle::leakage(kxm, s, sz, f, kxm) : oracle::leakage(kxm, s, sz, f, f);
    const LeakageSolution sol = minimize_leakage(m, d);
    CHECK(std::abs(sol.value - expected) < 1e-6);
  }
}

TEST_CASE("determinism and scaling") {
  Rng rng(26);
  const AlignedInstance inst = random_aligned(3, rng);
  const DistortionConstraint d(inst.model, inst.d);
  const LeakageSolution a = minimize_leakage(inst.model, d);
  const LeakageSolution b = minimize_leakage(inst.model, d);
  CHECK(a.value == b.value);
  CHECK(a.pair.k_xv.mat() == b.pair.k_xv.mat());
  CHECK(a.pair.k_xu.mat() == b.pair.k_xu.mat());
  CHECK(a.certificate.m_d.mat() == b.certificate.m_d.mat());

  const double c = 3.7;
  const AlignedModel scaled(c * inst.model.k_x(), c * inst.model.sigma_y(), c * inst.model.sigma_z());
  const LeakageSolution s = minimize_leakage(scaled, DistortionConstraint(scaled, c * inst.d));
  CHECK(std::abs(s.value - a.value) < 1e-6);
  CHECK(oracle::rel(s.pair.k_xv.mat(), c * a.pair.k_xv.mat()) < 1e-4);
}

TEST_CASE("solver input errors") {
  const AlignedModel m(sc(1.0), sc(0.5), sc(1.0));
  SolverOptions bad;
  bad.restarts = 0;
  CHECK_THROWS_AS(minimize_leakage(m, DistortionConstraint(m, sc(0.25)), bad), ConfigError);
  bad = SolverOptions{};
  bad.tol_feas = 0.0;
  CHECK_THROWS_AS(minimize_leakage(m, DistortionConstraint(m, sc(0.25)), bad), ConfigError);
  CHECK_THROWS_AS(minimize_leakage(m, DistortionConstraint(m, sc(0.0))), InfeasibleDistortion);
}
