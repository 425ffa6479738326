#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "seclossy/barrier.hpp"
#include "seclossy/model.hpp"

namespace seclossy {

struct SolverOptions {
  int max_iters = 60;        // Newton iterations per barrier stage
  double step_init = 1.0;    // first trial step of the line search
  double tol_grad = 1e-13;   // stop when half the squared Newton decrement falls below this
  double tol_feas = 1e-9;    // cone tolerance for the returned pair
  int restarts = 8;
  std::uint64_t seed = 20240611;
  double barrier_init = 1e-1;
  double barrier_final = 1e-9;
};

/// Multipliers for the order constraints K_{X|V} <= K_{X|U}, K_{X|V} <= F(D)
/// and K_{X|U} <= K_X. Stationarity residuals are relative to ||K_{X|V}^{-1}||;
/// slackness residuals are ||M S|| and need no scaling.
struct KktCertificate {
  SymMatrix m_u;
  SymMatrix m_d;
  SymMatrix m_x;
  std::map<std::string, double> residuals;

  double max_residual() const;
};

struct LeakageSolution {
  AuxiliaryPair pair;
  double value = 0.0;
  KktCertificate certificate;
  bool converged = false;
  int iterations = 0;
};

/// Chain problem whose objective is leakage_objective for the model.
ChainProblem leakage_problem(const AlignedModel& m, const DistortionConstraint& d);

/// Minimum of the leakage objective over the chain. Multi-start barrier
/// Newton; the lowest value across starts wins, earliest start on ties.
LeakageSolution minimize_leakage(const AlignedModel& m, const DistortionConstraint& d,
                                 const SolverOptions& opts = {});

/// Least-squares PSD multipliers for the stationarity and slackness system.
/// A warm start, when given, competes with the internal initial guess.
KktCertificate recover_multipliers(const AlignedModel& m, const DistortionConstraint& d,
                                   const AuxiliaryPair& pair,
                                   const std::optional<KktCertificate>& warm = std::nullopt);

/// Residuals of the five conditions for fixed multipliers.
std::map<std::string, double> kkt_residuals(const AlignedModel& m, const DistortionConstraint& d,
                                            const AuxiliaryPair& pair, const SymMatrix& m_u,
                                            const SymMatrix& m_d, const SymMatrix& m_x);

/// Feasible pair, every KKT residual below tol, and |value - L-bar| below tol.
bool certify(const AlignedModel& m, const DistortionConstraint& d, const LeakageSolution& sol, double tol);

/// Largest gap between the analytic gradient and central differences,
/// relative to the largest gradient entry.
double gradient_selfcheck(const AlignedModel& m, const AuxiliaryPair& pair);

struct ScalarGridResult {
  double s_v = 0.0;
  double s_u = 0.0;
  double value = 0.0;
};

/// Exhaustive scalar search over log-spaced s_u in (0, sigx2] and
/// s_v in (0, min(f(d), s_u)], grid_n points per axis, both upper ends included.
ScalarGridResult scalar_grid_oracle(double sigx2, double sigy2, double sigz2, double d, int grid_n);

}  // namespace seclossy
