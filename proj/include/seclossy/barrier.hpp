#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "seclossy/matkernel.hpp"

namespace seclossy {

/// coef * logdet(offset + sum_j sign[j] * map[j] X_j map[j]^T), with X_0 the
/// first chain variable and X_1 the second. A zero sign drops the variable.
struct LogDetTerm {
  double coef = 0.0;
  Matrix offset;
  std::array<double, 2> sign{0.0, 0.0};
  std::array<Matrix, 2> map;
};

/// Minimize constant + sum(terms) over 0 < X_0 <= X_1 <= upper, X_0 <= cap.
struct ChainProblem {
  std::vector<LogDetTerm> terms;
  double constant = 0.0;
  SymMatrix upper;
  SymMatrix cap;
};

struct BarrierOptions {
  double t_init = 1e-1;
  double t_final = 1e-9;
  double t_factor = 0.1;
  int max_newton = 60;
  double tol_decrement = 1e-13;
  double step_init = 1.0;
};

struct BarrierResult {
  SymMatrix x0;
  SymMatrix x1;
  double value = 0.0;
  // Dual estimates 2t S^{-1} for the three order constraints.
  SymMatrix m_chain;  // X_0 <= X_1
  SymMatrix m_cap;    // X_0 <= cap
  SymMatrix m_upper;  // X_1 <= upper
  bool converged = false;
  int iterations = 0;
};

/// Value of constant + sum(terms); +infinity outside the domain of any log.
double chain_objective(const ChainProblem& p, const SymMatrix& x0, const SymMatrix& x1);

/// Gradients of constant + sum(terms) with respect to X_0 and X_1.
std::array<SymMatrix, 2> chain_gradient(const ChainProblem& p, const SymMatrix& x0, const SymMatrix& x1);

/// Strictly feasible point pulled a fixed fraction toward the chain's analytic center.
std::array<SymMatrix, 2> chain_center(const ChainProblem& p);

/// Deterministic list of strictly feasible starting points.
std::vector<std::array<SymMatrix, 2>> chain_starts(const ChainProblem& p, int count, std::uint64_t seed);

BarrierResult solve_chain(const ChainProblem& p, const SymMatrix& x0, const SymMatrix& x1,
                          const BarrierOptions& opts);

}  // namespace seclossy
