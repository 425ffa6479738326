#pragma once

#include <cstdint>
#include <random>

#include "seclossy/genmodel.hpp"

namespace seclossy {

using Rng = std::mt19937_64;

/// Q diag(e) Q^T with Haar-like Q and eigenvalues uniform in [lo, hi].
SymMatrix random_spd(Eigen::Index n, Rng& rng, double lo = 0.2, double hi = 3.0);

/// Gaussian entries scaled so the spectral norm equals `norm`.
Matrix random_gain(Eigen::Index rows, Eigen::Index cols, Rng& rng, double norm);

struct AlignedInstance {
  AlignedModel model;
  SymMatrix d;
};

/// Random model of dimension n with D = K_{X|Y}^{1/2} W K_{X|Y}^{1/2}, eig(W) in [lo, hi].
AlignedInstance random_aligned(Eigen::Index n, Rng& rng, double lo = 0.05, double hi = 0.95);

struct GeneralInstance {
  GeneralModel model;
  SymMatrix d;
};

/// K_X with eigenvalues in [0.2, 1], gains of spectral norm at most 0.5 with
/// 1..n+1 rows, and D = c K_{X|Y} with c in [0.3, 0.8].
GeneralInstance random_general(Eigen::Index n, Rng& rng);

/// Strictly ordered 0 < K_{X|V} < K_{X|U} < K_X built by congruence.
AuxiliaryPair random_chain_pair(const SymMatrix& k_x, Rng& rng);

}  // namespace seclossy
