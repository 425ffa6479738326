#pragma once

#include <string>
#include <vector>

#include "seclossy/model.hpp"

namespace seclossy {

/// Scalar source X ~ N(0, sigx2), Y = X + N(0, sigy2), Z = X + N(0, sigz2),
/// mean-square distortion d with 0 < d <= sigx2 sigy2 / (sigx2 + sigy2).
struct ScalarChannel {
  double sigx2 = 1.0;
  double sigy2 = 1.0;
  double sigz2 = 1.0;
  double d = 0.25;

  double cond_var() const { return sigx2 * sigy2 / (sigx2 + sigy2); }
  /// sigy2 d / (sigy2 - d)
  double f() const;
  void validate() const;
};

/// Two independent scalar subchannels. The first is degraded toward the
/// eavesdropper (sigy2 < sigz2), the second toward the legitimate user.
struct ParallelModel {
  ScalarChannel sub1;
  ScalarChannel sub2;

  void validate() const;
};

struct ParallelValue {
  double total = 0.0;
  double term1 = 0.0;
  double term2 = 0.0;
};

/// min I(V;X) - I(V;Y) + I(X;Z) over Gaussian V, attained at s_v = f(d).
double scalar_ie_min(const ScalarChannel& c);

/// min I(V;X) - I(V;Z) + I(X;Z) subject to the decoder distortion, at s_v = f(d).
double scalar_ie_ins(const ScalarChannel& c);

/// Minimum leakage of the parallel model: U = phi on sub1, U = V on sub2.
ParallelValue parallel_ie_min(const ParallelModel& p);

/// Same with U = phi forced on both subchannels.
ParallelValue parallel_ie_min_phi(const ParallelModel& p);

/// Same with U = V forced on both subchannels.
ParallelValue parallel_ie_min_s(const ParallelModel& p);

/// Diagonal 2x2 aligned model and distortion of a parallel model.
AlignedModel parallel_as_aligned(const ParallelModel& p);
SymMatrix parallel_distortion(const ParallelModel& p);

ScalarChannel example1_default();
ParallelModel example2_default();

/// Valid names for preset lookups: "example1-default", "example2-default".
std::vector<std::string> preset_names();

}  // namespace seclossy
