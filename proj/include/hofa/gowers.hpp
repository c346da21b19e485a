#ifndef HOFA_GOWERS_HPP
#define HOFA_GOWERS_HPP

#include <cstdint>

#include "hofa/table.hpp"

namespace hofa {

struct GowersEstimate {
  double value = 0.0;      // the norm itself, pre-root mean clamped at 0
  double pre_root = 0.0;   // raw mean of the derivative product (can dip below 0 in mc)
  int order = 1;
  bool exact = true;
  std::uint64_t samples = 0;  // mc only
  double half_width = 0.0;    // 99% normal-approximation interval on the pre-root mean
};

// Uniformity norm of order d over all (x, y_1..y_d), computed exactly via the
// directional-derivative recursion; agrees with the defining expectation to
// floating-point accuracy. Cost is gated as p^{n(d+1)} elementary products.
GowersEstimate gowers_norm_exact(const FunctionTable& f, int d,
                                 std::uint64_t op_budget = kDefaultOpBudget,
                                 int threads = 1);

// Monte Carlo estimate averaging the derivative product over sampled
// (x, y_1..y_d) tuples; draws are pinned by (seed, sample index).
GowersEstimate gowers_norm_mc(const FunctionTable& f, int d, std::uint64_t samples,
                              std::uint64_t seed);

}  // namespace hofa

#endif
