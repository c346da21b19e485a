#ifndef HOFA_COMMON_HPP
#define HOFA_COMMON_HPP

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace hofa {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Input dimensions or kinds do not line up (mismatched p, n, table sizes, ...).
class DimensionError : public Error {
public:
  using Error::Error;
};

// An enumeration or exact computation would exceed the caller's budget.
// `required` is the smallest budget that would let the call proceed.
class BudgetError : public Error {
public:
  BudgetError(const std::string& what, std::uint64_t required_budget)
      : Error(what), required(required_budget) {}
  std::uint64_t required;
};

class ParseError : public Error {
public:
  using Error::Error;
};

// Table-to-polynomial fitting only handles functions vanishing at 0.
class ShiftError : public Error {
public:
  using Error::Error;
};

class QueryCapError : public Error {
public:
  using Error::Error;
};

// Default step budget for exact expectations and exhaustive searches.
inline constexpr std::uint64_t kDefaultOpBudget = 100'000'000ULL;
// Default cap on dense table cells (p^n).
inline constexpr std::uint64_t kDefaultCellBudget = 1ULL << 22;

// base^exp, saturating at UINT64_MAX instead of wrapping.
std::uint64_t pow_u64(std::uint64_t base, unsigned exp);

// a*b, saturating at UINT64_MAX.
std::uint64_t mul_sat_u64(std::uint64_t a, std::uint64_t b);

// Deterministic cross-platform generator (splitmix64). One master seed plus a
// trial index pins every draw, independent of evaluation order elsewhere.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  static Rng for_trial(std::uint64_t master_seed, std::uint64_t trial);

  std::uint64_t next_u64();
  // Uniform in [0, n), unbiased via rejection. n must be positive.
  std::uint64_t below(std::uint64_t n);
  // Uniform double in [0, 1) with 53 random bits.
  double unit();

private:
  std::uint64_t state_;
};

// 64-bit FNV-1a, used for input digests in reports.
std::uint64_t fnv1a64(const void* data, std::size_t len);
std::string fnv1a64_hex(const std::string& bytes);

// Static chunked parallel map; with threads <= 1 runs inline. Work items must
// write to disjoint slots so the result is independent of the thread count.
void parallel_for(std::uint64_t count, int threads,
                  const std::function<void(std::uint64_t)>& fn);

}  // namespace hofa

#endif
