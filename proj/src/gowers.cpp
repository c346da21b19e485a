#include "hofa/gowers.hpp"

#include <cmath>

namespace hofa {

namespace {

using CVec = std::vector<std::complex<double>>;

std::complex<double> mean(const CVec& v) {
  std::complex<double> s = 0.0;
  for (const auto& x : v) s += x;
  return s / static_cast<double>(v.size());
}

// E_{x, y_1..y_d} of the iterated multiplicative derivative, via
//   G_1(f) = |E f|^2,   G_d(f) = E_h G_{d-1}(f(.+h) conj f).
double pre_root_mean(const Domain& dom, const CVec& v, int d) {
  if (d == 1) {
    const auto m = mean(v);
    return std::norm(m);
  }
  double acc = 0.0;
  CVec diff(v.size());
  for (std::uint64_t h = 0; h < dom.size(); ++h) {
    for (std::uint64_t x = 0; x < dom.size(); ++x)
      diff[x] = v[dom.add(x, h)] * std::conj(v[x]);
    acc += pre_root_mean(dom, diff, d - 1);
  }
  return acc / static_cast<double>(dom.size());
}

double root_pow2(double x, int d) {
  // x^(1/2^d) with clamping of tiny negatives from cancellation.
  if (x <= 0.0) return 0.0;
  return std::pow(x, 1.0 / static_cast<double>(1ULL << d));
}

}  // namespace

GowersEstimate gowers_norm_exact(const FunctionTable& f, int d, std::uint64_t op_budget,
                                 int threads) {
  if (d < 1) throw DimensionError("uniformity norm order must be >= 1");
  const Domain& dom = f.dom();
  const std::uint64_t cost = pow_u64(dom.size(), static_cast<unsigned>(d + 1));
  if (cost > op_budget)
    throw BudgetError("exact order-" + std::to_string(d) + " norm needs " +
                          std::to_string(cost) +
                          " products; use the sampling estimator instead",
                      cost);
  const CVec v = f.to_complex();

  GowersEstimate est;
  est.order = d;
  est.exact = true;
  if (d == 1 || threads <= 1) {
    est.pre_root = pre_root_mean(dom, v, d);
  } else {
    // Split over the top-level direction; partial results land in fixed slots
    // and are reduced in index order, so the sum is thread-count-invariant.
    std::vector<double> parts(dom.size());
    parallel_for(dom.size(), threads, [&](std::uint64_t h) {
      CVec diff(v.size());
      for (std::uint64_t x = 0; x < dom.size(); ++x)
        diff[x] = v[dom.add(x, h)] * std::conj(v[x]);
      parts[h] = pre_root_mean(dom, diff, d - 1);
    });
    double acc = 0.0;
    for (double p : parts) acc += p;
    est.pre_root = acc / static_cast<double>(dom.size());
  }
  est.value = root_pow2(est.pre_root, d);
  return est;
}

GowersEstimate gowers_norm_mc(const FunctionTable& f, int d, std::uint64_t samples,
                              std::uint64_t seed) {
  if (d < 1) throw DimensionError("uniformity norm order must be >= 1");
  if (samples == 0) throw DimensionError("sample count must be positive");
  const Domain& dom = f.dom();
  const CVec v = f.to_complex();
  const unsigned folds = 1u << d;

  double sum = 0.0, sum_sq = 0.0;
  std::vector<std::uint64_t> ys(static_cast<std::size_t>(d));
  for (std::uint64_t s = 0; s < samples; ++s) {
    Rng rng = Rng::for_trial(seed, s);
    const std::uint64_t x = rng.below(dom.size());
    for (int i = 0; i < d; ++i) ys[static_cast<std::size_t>(i)] = rng.below(dom.size());
    std::complex<double> prod = 1.0;
    for (unsigned mask = 0; mask < folds; ++mask) {
      std::uint64_t pt = x;
      int bits = 0;
      for (int i = 0; i < d; ++i)
        if (mask >> i & 1u) {
          pt = dom.add(pt, ys[static_cast<std::size_t>(i)]);
          ++bits;
        }
      prod *= bits % 2 == 0 ? v[pt] : std::conj(v[pt]);
    }
    // The expectation is real; average the real part.
    sum += prod.real();
    sum_sq += prod.real() * prod.real();
  }
  const double n = static_cast<double>(samples);
  GowersEstimate est;
  est.order = d;
  est.exact = false;
  est.samples = samples;
  est.pre_root = sum / n;
  const double var = samples > 1 ? (sum_sq - sum * sum / n) / (n - 1.0) : 0.0;
  est.half_width = 2.5758293035489004 * std::sqrt(var > 0 ? var / n : 0.0);
  est.value = root_pow2(est.pre_root, d);
  return est;
}

}  // namespace hofa
