#include "hofa/factor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <unordered_map>

#include "hofa/gowers.hpp"

namespace hofa {

namespace {

constexpr double kDecompTol = 1e-12;

}  // namespace

std::string label_str(const AtomLabel& label) {
  std::string out = "(";
  for (std::size_t i = 0; i < label.size(); ++i) {
    if (i) out += ", ";
    out += label[i].str();
  }
  out += ")";
  return out;
}

PolyFactor::PolyFactor(int p, int n)
    : p_(p), n_(n), dom_(p, n), codes_(dom_.size(), 0), order_(1) {}

PolyFactor::PolyFactor(std::vector<NcPolynomial> polys, std::uint64_t cell_budget)
    : p_(0), n_(0), dom_(2, 1), polys_(std::move(polys)), order_(1) {
  if (polys_.empty()) throw DimensionError("factor needs at least one polynomial; use the trivial constructor");
  p_ = polys_.front().p();
  n_ = polys_.front().n();
  dom_ = Domain(p_, n_);
  dom_.check_cells(cell_budget);
  for (const auto& P : polys_) {
    if (P.p() != p_ || P.n() != n_) throw DimensionError("factor polynomials disagree on p or n");
    degrees_.push_back(P.degree());
    depths_.push_back(P.depth());
    radices_.push_back(pow_u64(static_cast<std::uint64_t>(p_),
                               static_cast<unsigned>(depths_.back() + 1)));
    order_ = mul_sat_u64(order_, radices_.back());
  }
  if (order_ > (1ULL << 62))
    throw BudgetError("factor order exceeds the representable code range", order_);
  codes_.assign(dom_.size(), 0);
  std::uint64_t stride = 1;
  for (std::size_t i = 0; i < polys_.size(); ++i) {
    const auto tab = polys_[i].evaluate_table(cell_budget);
    for (std::uint64_t x = 0; x < dom_.size(); ++x)
      codes_[x] += stride * static_cast<std::uint64_t>(tab[x].code(depths_[i] + 1));
    stride *= radices_[i];
  }
}

AtomLabel PolyFactor::atom_of(std::span<const std::uint8_t> x) const {
  AtomLabel label;
  label.reserve(polys_.size());
  for (const auto& P : polys_) label.push_back(P.evaluate(x));
  return label;
}

AtomLabel PolyFactor::label_of_code(std::uint64_t code) const {
  AtomLabel label;
  label.reserve(polys_.size());
  for (std::size_t i = 0; i < polys_.size(); ++i) {
    label.push_back(TorusValue::from_code(p_, static_cast<std::int64_t>(code % radices_[i]),
                                          depths_[i] + 1));
    code /= radices_[i];
  }
  if (code != 0) throw DimensionError("atom code out of range");
  return label;
}

namespace {

// Per-atom accumulator. Atoms whose values all coincide return that value
// unrounded, which makes averaging idempotent bit for bit.
template <class V>
struct AtomAcc {
  V sum{};
  V first{};
  std::uint64_t count = 0;
  bool uniform = true;

  void add(const V& v) {
    if (count == 0)
      first = v;
    else if (v != first)
      uniform = false;
    sum += v;
    ++count;
  }
  V mean() const { return uniform ? first : sum / static_cast<double>(count); }
};

template <class V>
std::vector<V> atom_means(const std::vector<V>& vals, const PolyFactor& B) {
  std::unordered_map<std::uint64_t, AtomAcc<V>> acc;
  acc.reserve(vals.size());
  for (std::uint64_t x = 0; x < vals.size(); ++x) acc[B.atom_code(x)].add(vals[x]);
  std::vector<V> out(vals.size());
  for (std::uint64_t x = 0; x < vals.size(); ++x) out[x] = acc[B.atom_code(x)].mean();
  return out;
}

}  // namespace

namespace {

AtomLabel decode_label(int p, const std::vector<int>& depths,
                       const std::vector<std::uint64_t>& radices, std::uint64_t code) {
  AtomLabel label;
  label.reserve(depths.size());
  for (std::size_t i = 0; i < depths.size(); ++i) {
    label.push_back(TorusValue::from_code(p, static_cast<std::int64_t>(code % radices[i]),
                                          depths[i] + 1));
    code /= radices[i];
  }
  if (code != 0) throw DimensionError("atom code out of range");
  return label;
}

}  // namespace

GammaTable::GammaTable(int p, std::vector<int> depths, std::vector<double> values)
    : p_(p), depths_(std::move(depths)), values_(std::move(values)) {
  if (p < 2) throw DimensionError("prime must be at least 2");
  std::uint64_t order = 1;
  for (const int h : depths_) {
    if (h < 0) throw DimensionError("depths are nonnegative");
    radices_.push_back(pow_u64(static_cast<std::uint64_t>(p), static_cast<unsigned>(h + 1)));
    order = mul_sat_u64(order, radices_.back());
  }
  if (order > (1ULL << 62))
    throw BudgetError("structure table exceeds the representable code range", order);
  if (values_.size() != order)
    throw DimensionError("structure table needs one value per conceivable label");
  for (const double v : values_)
    if (!(v >= 0.0 && v <= 1.0)) throw DimensionError("structure values must lie in [0,1]");
}

GammaTable GammaTable::constant(int p, std::vector<int> depths, double value) {
  std::uint64_t order = 1;
  for (const int h : depths)
    order = mul_sat_u64(order, pow_u64(static_cast<std::uint64_t>(p),
                                       static_cast<unsigned>(h + 1)));
  return GammaTable(p, std::move(depths), std::vector<double>(order, value));
}

GammaTable GammaTable::identity(int p, int depth) {
  const std::uint64_t q = pow_u64(static_cast<std::uint64_t>(p),
                                  static_cast<unsigned>(depth + 1));
  std::vector<double> vals(q);
  for (std::uint64_t j = 0; j < q; ++j)
    vals[j] = static_cast<double>(j) / static_cast<double>(q);
  return GammaTable(p, {depth}, std::move(vals));
}

double GammaTable::at_code(std::uint64_t code) const {
  if (code >= values_.size()) throw DimensionError("atom code out of range");
  return values_[code];
}

double GammaTable::at_label(const AtomLabel& label) const {
  if (label.size() != depths_.size()) throw DimensionError("label length mismatch");
  std::uint64_t code = 0;
  std::uint64_t stride = 1;
  for (std::size_t i = 0; i < label.size(); ++i) {
    if (label[i].p() != p_) throw DimensionError("label prime mismatch");
    if (label[i].k() > depths_[i] + 1)
      throw DimensionError("label coordinate " + std::to_string(i + 1) +
                           " is outside its depth range");
    code += stride * static_cast<std::uint64_t>(label[i].code(depths_[i] + 1));
    stride *= radices_[i];
  }
  return values_[code];
}

AtomLabel GammaTable::label_of_code(std::uint64_t code) const {
  return decode_label(p_, depths_, radices_, code);
}

FunctionTable compose_gamma(const GammaTable& G, const PolyFactor& B) {
  if (G.p() != B.p() || G.depths() != B.depths())
    throw DimensionError("structure table and factor depth signatures disagree");
  std::vector<double> out(B.dom().size());
  for (std::uint64_t x = 0; x < B.dom().size(); ++x) out[x] = G.at_code(B.atom_code(x));
  return FunctionTable::unit(B.p(), B.n(), std::move(out));
}

FunctionTable conditional_expectation(const FunctionTable& f, const PolyFactor& B) {
  if (f.dom() != B.dom()) throw DimensionError("table and factor dimensions disagree");
  if (f.kind() == Kind::Torus)
    throw DimensionError("conditional expectation averages numeric tables only");
  if (f.kind() == Kind::Complex)
    return FunctionTable::complex_(f.dom().p(), f.dom().n(), atom_means(f.cplx(), B));
  auto out = atom_means(f.real(), B);
  // Averaging a boolean table lands in [0,1]; other real kinds keep range.
  const Kind k = f.kind() == Kind::Boolean ? Kind::Unit : f.kind();
  return k == Kind::Unit ? FunctionTable::unit(f.dom().p(), f.dom().n(), std::move(out))
                         : FunctionTable::signed_(f.dom().p(), f.dom().n(), std::move(out));
}

Refinement refinement_relation(const PolyFactor& fine, const PolyFactor& coarse) {
  if (fine.dom() != coarse.dom()) throw DimensionError("factors live on different domains");
  if (coarse.complexity() <= fine.complexity()) {
    bool prefix = true;
    for (std::size_t i = 0; i < coarse.complexity(); ++i)
      if (fine.polys()[i] != coarse.polys()[i]) {
        prefix = false;
        break;
      }
    if (prefix) return Refinement::Syntactic;
  }
  std::unordered_map<std::uint64_t, std::uint64_t> determined;
  determined.reserve(fine.dom().size());
  for (std::uint64_t x = 0; x < fine.dom().size(); ++x) {
    const auto [it, fresh] = determined.emplace(fine.atom_code(x), coarse.atom_code(x));
    if (!fresh && it->second != coarse.atom_code(x)) return Refinement::Neither;
  }
  return Refinement::Semantic;
}

bool RankReport::proves_at_least(int need) const {
  switch (kind) {
    case Kind::Exact:
    case Kind::AtLeast:
      return r >= need;
    case Kind::Infinite:
      return true;
    default:
      return false;
  }
}

std::string RankReport::str() const {
  switch (kind) {
    case Kind::Exact:
      return "exact(" + std::to_string(r) + ")";
    case Kind::Infinite:
      return "infinite";
    case Kind::AtMost:
      return "at_most(" + std::to_string(r) + ")";
    case Kind::AtLeast:
      return "at_least(" + std::to_string(r) + ")";
    case Kind::Inconclusive:
      return "inconclusive(need " + std::to_string(required_budget) + ")";
  }
  return "?";
}

bool verify_rank_witness(const NcPolynomial& P, const RankWitness& w,
                         std::uint64_t cell_budget) {
  const auto ptab = P.evaluate_table(cell_budget);
  std::vector<std::vector<TorusValue>> qtabs;
  for (const auto& Q : w.decomposition) {
    if (Q.p() != P.p() || Q.n() != P.n()) return false;
    qtabs.push_back(Q.evaluate_table(cell_budget));
  }
  const Domain dom(P.p(), P.n());
  for (std::uint64_t x = 0; x < dom.size(); ++x) {
    AtomLabel label;
    label.reserve(qtabs.size());
    for (const auto& t : qtabs) label.push_back(t[x]);
    const auto it = w.gamma.find(label_str(label));
    if (it == w.gamma.end() || it->second != ptab[x]) return false;
  }
  return true;
}

namespace {

// Lexicographic successor among index tuples with a fixed first entry;
// entries are strictly increasing values in [1, limit].
bool next_combination(std::vector<std::uint64_t>& idx, std::uint64_t limit) {
  const int r = static_cast<int>(idx.size());
  for (int i = r - 1; i >= 1; --i) {
    const std::uint64_t cap = limit - static_cast<std::uint64_t>(r - 1 - i);
    if (idx[static_cast<std::size_t>(i)] < cap) {
      ++idx[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < r; ++j)
        idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
      return true;
    }
  }
  return false;
}

std::uint64_t combinations_saturating(std::uint64_t n, int r) {
  long double c = 1.0L;
  for (int i = 1; i <= r; ++i) {
    c *= static_cast<long double>(n - static_cast<std::uint64_t>(i - 1));
    c /= static_cast<long double>(i);
    if (c > 1e18L) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(c + 0.5L);
}

// Does the joint level-set partition of the coded candidate tuple determine
// pcode? Dense scratch for small key spaces, a hash map otherwise.
bool tuple_determines(const std::vector<const std::vector<std::uint32_t>*>& cods,
                      const std::vector<std::uint64_t>& radix,
                      const std::vector<std::uint64_t>& pcodes) {
  const std::uint64_t N = pcodes.size();
  std::uint64_t keyspace = 1;
  for (const auto r : radix) keyspace = mul_sat_u64(keyspace, r);
  if (keyspace <= (1ULL << 16)) {
    thread_local std::vector<std::uint64_t> value;
    thread_local std::vector<std::uint32_t> epoch;
    thread_local std::uint32_t now = 0;
    if (value.size() < keyspace) {
      value.resize(keyspace);
      epoch.assign(keyspace, 0);
      now = 0;
    }
    ++now;
    if (now == 0) {
      std::fill(epoch.begin(), epoch.end(), 0);
      now = 1;
    }
    for (std::uint64_t x = 0; x < N; ++x) {
      std::uint64_t key = 0;
      for (std::size_t j = cods.size(); j-- > 0;)
        key = key * radix[j] + (*cods[j])[x];
      if (epoch[key] != now) {
        epoch[key] = now;
        value[key] = pcodes[x];
      } else if (value[key] != pcodes[x]) {
        return false;
      }
    }
    return true;
  }
  std::unordered_map<std::uint64_t, std::uint64_t> seen;
  seen.reserve(N);
  for (std::uint64_t x = 0; x < N; ++x) {
    std::uint64_t key = 0;
    for (std::size_t j = cods.size(); j-- > 0;)
      key = key * radix[j] + (*cods[j])[x];
    const auto [it, fresh] = seen.emplace(key, pcodes[x]);
    if (!fresh && it->second != pcodes[x]) return false;
  }
  return true;
}

RankWitness build_witness(const NcPolynomial& P, const PolynomialFamily& fam,
                          const std::vector<std::uint64_t>& tuple) {
  RankWitness w;
  std::vector<std::vector<TorusValue>> qtabs;
  for (const auto idx : tuple) {
    w.decomposition.push_back(fam.at(idx));
    qtabs.push_back(w.decomposition.back().evaluate_table());
  }
  const auto ptab = P.evaluate_table();
  const Domain dom(P.p(), P.n());
  for (std::uint64_t x = 0; x < dom.size(); ++x) {
    AtomLabel label;
    for (const auto& t : qtabs) label.push_back(t[x]);
    w.gamma.emplace(label_str(label), ptab[x]);
  }
  return w;
}

}  // namespace

RankReport rank_d_search(const NcPolynomial& P, int d, int r_max, std::uint64_t budget,
                         int threads) {
  if (d < 1) throw DimensionError("rank order must be at least 1");
  RankReport rep;
  if (P.is_zero()) {
    rep.kind = RankReport::Kind::Exact;
    rep.r = 0;
    return rep;
  }
  if (d == 1) {
    rep.kind = RankReport::Kind::Infinite;
    return rep;
  }
  if (r_max < 1) {
    rep.kind = RankReport::Kind::AtLeast;
    rep.r = 1;
    return rep;
  }

  const std::uint64_t N = Domain(P.p(), P.n()).size();
  std::unique_ptr<PolynomialFamily> fam;
  try {
    fam = std::make_unique<PolynomialFamily>(P.p(), P.n(), d - 1, budget);
  } catch (const BudgetError& e) {
    rep.kind = RankReport::Kind::Inconclusive;
    rep.required_budget = e.required;
    return rep;
  }
  const std::uint64_t S = fam->size();
  const std::uint64_t candidates = S - 1;  // index 0 is the zero polynomial
  const int reach = static_cast<int>(std::min<std::uint64_t>(
      static_cast<std::uint64_t>(r_max), candidates));

  std::uint64_t combos = 0;
  for (int r = 1; r <= reach; ++r) {
    const auto c = combinations_saturating(candidates, r);
    combos = combos > std::numeric_limits<std::uint64_t>::max() - c
                 ? std::numeric_limits<std::uint64_t>::max()
                 : combos + c;
  }
  const std::uint64_t cost = mul_sat_u64(combos + S + 1, N);
  if (cost > budget) {
    rep.kind = RankReport::Kind::Inconclusive;
    rep.required_budget = cost;
    return rep;
  }

  std::vector<std::vector<std::uint32_t>> codes(S);
  std::vector<std::uint64_t> radix(S, 1);
  for (std::uint64_t c = 1; c < S; ++c) {
    const auto Q = fam->at(c);
    const auto tab = Q.evaluate_table();
    const int k = Q.depth() + 1;
    radix[c] = pow_u64(static_cast<std::uint64_t>(P.p()), static_cast<unsigned>(k));
    codes[c].resize(N);
    for (std::uint64_t x = 0; x < N; ++x)
      codes[c][x] = static_cast<std::uint32_t>(tab[x].code(k));
  }
  const auto ptab = P.evaluate_table();
  const int pk = P.depth() + 1;
  std::vector<std::uint64_t> pcodes(N);
  for (std::uint64_t x = 0; x < N; ++x)
    pcodes[x] = static_cast<std::uint64_t>(ptab[x].code(pk));

  for (int r = 1; r <= reach; ++r) {
    // Parallel over the first tuple entry; slot order restores the overall
    // lexicographic minimum independently of the thread count.
    std::vector<std::vector<std::uint64_t>> found(candidates);
    parallel_for(candidates, threads, [&](std::uint64_t t) {
      const std::uint64_t first = t + 1;
      if (first + static_cast<std::uint64_t>(r) - 1 > candidates) return;
      std::vector<std::uint64_t> idx(static_cast<std::size_t>(r));
      for (int j = 0; j < r; ++j)
        idx[static_cast<std::size_t>(j)] = first + static_cast<std::uint64_t>(j);
      std::vector<const std::vector<std::uint32_t>*> cods(static_cast<std::size_t>(r));
      std::vector<std::uint64_t> rads(static_cast<std::size_t>(r));
      do {
        for (int j = 0; j < r; ++j) {
          cods[static_cast<std::size_t>(j)] = &codes[idx[static_cast<std::size_t>(j)]];
          rads[static_cast<std::size_t>(j)] = radix[idx[static_cast<std::size_t>(j)]];
        }
        if (tuple_determines(cods, rads, pcodes)) {
          found[t] = idx;
          return;
        }
      } while (next_combination(idx, candidates));
    });
    for (std::uint64_t t = 0; t < candidates; ++t)
      if (!found[t].empty()) {
        rep.kind = RankReport::Kind::Exact;
        rep.r = r;
        rep.witness = build_witness(P, *fam, found[t]);
        return rep;
      }
  }
  rep.kind = RankReport::Kind::AtLeast;
  rep.r = reach + 1;
  return rep;
}

namespace {

constexpr std::uint64_t kRankInf = std::numeric_limits<std::uint64_t>::max();

// Conservative [lo, hi] interval for the true rank behind a report.
std::pair<std::uint64_t, std::uint64_t> rank_interval(const RankReport& rep) {
  switch (rep.kind) {
    case RankReport::Kind::Exact:
      return {static_cast<std::uint64_t>(rep.r), static_cast<std::uint64_t>(rep.r)};
    case RankReport::Kind::Infinite:
      return {kRankInf, kRankInf};
    case RankReport::Kind::AtMost:
      return {1, static_cast<std::uint64_t>(rep.r)};
    case RankReport::Kind::AtLeast:
      return {static_cast<std::uint64_t>(rep.r), kRankInf};
    case RankReport::Kind::Inconclusive:
      return {1, kRankInf};
  }
  return {1, kRankInf};
}

}  // namespace

RankReport factor_rank_search(const PolyFactor& B, int r_max, std::uint64_t budget,
                              int threads) {
  RankReport rep;
  if (B.complexity() == 0) {
    // No nonzero combination exists; the minimum over an empty set.
    rep.kind = RankReport::Kind::Infinite;
    return rep;
  }
  if (B.order() > budget) {
    rep.kind = RankReport::Kind::Inconclusive;
    rep.required_budget = B.order();
    return rep;
  }
  const std::size_t C = B.complexity();
  std::vector<std::uint64_t> radices(C);
  for (std::size_t i = 0; i < C; ++i)
    radices[i] = pow_u64(static_cast<std::uint64_t>(B.p()),
                         static_cast<unsigned>(B.depths()[i] + 1));

  std::uint64_t best_upper = kRankInf;
  std::uint64_t best_lower = kRankInf;
  std::optional<RankWitness> best_witness;
  std::optional<std::vector<std::uint64_t>> best_lambda;
  bool any_inconclusive = false;
  std::uint64_t max_required = 0;

  for (std::uint64_t code = 1; code < B.order(); ++code) {
    std::vector<std::uint64_t> lambda(C);
    std::uint64_t rem = code;
    for (std::size_t i = 0; i < C; ++i) {
      lambda[i] = rem % radices[i];
      rem /= radices[i];
    }
    NcPolynomial Q(B.p(), B.n());
    int d_lambda = 0;
    for (std::size_t i = 0; i < C; ++i) {
      if (lambda[i] == 0) continue;
      const auto scaled = B.polys()[i].scaled(static_cast<std::int64_t>(lambda[i]));
      d_lambda = std::max(d_lambda, scaled.degree());
      Q = Q + scaled;
    }
    RankReport inner;
    if (Q.is_zero()) {
      inner.kind = RankReport::Kind::Exact;
      inner.r = 0;
    } else if (d_lambda == 1) {
      inner.kind = RankReport::Kind::Infinite;
    } else {
      inner = rank_d_search(Q, d_lambda, r_max, budget, threads);
    }
    if (inner.kind == RankReport::Kind::Inconclusive) {
      any_inconclusive = true;
      max_required = std::max(max_required, inner.required_budget);
    }
    const auto [lo, hi] = rank_interval(inner);
    best_lower = std::min(best_lower, lo);
    if (hi < best_upper) {
      best_upper = hi;
      best_witness = inner.witness;
      best_lambda = lambda;
    }
    if (best_upper == 0) break;  // nothing beats a vanishing combination
  }

  if (best_upper != kRankInf) {
    rep.kind = best_upper == best_lower ? RankReport::Kind::Exact : RankReport::Kind::AtMost;
    rep.r = static_cast<int>(best_upper);
    rep.witness = std::move(best_witness);
    rep.lambda = std::move(best_lambda);
    return rep;
  }
  if (best_lower == kRankInf) {
    rep.kind = RankReport::Kind::Infinite;
    return rep;
  }
  if (any_inconclusive) {
    rep.kind = RankReport::Kind::Inconclusive;
    rep.required_budget = max_required;
    return rep;
  }
  rep.kind = RankReport::Kind::AtLeast;
  rep.r = static_cast<int>(best_lower);
  return rep;
}

AtomDistribution atom_distribution_report(const PolyFactor& B) {
  AtomDistribution out;
  out.order = B.order();
  out.points = B.dom().size();
  std::map<std::uint64_t, std::uint64_t> counts;
  for (std::uint64_t x = 0; x < out.points; ++x) ++counts[B.atom_code(x)];
  const double target = 1.0 / static_cast<double>(out.order);
  for (const auto& [code, cnt] : counts) {
    out.nonempty.emplace_back(label_str(B.label_of_code(code)), cnt);
    out.max_deviation = std::max(
        out.max_deviation,
        std::abs(static_cast<double>(cnt) / static_cast<double>(out.points) - target));
  }
  if (counts.size() < out.order) out.max_deviation = std::max(out.max_deviation, target);
  return out;
}

StabilityReport embedding_stability_report(const PolyFactor& B, int m, int trials, Rng& rng,
                                           int r_max, std::uint64_t budget) {
  if (m > B.n()) throw DimensionError("embedding source exceeds the ambient dimension");
  if (trials < 1) throw DimensionError("stability report needs at least one trial");
  StabilityReport out;
  out.trials = trials;
  const auto base_rank = factor_rank_search(B, r_max, budget);
  const auto [base_lo, base_hi] = rank_interval(base_rank);
  int deg_drops = 0, depth_drops = 0, rank_drops = 0;
  for (int t = 0; t < trials; ++t) {
    const auto A = sample_affine_embedding(rng, B.p(), m, B.n());
    bool deg_drop = false, depth_drop = false;
    std::vector<NcPolynomial> restricted;
    restricted.reserve(B.complexity());
    for (std::size_t i = 0; i < B.complexity(); ++i) {
      restricted.push_back(B.polys()[i].compose_affine(A));
      if (restricted.back().degree() < B.degrees()[i]) deg_drop = true;
      if (restricted.back().depth() < B.depths()[i]) depth_drop = true;
    }
    if (deg_drop) ++deg_drops;
    if (depth_drop) ++depth_drops;
    if (B.complexity() == 0) continue;
    const PolyFactor BA(restricted);
    const auto ra = factor_rank_search(BA, r_max, budget);
    const auto [lo, hi] = rank_interval(ra);
    if (hi < base_lo)
      ++rank_drops;
    else if (lo < base_hi)
      out.rank_conclusive = false;  // neither a drop nor its absence is proven
  }
  out.degree_drop = static_cast<double>(deg_drops) / trials;
  out.depth_drop = static_cast<double>(depth_drops) / trials;
  out.rank_drop = static_cast<double>(rank_drops) / trials;
  return out;
}

DecompositionReport validate_decomposition(const FunctionTable& f, const FunctionTable& f1,
                                           const FunctionTable& f2, const FunctionTable& f3,
                                           const PolyFactor& B1, int d, double zeta,
                                           double eta_value, int r_required,
                                           std::uint64_t budget, int threads) {
  for (const auto* t : {&f, &f1, &f2, &f3}) {
    if (t->dom() != B1.dom()) throw DimensionError("decomposition parts disagree on the domain");
    if (!t->is_real_kind()) throw DimensionError("decomposition clauses are real-valued");
  }
  if (d < 1) throw DimensionError("uniformity order must be at least 1");
  DecompositionReport rep;
  const std::uint64_t N = f.size();

  double sum_err = 0;
  for (std::uint64_t x = 0; x < N; ++x)
    sum_err = std::max(sum_err,
                       std::abs(f.real()[x] - (f1.real()[x] + f2.real()[x] + f3.real()[x])));
  rep.clauses.push_back({"sum", sum_err <= kDecompTol ? ClauseStatus::Pass : ClauseStatus::Fail,
                         sum_err});

  const auto proj = conditional_expectation(f, B1);
  double proj_err = 0;
  for (std::uint64_t x = 0; x < N; ++x)
    proj_err = std::max(proj_err, std::abs(f1.real()[x] - proj.real()[x]));
  rep.clauses.push_back({"structured-part",
                         proj_err <= kDecompTol ? ClauseStatus::Pass : ClauseStatus::Fail,
                         proj_err});

  const double l2 = norm_l2(f2);
  rep.clauses.push_back({"l2-part", l2 < zeta ? ClauseStatus::Pass : ClauseStatus::Fail, l2});

  try {
    const double u = gowers_norm_exact(f3, d + 1, budget, threads).value;
    rep.clauses.push_back(
        {"uniform-part", u < eta_value ? ClauseStatus::Pass : ClauseStatus::Fail, u});
  } catch (const BudgetError&) {
    rep.clauses.push_back({"uniform-part", ClauseStatus::Inconclusive, -1.0});
  }

  double range_excess = 0;
  for (std::uint64_t x = 0; x < N; ++x) {
    const double a = f1.real()[x];
    const double b = f1.real()[x] + f3.real()[x];
    range_excess = std::max({range_excess, -a, a - 1.0, -b, b - 1.0});
  }
  range_excess = std::max(range_excess, 0.0);
  rep.clauses.push_back({"range",
                         range_excess <= kDecompTol ? ClauseStatus::Pass : ClauseStatus::Fail,
                         range_excess});

  if (r_required <= 0) {
    rep.clauses.push_back({"rank", ClauseStatus::Pass, 0.0});
  } else {
    const auto rr = factor_rank_search(B1, r_required - 1, budget, threads);
    const auto [lo, hi] = rank_interval(rr);
    ClauseStatus st;
    if (rr.proves_at_least(r_required))
      st = ClauseStatus::Pass;
    else if (hi < static_cast<std::uint64_t>(r_required))
      st = ClauseStatus::Fail;
    else
      st = ClauseStatus::Inconclusive;
    const double measured =
        rr.kind == RankReport::Kind::Infinite ? std::numeric_limits<double>::infinity()
        : rr.kind == RankReport::Kind::Inconclusive ? -1.0
                                                    : static_cast<double>(rr.r);
    rep.clauses.push_back({"rank", st, measured});
  }

  rep.all_pass = std::all_of(rep.clauses.begin(), rep.clauses.end(), [](const auto& c) {
    return c.status == ClauseStatus::Pass;
  });
  return rep;
}

}  // namespace hofa
