#include "hofa/instance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hofa {

namespace {

// largest p^m whose boolean tables fit a 64-bit mask with headroom
constexpr std::uint64_t kMaxMaskPoints = 63;

void check_bool_or_unit(const FunctionTable& f, const char* who) {
  if (f.kind() != Kind::Boolean && f.kind() != Kind::Unit)
    throw DimensionError(std::string(who) + " needs a boolean or unit-interval table");
}

// Adds the mask distribution of one restricted value vector under independent
// per-point Bernoulli rounding. A 0/1 vector is a single point mass.
void add_mask_mass(const std::vector<double>& vals, double weight,
                   std::map<std::uint64_t, double>& into, std::vector<double>& scratch) {
  bool all01 = true;
  for (double v : vals)
    if (v != 0.0 && v != 1.0) {
      all01 = false;
      break;
    }
  if (all01) {
    std::uint64_t mask = 0;
    for (std::size_t y = 0; y < vals.size(); ++y)
      if (vals[y] == 1.0) mask |= 1ULL << y;
    into[mask] += weight;
    return;
  }
  scratch.assign(1ULL << vals.size(), 0.0);
  scratch[0] = 1.0;
  std::uint64_t size = 1;
  for (double v : vals) {
    for (std::uint64_t mask = 0; mask < size; ++mask) {
      const double pr = scratch[mask];
      scratch[mask] = pr * (1.0 - v);
      scratch[mask | size] = pr * v;
    }
    size <<= 1;
  }
  for (std::uint64_t mask = 0; mask < size; ++mask)
    if (scratch[mask] != 0.0) into[mask] += weight * scratch[mask];
}

// Gamma at the shifted labels P_i(x) + s_i. Empty when some label escapes the
// structure function's domain (depth too large), which can only happen when
// the depth clause already fails.
}  // namespace

std::optional<FunctionTable> compose_witness(const GammaTable& G,
                                             const PolySequenceWitness& w, int p, int n) {
  const std::size_t C = G.complexity();
  if (w.polys.size() != C)
    throw DimensionError("the witness length differs from the structure function's arity");
  if (!w.shifts.empty() && w.shifts.size() != C)
    throw DimensionError("the shift list length differs from the structure function's arity");
  const Domain dom(p, n);
  std::vector<std::vector<std::uint64_t>> codes(C);
  std::vector<std::uint64_t> strides(C);
  std::uint64_t stride = 1;
  for (std::size_t i = 0; i < C; ++i) {
    const int hi = G.depths()[i];
    if (w.polys[i].p() != p || w.polys[i].n() != n)
      throw DimensionError("witness polynomials live on the wrong domain");
    const TorusValue s = w.shift(i);
    if (w.polys[i].depth() > hi || s.k() > hi + 1) return std::nullopt;
    const std::vector<TorusValue> tab = w.polys[i].evaluate_table();
    codes[i].resize(dom.size());
    for (std::uint64_t x = 0; x < dom.size(); ++x)
      codes[i][x] = static_cast<std::uint64_t>((tab[x] + s).code(hi + 1));
    strides[i] = stride;
    stride *= pow_u64(p, hi + 1);
  }
  std::vector<double> out(dom.size());
  for (std::uint64_t x = 0; x < dom.size(); ++x) {
    std::uint64_t code = 0;
    for (std::size_t i = 0; i < C; ++i) code += codes[i][x] * strides[i];
    out[x] = G.at_code(code);
  }
  return FunctionTable::unit(p, n, std::move(out));
}

std::uint64_t RestrictionDistribution::points() const {
  return pow_u64(p, static_cast<unsigned>(m));
}

double RestrictionDistribution::total() const {
  double t = 0.0;
  for (const auto& [mask, v] : mass) t += v;
  return t;
}

std::string RestrictionDistribution::table_str(std::uint64_t bits) const {
  const std::uint64_t pts = points();
  std::string s(pts, '0');
  for (std::uint64_t y = 0; y < pts; ++y)
    if ((bits >> y) & 1) s[y] = '1';
  return s;
}

RestrictionDistribution restriction_distribution(const FunctionTable& f, int m, Rng* rng,
                                                 std::uint64_t trials,
                                                 std::uint64_t budget) {
  check_bool_or_unit(f, "restriction_distribution");
  const Domain& dom = f.dom();
  const int p = dom.p();
  const int n = dom.n();
  if (m < 1 || m > n) throw DimensionError("need 1 <= m <= n");

  RestrictionDistribution out;
  out.p = p;
  out.m = m;
  const std::uint64_t points = pow_u64(p, static_cast<unsigned>(m));
  if (points > kMaxMaskPoints)
    throw DimensionError("restricted tables need p^m <= 63 for the mask encoding");

  const std::vector<double>& vals = f.real();
  const std::uint64_t N = dom.size();
  const bool analytic = f.kind() == Kind::Unit;

  if (rng == nullptr) {
    const std::uint64_t per = analytic ? mul_sat_u64(points, 1ULL << points) : points;
    const std::uint64_t cost =
        mul_sat_u64(pow_u64(N, static_cast<unsigned>(m)), mul_sat_u64(N, per));
    if (cost > budget)
      throw BudgetError("exact restriction enumeration exceeds the budget", cost);

    const Domain small(p, m);
    std::map<std::uint64_t, double> acc;
    std::map<std::uint64_t, std::uint64_t> cnt;
    std::uint64_t embeddings = 0;
    std::vector<std::uint64_t> colidx(m);
    std::vector<std::vector<std::uint8_t>> cols(m);
    std::vector<std::uint64_t> combo(points);
    std::vector<double> rvals(points);
    std::vector<double> scratch;
    const std::uint64_t mats = pow_u64(N, static_cast<unsigned>(m));
    for (std::uint64_t mc = 0; mc < mats; ++mc) {
      std::uint64_t rest = mc;
      for (int i = 0; i < m; ++i) {
        colidx[i] = rest % N;
        rest /= N;
      }
      for (int i = 0; i < m; ++i) cols[i] = dom.decode(colidx[i]);
      if (column_rank_mod_p(p, n, cols) != m) continue;
      for (std::uint64_t y = 0; y < points; ++y) {
        const std::vector<std::uint8_t> yy = small.decode(y);
        std::uint64_t idx = 0;
        for (int i = 0; i < m; ++i) idx = dom.add(idx, dom.scale(colidx[i], yy[i]));
        combo[y] = idx;
      }
      for (std::uint64_t s = 0; s < N; ++s) {
        ++embeddings;
        if (analytic) {
          for (std::uint64_t y = 0; y < points; ++y) rvals[y] = vals[dom.add(combo[y], s)];
          add_mask_mass(rvals, 1.0, acc, scratch);
        } else {
          std::uint64_t mask = 0;
          for (std::uint64_t y = 0; y < points; ++y)
            if (vals[dom.add(combo[y], s)] == 1.0) mask |= 1ULL << y;
          ++cnt[mask];
        }
      }
    }
    out.exact = true;
    out.samples = 0;
    if (analytic) {
      for (const auto& [mask, v] : acc)
        out.mass[mask] = v / static_cast<double>(embeddings);
    } else {
      for (const auto& [mask, c] : cnt)
        out.mass[mask] = static_cast<double>(c) / static_cast<double>(embeddings);
    }
  } else {
    if (trials == 0) throw DimensionError("sampling mode needs a positive trial count");
    std::map<std::uint64_t, std::uint64_t> cnt;
    for (std::uint64_t t = 0; t < trials; ++t) {
      const AffineMap A = sample_affine_embedding(*rng, p, m, n);
      std::uint64_t mask = 0;
      for (std::uint64_t y = 0; y < points; ++y) {
        const double v = vals[A.apply_index(y)];
        const bool bit = analytic ? rng->unit() < v : v == 1.0;
        if (bit) mask |= 1ULL << y;
      }
      ++cnt[mask];
    }
    out.exact = false;
    out.samples = trials;
    for (const auto& [mask, c] : cnt)
      out.mass[mask] = static_cast<double>(c) / static_cast<double>(trials);
  }
  return out;
}

double tv_distance(const RestrictionDistribution& a, const RestrictionDistribution& b) {
  if (a.p != b.p || a.m != b.m)
    throw DimensionError("the distributions live on different table spaces");
  double sum = 0.0;
  auto ia = a.mass.begin();
  auto ib = b.mass.begin();
  while (ia != a.mass.end() || ib != b.mass.end()) {
    if (ib == b.mass.end() || (ia != a.mass.end() && ia->first < ib->first)) {
      sum += std::abs(ia->second);
      ++ia;
    } else if (ia == a.mass.end() || ib->first < ia->first) {
      sum += std::abs(ib->second);
      ++ib;
    } else {
      sum += std::abs(ia->second - ib->second);
      ++ia;
      ++ib;
    }
  }
  return 0.5 * sum;
}

double RegularityInstance::complexity_measure() const {
  double v = 1.0 / gamma;
  v = std::max(v, static_cast<double>(complexity()));
  v = std::max(v, static_cast<double>(d));
  if (rank) v = std::max(v, static_cast<double>(*rank));
  return v;
}

void RegularityInstance::validate() const {
  if (!(gamma > 0.0)) throw DimensionError("gamma must be positive");
  if (d < 1) throw DimensionError("the uniformity order must be at least 1");
  const std::size_t C = degrees.size();
  if (depths.size() != C) throw DimensionError("degree and depth lists differ in length");
  if (gamma_table.complexity() != C)
    throw DimensionError("the structure function's arity differs from the signature");
  if (gamma_table.depths() != depths)
    throw DimensionError("the structure function's depths differ from the signature");
  for (std::size_t i = 0; i < C; ++i) {
    if (degrees[i] < 1 || degrees[i] >= d)
      throw DimensionError("slot degrees must satisfy 1 <= d_i < d");
    if (depths[i] < 0 || depths[i] >= degrees[i])
      throw DimensionError("slot depths must satisfy 0 <= h_i < d_i");
  }
  if (rank && *rank < 1) throw DimensionError("a rank demand must be positive");
}

std::vector<std::string> RegularityInstance::lint() const {
  std::vector<std::string> notes;
  const int p = gamma_table.p();
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    const int ceiling = (degrees[i] - 1) / (p - 1);
    if (depths[i] > ceiling)
      notes.push_back("slot " + std::to_string(i + 1) + ": no degree-" +
                      std::to_string(degrees[i]) + " polynomial mod " + std::to_string(p) +
                      " attains depth " + std::to_string(depths[i]) +
                      "; the attainable ceiling is floor((d-1)/(p-1)) = " +
                      std::to_string(ceiling));
  }
  return notes;
}

PolyFactor PolySequenceWitness::factor(int p, int n) const {
  return polys.empty() ? PolyFactor(p, n) : PolyFactor(polys);
}

TorusValue PolySequenceWitness::shift(std::size_t i) const {
  if (shifts.empty()) return TorusValue::zero(polys.at(i).p());
  return shifts.at(i);
}

WitnessReport witness_check(const FunctionTable& f, const RegularityInstance& I,
                            const PolySequenceWitness& witness,
                            std::optional<int> asserted_rank, std::uint64_t budget,
                            int threads) {
  I.validate();
  check_bool_or_unit(f, "witness_check");
  const std::size_t C = I.degrees.size();
  if (witness.polys.size() != C)
    throw DimensionError("the witness length differs from the signature");
  if (!witness.shifts.empty() && witness.shifts.size() != C)
    throw DimensionError("the shift list length differs from the signature");
  const int p = f.dom().p();
  const int n = f.dom().n();
  if (I.gamma_table.p() != p) throw DimensionError("prime moduli differ");

  WitnessReport rep;
  rep.witness = witness;
  rep.degrees_exact = true;
  rep.depths_exact = true;
  for (std::size_t i = 0; i < C; ++i) {
    if (witness.polys[i].degree() != I.degrees[i]) rep.degrees_exact = false;
    if (witness.polys[i].depth() != I.depths[i]) rep.depths_exact = false;
  }

  if (!I.rank) {
    rep.rank_status = ClauseStatus::Pass;  // vacuous without a rank demand
    rep.rank_evidence = RankEvidence::Searched;
  } else if (asserted_rank) {
    rep.rank_evidence = RankEvidence::Asserted;
    rep.rank_status =
        *asserted_rank >= *I.rank ? ClauseStatus::Pass : ClauseStatus::Fail;
  } else {
    rep.rank_evidence = RankEvidence::Searched;
    try {
      const PolyFactor B = witness.factor(p, n);
      rep.rank_report = factor_rank_search(B, *I.rank - 1, budget, threads);
      if (rep.rank_report.proves_at_least(*I.rank)) {
        rep.rank_status = ClauseStatus::Pass;
      } else if ((rep.rank_report.kind == RankReport::Kind::Exact ||
                  rep.rank_report.kind == RankReport::Kind::AtMost) &&
                 rep.rank_report.r < *I.rank) {
        rep.rank_status = ClauseStatus::Fail;
      } else {
        rep.rank_status = ClauseStatus::Inconclusive;
      }
    } catch (const BudgetError& e) {
      rep.rank_status = ClauseStatus::Inconclusive;
      rep.rank_report.kind = RankReport::Kind::Inconclusive;
      rep.rank_report.required_budget = e.required;
    }
  }

  const std::optional<FunctionTable> target = compose_witness(I.gamma_table, witness, p, n);
  if (target) {
    rep.residual = table_sub(f, *target);
    rep.residual_l1 = norm_l1(*rep.residual);
    rep.residual_norm = gowers_norm_exact(*rep.residual, I.d, budget, threads);
    rep.gowers_within_gamma = rep.residual_norm.value <= I.gamma;
  } else {
    rep.gowers_within_gamma = false;  // some label escaped the structure domain
  }
  rep.satisfied = rep.degrees_exact && rep.depths_exact &&
                  rep.rank_status == ClauseStatus::Pass && rep.gowers_within_gamma;
  return rep;
}

WitnessSearchResult search_witness(const FunctionTable& f, const RegularityInstance& I,
                                   std::uint64_t budget, int threads) {
  I.validate();
  check_bool_or_unit(f, "search_witness");
  const int p = f.dom().p();
  const int n = f.dom().n();
  if (I.gamma_table.p() != p) throw DimensionError("prime moduli differ");
  const std::size_t C = I.degrees.size();

  WitnessSearchResult res;
  if (C == 0) {
    res.best = witness_check(f, I, PolySequenceWitness{}, std::nullopt, budget, threads);
    res.tuples_tried = 1;
    res.exhausted = true;
    return res;
  }

  const Domain& dom = f.dom();
  const std::uint64_t N = dom.size();

  // candidates per slot: degree <= d_i, depth <= h_i, zero included, so every
  // label stays inside the structure function's domain; exact-degree misses
  // surface in the report's clauses instead of shrinking the search
  std::vector<std::vector<NcPolynomial>> fams(C);
  std::vector<std::uint64_t> qs(C);
  std::vector<std::uint64_t> sizes(C);
  std::uint64_t tuples = 1;
  for (std::size_t i = 0; i < C; ++i) {
    const PolynomialFamily all(p, n, I.degrees[i], budget);
    for (std::uint64_t j = 0; j < all.size(); ++j) {
      NcPolynomial P = all.at(j);
      if (P.depth() <= I.depths[i]) fams[i].push_back(std::move(P));
    }
    qs[i] = pow_u64(p, I.depths[i] + 1);
    sizes[i] = mul_sat_u64(fams[i].size(), qs[i]);
    tuples = mul_sat_u64(tuples, sizes[i]);
  }
  const std::uint64_t cost =
      mul_sat_u64(tuples, pow_u64(N, static_cast<unsigned>(I.d + 1)));
  if (cost > budget) throw BudgetError("witness enumeration exceeds the budget", cost);

  // per-slot candidate code tables with the shift folded in; candidate c is
  // family index c / q with shift code c % q
  std::vector<std::vector<std::vector<std::uint32_t>>> codes(C);
  for (std::size_t i = 0; i < C; ++i) {
    codes[i].resize(sizes[i]);
    for (std::uint64_t c = 0; c < sizes[i]; ++c) {
      const NcPolynomial& P = fams[i][c / qs[i]];
      const TorusValue s = TorusValue::from_code(
          p, static_cast<std::int64_t>(c % qs[i]), I.depths[i] + 1);
      const std::vector<TorusValue> tab = P.evaluate_table();
      auto& dst = codes[i][c];
      dst.resize(N);
      for (std::uint64_t x = 0; x < N; ++x)
        dst[x] = static_cast<std::uint32_t>((tab[x] + s).code(I.depths[i] + 1));
    }
  }
  std::vector<std::uint64_t> strides(C);
  std::uint64_t stride = 1;
  for (std::size_t i = 0; i < C; ++i) {
    strides[i] = stride;
    stride *= qs[i];
  }

  const std::vector<double>& fv = f.real();
  const std::uint64_t inner = tuples / sizes[0];
  std::vector<double> best_val(sizes[0], std::numeric_limits<double>::infinity());
  std::vector<std::uint64_t> best_inner(sizes[0], 0);
  parallel_for(sizes[0], threads, [&](std::uint64_t c0) {
    std::vector<std::uint64_t> ci(C);
    std::vector<double> resid(N);
    ci[0] = c0;
    for (std::uint64_t g = 0; g < inner; ++g) {
      std::uint64_t rest = g;
      for (std::size_t i = C; i-- > 1;) {
        ci[i] = rest % sizes[i];
        rest /= sizes[i];
      }
      for (std::uint64_t x = 0; x < N; ++x) {
        std::uint64_t code = 0;
        for (std::size_t i = 0; i < C; ++i) code += codes[i][ci[i]][x] * strides[i];
        resid[x] = fv[x] - I.gamma_table.at_code(code);
      }
      const double val =
          gowers_norm_exact(FunctionTable::signed_(p, n, resid), I.d, budget, 1).value;
      if (val < best_val[c0]) {
        best_val[c0] = val;
        best_inner[c0] = g;
      }
    }
  });

  std::uint64_t best_c0 = 0;
  for (std::uint64_t c0 = 1; c0 < sizes[0]; ++c0)
    if (best_val[c0] < best_val[best_c0]) best_c0 = c0;

  PolySequenceWitness w;
  w.polys.reserve(C);
  w.shifts.reserve(C);
  std::vector<std::uint64_t> ci(C);
  ci[0] = best_c0;
  std::uint64_t rest = best_inner[best_c0];
  for (std::size_t i = C; i-- > 1;) {
    ci[i] = rest % sizes[i];
    rest /= sizes[i];
  }
  for (std::size_t i = 0; i < C; ++i) {
    w.polys.push_back(fams[i][ci[i] / qs[i]]);
    w.shifts.push_back(TorusValue::from_code(
        p, static_cast<std::int64_t>(ci[i] % qs[i]), I.depths[i] + 1));
  }
  res.best = witness_check(f, I, w, std::nullopt, budget, threads);
  res.tuples_tried = tuples;
  res.exhausted = true;
  return res;
}

FunctionTable perturb_toward_structure(const FunctionTable& f, const FunctionTable& target,
                                       double delta, Rng& rng) {
  if (f.kind() != Kind::Boolean)
    throw DimensionError("perturbation applies to boolean tables");
  check_bool_or_unit(target, "perturb_toward_structure");
  if (f.dom() != target.dom()) throw DimensionError("table domains differ");
  if (!(delta >= 0.0 && delta <= 1.0)) throw DimensionError("delta must lie in [0, 1]");
  const std::vector<double>& fv = f.real();
  const std::vector<double>& tv = target.real();
  std::vector<double> out(fv.size());
  for (std::uint64_t x = 0; x < fv.size(); ++x) {
    if (rng.unit() < 1.0 - delta)
      out[x] = fv[x];
    else
      out[x] = rng.unit() < tv[x] ? 1.0 : 0.0;
  }
  return FunctionTable::boolean(f.dom().p(), f.dom().n(), std::move(out));
}

std::pair<FunctionTable, DriveTrace> small_perturbation_drive(
    const FunctionTable& f, const FunctionTable& target, double delta,
    double gamma_goal, int d, std::uint64_t max_samples, Rng& rng, std::uint64_t budget,
    int threads) {
  if (f.kind() != Kind::Boolean) throw DimensionError("the drive perturbs boolean tables");
  check_bool_or_unit(target, "small_perturbation_drive");
  if (!(delta > 0.0 && delta <= 1.0)) throw DimensionError("delta must lie in (0, 1]");
  if (d < 1) throw DimensionError("the uniformity order must be at least 1");
  if (f.dom() != target.dom()) throw DimensionError("table domains differ");

  DriveTrace trace;
  FunctionTable g = f;
  double cur = gowers_norm_exact(table_sub(g, target), d, budget, threads).value;
  trace.norms.push_back(cur);
  if (cur <= gamma_goal) {
    trace.reached_goal = true;
    return {g, trace};
  }
  while (trace.sampled < max_samples) {
    ++trace.sampled;
    FunctionTable h = perturb_toward_structure(g, target, delta, rng);
    if (norm_l1(table_sub(h, g)) > 2.0 * delta) continue;
    const double next = gowers_norm_exact(table_sub(h, target), d, budget, threads).value;
    if (next > (1.0 - delta / 3.0) * cur) continue;
    g = h;
    cur = next;
    ++trace.accepted;
    trace.norms.push_back(cur);
    if (cur <= gamma_goal) {
      trace.reached_goal = true;
      break;
    }
  }
  trace.l1_moved = norm_l1(table_sub(f, g));
  return {g, trace};
}

RestrictionDistribution instance_distribution(const RegularityInstance& I, int m,
                                              int n_check, std::uint64_t budget) {
  I.validate();
  if (m < 1) throw DimensionError("need m >= 1");
  const int p = I.gamma_table.p();
  const std::uint64_t points = pow_u64(p, static_cast<unsigned>(m));
  if (points > kMaxMaskPoints)
    throw DimensionError("restricted tables need p^m <= 63 for the mask encoding");

  RestrictionDistribution out;
  out.p = p;
  out.m = m;
  out.exact = true;
  out.samples = 0;

  // evaluation forms on (x_0, x_1, ..., x_m): the restricted point y reads
  // the polynomials at x_0 + sum_i y_i x_i
  const Domain small(p, m);
  std::vector<LinearForm> forms(points);
  for (std::uint64_t y = 0; y < points; ++y) {
    LinearForm L;
    L.coeffs.assign(m + 1, 0);
    L.coeffs[0] = 1;
    const std::vector<std::uint8_t> yy = small.decode(y);
    for (int i = 0; i < m; ++i) L.coeffs[i + 1] = yy[i];
    forms[y] = std::move(L);
  }

  const ConsistentSet cons =
      enumerate_consistent(p, forms, I.degrees, I.depths, n_check, budget);
  const std::uint64_t count = cons.tuples.size();
  const std::uint64_t cost = mul_sat_u64(count, mul_sat_u64(points, 1ULL << points));
  if (cost > budget)
    throw BudgetError("instance-distribution integration exceeds the budget", cost);

  std::map<std::uint64_t, double> acc;
  std::vector<double> gvals(points);
  std::vector<double> scratch;
  for (const auto& tuple : cons.tuples) {
    for (std::uint64_t y = 0; y < points; ++y)
      gvals[y] = I.gamma_table.at_label(tuple[y]);
    add_mask_mass(gvals, 1.0, acc, scratch);
  }
  for (const auto& [mask, v] : acc) out.mass[mask] = v / static_cast<double>(count);
  return out;
}

}  // namespace hofa
