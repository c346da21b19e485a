#include "hofa/tester.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <utility>

namespace hofa {

namespace {

constexpr double kZ99 = 2.5758293035489004;  // matches the sampled-norm convention

double binomial_half_width(double phat, std::uint64_t n) {
  if (n == 0) return 0.0;
  const double var = phat * (1.0 - phat);
  return kZ99 * std::sqrt(var / static_cast<double>(n));
}

FunctionTable from_reals(int p, int n, Kind kind, std::vector<double> vals) {
  switch (kind) {
    case Kind::Boolean:
      return FunctionTable::boolean(p, n, std::move(vals));
    case Kind::Unit:
      return FunctionTable::unit(p, n, std::move(vals));
    default:
      return FunctionTable::signed_(p, n, std::move(vals));
  }
}

// f o A as a table on the embedding's source space; exactly p^m queries.
FunctionTable read_restriction(QueryOracle& oracle, const AffineMap& A) {
  const Domain small(A.p, A.m);
  const std::uint64_t points = small.size();
  if (oracle.kind() == Kind::Torus) {
    std::vector<TorusValue> vals;
    vals.reserve(points);
    for (std::uint64_t y = 0; y < points; ++y)
      vals.push_back(oracle.at_torus(A.apply_index(y)));
    return FunctionTable::torus(A.p, A.m, std::move(vals));
  }
  std::vector<double> vals(points);
  for (std::uint64_t y = 0; y < points; ++y) vals[y] = oracle.at(A.apply_index(y));
  return from_reals(A.p, A.m, oracle.kind(), std::move(vals));
}

void check_tester_kind(const QueryOracle& oracle, const char* who) {
  if (oracle.kind() == Kind::Complex)
    throw DimensionError(std::string(who) +
                         " handles boolean, unit, signed, and torus tables");
}

void finish_counts(const QueryOracle& oracle, std::uint64_t before,
                   std::uint64_t expected, TesterVerdict& v) {
  v.queries = oracle.queries() - before;
  if (v.queries != expected) throw Error("query accounting mismatch");
}

// P[Binomial(reps, fail) >= (reps+1)/2], the majority-vote failure chance.
double majority_failure(std::uint64_t reps, double fail) {
  const double lf = std::log(fail);
  const double ls = std::log1p(-fail);
  double tail = 0.0;
  for (std::uint64_t j = (reps + 1) / 2; j <= reps; ++j) {
    const double lc = std::lgamma(static_cast<double>(reps) + 1.0) -
                      std::lgamma(static_cast<double>(j) + 1.0) -
                      std::lgamma(static_cast<double>(reps - j) + 1.0);
    tail += std::exp(lc + static_cast<double>(j) * lf +
                     static_cast<double>(reps - j) * ls);
  }
  return tail;
}

}  // namespace

QueryOracle::QueryOracle(FunctionTable f, std::optional<std::uint64_t> cap)
    : table_(std::move(f)), cap_(cap) {}

void QueryOracle::charge() {
  std::uint64_t cur = count_.load(std::memory_order_relaxed);
  for (;;) {
    if (cap_ && cur >= *cap_)
      throw QueryCapError("query cap of " + std::to_string(*cap_) + " exhausted");
    if (count_.compare_exchange_weak(cur, cur + 1, std::memory_order_relaxed)) return;
  }
}

double QueryOracle::at(std::uint64_t index) {
  if (!table_.is_real_kind())
    throw DimensionError("this oracle does not hold real values");
  if (index >= table_.size()) throw DimensionError("point index out of range");
  charge();
  return table_.real_at(index);
}

TorusValue QueryOracle::at_torus(std::uint64_t index) {
  if (table_.kind() != Kind::Torus)
    throw DimensionError("this oracle does not hold torus values");
  if (index >= table_.size()) throw DimensionError("point index out of range");
  charge();
  return table_.torus_values()[index];
}

std::string decision_name(Decision d) {
  switch (d) {
    case Decision::Accept:
      return "accept";
    case Decision::Reject:
      return "reject";
    default:
      return "inconclusive";
  }
}

int TesterVerdict::exit_code() const {
  switch (decision) {
    case Decision::Accept:
      return 0;
    case Decision::Reject:
      return 1;
    default:
      return 2;
  }
}

TableProperty property_from_masks(int p, int m, std::set<std::uint64_t> masks) {
  const std::uint64_t points = pow_u64(p, static_cast<unsigned>(m));
  if (points > 63) throw DimensionError("mask properties need p^m <= 63");
  return [p, m, points, masks = std::move(masks)](const FunctionTable& g) {
    if (g.kind() != Kind::Boolean)
      throw DimensionError("mask properties test boolean restrictions");
    if (g.dom().p() != p || g.dom().n() != m)
      throw DimensionError("the restriction lives on the wrong space");
    std::uint64_t mask = 0;
    for (std::uint64_t y = 0; y < points; ++y)
      if (g.real_at(y) == 1.0) mask |= 1ULL << y;
    return masks.count(mask) > 0;
  };
}

TesterVerdict canonical_run(QueryOracle& oracle, int m, const TableProperty& V,
                            std::uint64_t trials, Rng& rng, int threads) {
  check_tester_kind(oracle, "canonical_run");
  const int p = oracle.dom().p();
  const int n = oracle.dom().n();
  if (m < 1 || m > n) throw DimensionError("need 1 <= m <= n");
  if (trials == 0) throw DimensionError("need at least one trial");
  if (!V) throw DimensionError("the property predicate is empty");

  const std::uint64_t points = pow_u64(p, static_cast<unsigned>(m));
  const std::uint64_t before = oracle.queries();
  const std::uint64_t master = rng.next_u64();
  std::vector<std::uint8_t> member(trials, 0);
  parallel_for(trials, threads, [&](std::uint64_t t) {
    Rng sub = Rng::for_trial(master, t);
    const AffineMap A = sample_affine_embedding(sub, p, m, n);
    member[t] = V(read_restriction(oracle, A)) ? 1 : 0;
  });

  TesterVerdict v;
  v.trials = trials;
  std::uint64_t hits = 0;
  v.transcript.reserve(trials);
  for (std::uint64_t t = 0; t < trials; ++t) {
    hits += member[t];
    v.transcript.push_back({t, member[t] ? Decision::Accept : Decision::Reject,
                            member[t] ? "restriction in V" : "restriction outside V"});
  }
  v.acceptance = static_cast<double>(hits) / static_cast<double>(trials);
  v.half_width = binomial_half_width(v.acceptance, trials);
  v.decision = v.acceptance >= 0.5 ? Decision::Accept : Decision::Reject;
  finish_counts(oracle, before, trials * points, v);
  return v;
}

TesterVerdict classical_degree_tester(QueryOracle& oracle, int d, std::uint64_t reps,
                                      Rng& rng) {
  check_tester_kind(oracle, "classical_degree_tester");
  if (oracle.kind() != Kind::Boolean && oracle.kind() != Kind::Torus)
    throw DimensionError("the degree test reads residues: boolean or torus tables");
  if (d < 0) throw DimensionError("the degree bound must be nonnegative");
  if (reps == 0) throw DimensionError("need at least one rep");
  const Domain& dom = oracle.dom();
  const int p = dom.p();
  const std::uint64_t N = dom.size();
  const unsigned order = static_cast<unsigned>(d) + 1;
  const std::uint64_t corners = 1ULL << order;

  const std::uint64_t before = oracle.queries();
  TesterVerdict v;
  v.trials = reps;
  v.transcript.reserve(reps);
  std::uint64_t zero_reps = 0;
  for (std::uint64_t rep = 0; rep < reps; ++rep) {
    const std::uint64_t x = rng.below(N);
    std::vector<std::uint64_t> dirs(order);
    for (auto& y : dirs) y = rng.below(N);
    TorusValue acc = TorusValue::zero(p);
    for (std::uint64_t maskbits = 0; maskbits < corners; ++maskbits) {
      std::uint64_t idx = x;
      for (unsigned i = 0; i < order; ++i)
        if (maskbits & (1ULL << i)) idx = dom.add(idx, dirs[i]);
      const TorusValue val = oracle.kind() == Kind::Torus
                                 ? oracle.at_torus(idx)
                                 : TorusValue::iota(p, static_cast<std::int64_t>(
                                                           oracle.at(idx)));
      acc = std::popcount(maskbits) % 2 == 0 ? acc + val : acc - val;
    }
    const bool zero = acc.is_zero();
    zero_reps += zero ? 1 : 0;
    v.transcript.push_back({rep, zero ? Decision::Accept : Decision::Reject,
                            zero ? "derivative vanished"
                                 : "derivative " + acc.str()});
  }
  v.acceptance = static_cast<double>(zero_reps) / static_cast<double>(reps);
  v.half_width = binomial_half_width(v.acceptance, reps);
  v.decision = zero_reps == reps ? Decision::Accept : Decision::Reject;
  finish_counts(oracle, before, reps * corners, v);
  return v;
}

double degree_rejection_exact(const FunctionTable& f, int d, std::uint64_t budget,
                              int threads) {
  if (f.kind() != Kind::Boolean && f.kind() != Kind::Torus)
    throw DimensionError("the degree test reads residues: boolean or torus tables");
  if (d < 0) throw DimensionError("the degree bound must be nonnegative");
  const Domain& dom = f.dom();
  const int p = dom.p();
  const std::uint64_t N = dom.size();
  const unsigned order = static_cast<unsigned>(d) + 1;
  const std::uint64_t corners = 1ULL << order;
  const std::uint64_t tuples = pow_u64(N, order + 1);
  const std::uint64_t cost = mul_sat_u64(tuples, corners);
  if (cost > budget)
    throw BudgetError("exhaustive derivative enumeration exceeds the budget", cost);

  std::vector<TorusValue> vals;
  vals.reserve(N);
  for (std::uint64_t x = 0; x < N; ++x)
    vals.push_back(f.kind() == Kind::Torus
                       ? f.torus_values()[x]
                       : TorusValue::iota(p, static_cast<std::int64_t>(f.real_at(x))));

  // one stripe per base point x; tuple counts land in disjoint slots
  std::vector<std::uint64_t> bad(N, 0);
  parallel_for(N, threads, [&](std::uint64_t x) {
    std::vector<std::uint64_t> dirs(order, 0);
    const std::uint64_t per_x = tuples / N;
    for (std::uint64_t g = 0; g < per_x; ++g) {
      std::uint64_t rest = g;
      for (unsigned i = 0; i < order; ++i) {
        dirs[i] = rest % N;
        rest /= N;
      }
      TorusValue acc = TorusValue::zero(p);
      for (std::uint64_t maskbits = 0; maskbits < corners; ++maskbits) {
        std::uint64_t idx = x;
        for (unsigned i = 0; i < order; ++i)
          if (maskbits & (1ULL << i)) idx = dom.add(idx, dirs[i]);
        acc = std::popcount(maskbits) % 2 == 0 ? acc + vals[idx] : acc - vals[idx];
      }
      if (!acc.is_zero()) ++bad[x];
    }
  });
  std::uint64_t total_bad = 0;
  for (std::uint64_t x = 0; x < N; ++x) total_bad += bad[x];
  return static_cast<double>(total_bad) / static_cast<double>(tuples);
}

TesterVerdict instance_tester(QueryOracle& oracle, const RegularityInstance& I,
                              double eps, double delta, int m,
                              std::uint64_t witness_budget, Rng& rng,
                              std::uint64_t trials, std::uint64_t drive_samples,
                              int threads) {
  check_tester_kind(oracle, "instance_tester");
  if (oracle.kind() == Kind::Torus || oracle.kind() == Kind::Signed)
    throw DimensionError("instance testing reads boolean or unit-interval tables");
  I.validate();
  const int p = oracle.dom().p();
  const int n = oracle.dom().n();
  if (I.gamma_table.p() != p) throw DimensionError("prime moduli differ");
  if (m < 1 || m > n) throw DimensionError("need 1 <= m <= n");
  if (!(eps > 0.0 && eps < 1.0)) throw DimensionError("eps must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw DimensionError("delta must lie in (0, 1)");
  if (trials == 0 || trials % 2 == 0)
    throw DimensionError("the trial count must be odd");

  const std::uint64_t points = pow_u64(p, static_cast<unsigned>(m));
  const std::uint64_t before = oracle.queries();
  const std::uint64_t master = rng.next_u64();

  TesterVerdict v;
  v.surrogate = true;
  v.trials = trials;
  v.transcript.reserve(trials);
  std::uint64_t accepts = 0;
  bool inconclusive = false;
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng sub = Rng::for_trial(master, t);
    const AffineMap A = sample_affine_embedding(sub, p, m, n);
    const FunctionTable g = read_restriction(oracle, A);

    TrialRecord rec{t, Decision::Reject, ""};
    try {
      const WitnessSearchResult res = search_witness(g, I, witness_budget, threads);
      const WitnessReport& best = *res.best;
      if (best.satisfied) {
        rec.outcome = Decision::Accept;
        rec.note = "exact witness within gamma";
      } else if (!(best.degrees_exact && best.depths_exact &&
                   best.rank_status == ClauseStatus::Pass)) {
        rec.note = "far under surrogate: no certifiable witness";
      } else if (g.kind() != Kind::Boolean) {
        rec.note = "far under surrogate: non-boolean restriction cannot be perturbed";
      } else {
        const std::optional<FunctionTable> target =
            compose_witness(I.gamma_table, best.witness, p, m);
        if (!target) throw Error("a searched witness escaped the structure domain");
        const DriveTrace trace =
            small_perturbation_drive(g, *target, delta, I.gamma, I.d, drive_samples,
                                     sub, kDefaultOpBudget, threads)
                .second;
        if (trace.reached_goal && trace.l1_moved <= delta) {
          rec.outcome = Decision::Accept;
          rec.note = "surrogate upper bound " + std::to_string(trace.l1_moved);
        } else if (trace.reached_goal) {
          rec.note =
              "far under surrogate: upper bound " + std::to_string(trace.l1_moved);
        } else {
          rec.note = "far under surrogate: drive stalled above gamma";
        }
      }
    } catch (const BudgetError& e) {
      rec.outcome = Decision::Inconclusive;
      rec.note = "witness search needs a budget of " + std::to_string(e.required);
      inconclusive = true;
    }
    accepts += rec.outcome == Decision::Accept ? 1 : 0;
    v.transcript.push_back(std::move(rec));
  }
  v.acceptance = static_cast<double>(accepts) / static_cast<double>(trials);
  v.half_width = binomial_half_width(v.acceptance, trials);
  if (accepts > trials / 2)
    v.decision = Decision::Accept;
  else if (inconclusive)
    v.decision = Decision::Inconclusive;
  else
    v.decision = Decision::Reject;
  finish_counts(oracle, before, trials * points, v);
  return v;
}

TesterVerdict amplify(const SingleRun& tester, std::uint64_t repetitions, Rng& rng) {
  if (repetitions == 0 || repetitions % 2 == 0)
    throw DimensionError("the repetition count must be odd");
  if (!tester) throw DimensionError("the base tester is empty");
  const std::uint64_t master = rng.next_u64();

  TesterVerdict v;
  std::uint64_t accepts = 0;
  bool inconclusive = false;
  std::uint64_t next_index = 0;
  for (std::uint64_t rep = 0; rep < repetitions; ++rep) {
    Rng sub = Rng::for_trial(master, rep);
    TesterVerdict one = tester(sub);
    accepts += one.decision == Decision::Accept ? 1 : 0;
    inconclusive = inconclusive || one.decision == Decision::Inconclusive;
    v.queries += one.queries;
    v.trials += one.trials;
    v.surrogate = v.surrogate || one.surrogate;
    for (TrialRecord& rec : one.transcript) {
      rec.index = next_index++;
      v.transcript.push_back(std::move(rec));
    }
  }
  v.acceptance = static_cast<double>(accepts) / static_cast<double>(repetitions);
  v.half_width = binomial_half_width(v.acceptance, repetitions);
  if (inconclusive)
    v.decision = Decision::Inconclusive;
  else
    v.decision = accepts > repetitions / 2 ? Decision::Accept : Decision::Reject;
  return v;
}

std::uint64_t repetitions_for_majority(double single_fail, double target) {
  if (!(single_fail > 0.0 && single_fail < 0.5))
    throw DimensionError("majority voting amplifies error rates below 1/2");
  if (!(target > 0.0 && target < 1.0)) throw DimensionError("target must lie in (0, 1)");
  if (single_fail <= target) return 1;
  for (std::uint64_t reps = 1; reps <= 10001; reps += 2)
    if (majority_failure(reps, single_fail) <= target) return reps;
  throw Error("repetition search exceeded 10001; loosen the target");
}

TesterVerdict family_tester(QueryOracle& oracle,
                            const std::vector<RegularityInstance>& family, double eps,
                            int m, std::uint64_t witness_budget, Rng& rng,
                            std::uint64_t drive_samples, int threads) {
  if (family.empty()) throw DimensionError("the family must be nonempty");
  if (!(eps > 0.0 && eps < 1.0)) throw DimensionError("eps must lie in (0, 1)");
  const double delta = eps / 4.0;
  const double fail_budget = 1.0 / (3.0 * static_cast<double>(family.size()));
  const std::uint64_t reps = repetitions_for_majority(1.0 / 3.0, fail_budget);
  const std::uint64_t master = rng.next_u64();

  TesterVerdict v;
  v.surrogate = true;
  std::uint64_t accepted = 0;
  bool inconclusive = false;
  for (std::size_t i = 0; i < family.size(); ++i) {
    Rng sub = Rng::for_trial(master, i);
    const TesterVerdict one = amplify(
        [&](Rng& r) {
          return instance_tester(oracle, family[i], eps, delta, m, witness_budget, r,
                                 1, drive_samples, threads);
        },
        reps, sub);
    v.queries += one.queries;
    v.trials += one.trials;
    v.transcript.push_back({i, one.decision,
                            "instance " + std::to_string(i) + ": " +
                                decision_name(one.decision) + " over " +
                                std::to_string(reps) + " repetitions"});
    accepted += one.decision == Decision::Accept ? 1 : 0;
    inconclusive = inconclusive || one.decision == Decision::Inconclusive;
    if (one.decision == Decision::Accept) break;
  }
  v.acceptance =
      static_cast<double>(accepted) / static_cast<double>(v.transcript.size());
  v.half_width = 0.0;
  if (accepted > 0)
    v.decision = Decision::Accept;
  else if (inconclusive)
    v.decision = Decision::Inconclusive;
  else
    v.decision = Decision::Reject;
  return v;
}

std::vector<RegularityInstance> low_degree_family(int p, int d, double gamma) {
  if (d < 1) throw DimensionError("the degree bound must be at least 1");
  if (!(gamma > 0.0)) throw DimensionError("gamma must be positive");
  std::vector<RegularityInstance> family;
  family.reserve(static_cast<std::size_t>(p + d));
  for (int c = 0; c < p; ++c) {
    RegularityInstance I;
    I.gamma = gamma;
    I.gamma_table =
        GammaTable::constant(p, {}, static_cast<double>(c) / static_cast<double>(p - 1));
    I.d = 1;
    family.push_back(std::move(I));
  }
  std::vector<double> residue(static_cast<std::size_t>(p));
  for (int c = 0; c < p; ++c)
    residue[static_cast<std::size_t>(c)] =
        static_cast<double>(c) / static_cast<double>(p - 1);
  for (int k = 1; k <= d; ++k) {
    RegularityInstance I;
    I.gamma = gamma;
    I.gamma_table = GammaTable(p, {0}, residue);
    I.d = k + 1;
    I.degrees = {k};
    I.depths = {0};
    family.push_back(std::move(I));
  }
  return family;
}

}  // namespace hofa
