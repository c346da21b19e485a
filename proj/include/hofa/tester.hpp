#ifndef HOFA_TESTER_HPP
#define HOFA_TESTER_HPP

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hofa/instance.hpp"
#include "hofa/table.hpp"

namespace hofa {

// Query-counted access to a function table. Every point request bumps the
// counter, repeated requests for the same point included; a request that
// would pass the cap throws QueryCapError before reading, so the counter
// never exceeds the cap. Safe to share across trial threads: the counter is
// atomic and additive, making the final count order-independent.
class QueryOracle {
public:
  explicit QueryOracle(FunctionTable f, std::optional<std::uint64_t> cap = std::nullopt);

  const Domain& dom() const { return table_.dom(); }
  Kind kind() const { return table_.kind(); }
  std::optional<std::uint64_t> cap() const { return cap_; }
  std::uint64_t queries() const { return count_.load(std::memory_order_relaxed); }

  double at(std::uint64_t index);            // real-valued kinds
  TorusValue at_torus(std::uint64_t index);  // torus kind

private:
  void charge();
  FunctionTable table_;
  std::optional<std::uint64_t> cap_;
  std::atomic<std::uint64_t> count_{0};
};

enum class Decision { Accept, Reject, Inconclusive };
std::string decision_name(Decision d);

struct TrialRecord {
  std::uint64_t index = 0;
  Decision outcome = Decision::Inconclusive;
  std::string note;
};

struct TesterVerdict {
  Decision decision = Decision::Inconclusive;
  std::uint64_t queries = 0;  // consumed by this run
  std::uint64_t trials = 0;
  std::vector<TrialRecord> transcript;
  double acceptance = 0.0;  // estimated acceptance probability
  double half_width = 0.0;
  bool surrogate = false;  // closeness decided by the perturbation surrogate

  int exit_code() const;  // 0 accept, 1 reject, 2 inconclusive
};

// Membership test for restricted tables on F_p^m. Runs concurrently when a
// tester is given threads > 1.
using TableProperty = std::function<bool(const FunctionTable&)>;

// Membership in an explicit set of boolean tables, each encoded as a bitmask
// over the p^m points in canonical order (the RestrictionDistribution
// encoding; p^m <= 63). Rejects non-boolean restrictions.
TableProperty property_from_masks(int p, int m, std::set<std::uint64_t> masks);

// Canonical tester: per trial samples an affine embedding of F_p^m, reads f
// on its image (exactly p^m queries) and tests membership of the restriction
// in V; accepts when the member fraction reaches 1/2.
TesterVerdict canonical_run(QueryOracle& oracle, int m, const TableProperty& V,
                            std::uint64_t trials, Rng& rng, int threads = 1);

// One-sided degree test: per rep draws x, y_1..y_{d+1} uniformly and takes
// the alternating sum of iota(f) over the 2^{d+1} subset sums (that many
// queries per rep); any nonzero value rejects. Tables of classical degree-d
// polynomials pass every rep. Boolean tables are read as residues through
// iota; torus tables are used as given.
TesterVerdict classical_degree_tester(QueryOracle& oracle, int d, std::uint64_t reps,
                                      Rng& rng);

// Exact per-rep rejection probability of the degree test: the fraction of
// all (x, y_1..y_{d+1}) tuples with a nonzero derivative.
double degree_rejection_exact(const FunctionTable& f, int d,
                              std::uint64_t budget = kDefaultOpBudget, int threads = 1);

// Restriction-based instance tester. Per trial (odd count, majority vote):
// embed F_p^m, materialize the restriction with exactly p^m queries, and
// decide delta-closeness by the documented surrogate: exact witness search,
// then for boolean restrictions a perturbation drive toward the best witness
// whose degree, depth, and rank clauses pass; the drive's L1 movement upper
// bounds the true distance, so accepts are sound while rejects mean
// far-under-surrogate. The verdict's surrogate flag is always set. A witness
// search that exhausts witness_budget yields Inconclusive, not Reject.
TesterVerdict instance_tester(QueryOracle& oracle, const RegularityInstance& I,
                              double eps, double delta, int m,
                              std::uint64_t witness_budget, Rng& rng,
                              std::uint64_t trials = 1,
                              std::uint64_t drive_samples = 200, int threads = 1);

// One independently seeded run of a base tester.
using SingleRun = std::function<TesterVerdict(Rng&)>;

// Majority vote over an odd number of repetitions; transcripts concatenate
// in order (re-indexed), query counts and trial counts add, and the
// acceptance estimate is the accepting fraction of repetitions. Any
// inconclusive repetition makes the vote inconclusive.
TesterVerdict amplify(const SingleRun& tester, std::uint64_t repetitions, Rng& rng);

// Smallest odd repetition count whose majority vote is wrong with
// probability at most target, assuming each run errs with probability
// single_fail < 1/2 (exact binomial tail).
std::uint64_t repetitions_for_majority(double single_fail, double target);

// Family driver with delta fixed to eps/4: every instance gets an amplified
// distinguisher whose failure budget is 1/(3 |family|) under the assumed 1/3
// single-run error. Accepts on the first instance reported close; rejects
// when every instance reports far; any inconclusive constituent without an
// accept makes the verdict inconclusive. The transcript holds one record per
// instance examined, and the acceptance estimate is the accepted fraction of
// those.
TesterVerdict family_tester(QueryOracle& oracle,
                            const std::vector<RegularityInstance>& family, double eps,
                            int m, std::uint64_t witness_budget, Rng& rng,
                            std::uint64_t drive_samples = 200, int threads = 1);

// The classical low-degree property as instances: one structure-free
// constant instance per residue value c/(p-1) plus, for 1 <= k <= d, a
// rank-oblivious instance whose structure function rescales the label c/p to
// c/(p-1). Boolean tables of classical degree-k polynomials then decompose
// exactly through the k-th instance. Constants cannot share one instance
// because slot degrees must be at least 1, so the family has p + d members.
std::vector<RegularityInstance> low_degree_family(int p, int d, double gamma);

}  // namespace hofa

#endif
