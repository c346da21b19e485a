#ifndef HOFA_INSTANCE_HPP
#define HOFA_INSTANCE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hofa/factor.hpp"
#include "hofa/forms.hpp"
#include "hofa/gowers.hpp"

namespace hofa {

// Distribution over boolean tables on F_p^m, each table encoded as a bitmask
// over the p^m points in canonical order (p^m <= 63).
struct RestrictionDistribution {
  int p = 2;
  int m = 1;
  bool exact = true;
  std::uint64_t samples = 0;  // 0 in exact mode
  std::map<std::uint64_t, double> mass;

  std::uint64_t points() const;  // p^m
  double total() const;
  std::string table_str(std::uint64_t bits) const;  // e.g. "0110"
};

// Distribution of the pullback f(A(x)) over uniform affine embeddings A of
// F_p^m, with unit-interval tables rounded per point by independent Bernoulli
// draws. Exact mode enumerates every embedding and integrates the rounding
// analytically; sampling mode draws embeddings and roundings.
RestrictionDistribution restriction_distribution(const FunctionTable& f, int m,
                                                 Rng* rng = nullptr,
                                                 std::uint64_t trials = 0,
                                                 std::uint64_t budget = kDefaultOpBudget);

// Half the L1 distance between two distributions on the same table space.
double tv_distance(const RestrictionDistribution& a, const RestrictionDistribution& b);

// Structure side of an instance: error bound, structure function, complexity,
// uniformity order, exact degree/depth signature, optional rank demand.
struct RegularityInstance {
  double gamma = 0.1;
  GammaTable gamma_table;
  int d = 2;
  std::vector<int> degrees;
  std::vector<int> depths;
  std::optional<int> rank;  // absent: rank-oblivious

  std::uint64_t complexity() const { return gamma_table.complexity(); }
  // max(1/gamma, C, d, r)
  double complexity_measure() const;
  // Enforces gamma > 0, d_i < d, h_i < d_i, and signature agreement.
  void validate() const;
  // Non-fatal advisories, e.g. depths below the canonical-form ceiling.
  std::vector<std::string> lint() const;
};

// Candidate structure sequence. Each slot is a shift-free polynomial plus a
// constant shift in U_{h_i+1}: shifts never change degree, depth, or rank,
// but the label fed to the structure function is P_i(x) + s_i.
struct PolySequenceWitness {
  std::vector<NcPolynomial> polys;
  std::vector<TorusValue> shifts;  // empty means all-zero

  PolyFactor factor(int p, int n) const;  // of the shift-free parts
  TorusValue shift(std::size_t i) const;
};

// Gamma(P_1 + s_1, ..., P_C + s_C) as a unit-interval table on F_p^n, or
// nullopt when some slot's polynomial depth or shift escapes the structure
// function's label domain.
std::optional<FunctionTable> compose_witness(const GammaTable& G,
                                             const PolySequenceWitness& w, int p, int n);

enum class RankEvidence { Searched, Asserted };

struct WitnessReport {
  PolySequenceWitness witness;
  bool degrees_exact = false;
  bool depths_exact = false;
  ClauseStatus rank_status = ClauseStatus::Inconclusive;
  RankEvidence rank_evidence = RankEvidence::Searched;
  RankReport rank_report;
  std::optional<FunctionTable> residual;  // f - Gamma(P + s), signed; f recomposes exactly
  GowersEstimate residual_norm;           // of the residual at order d
  double residual_l1 = 0.0;
  bool gowers_within_gamma = false;
  bool satisfied = false;  // all clauses pass
};

// Evaluates every satisfaction clause against a candidate witness: exact
// degrees and depths, rank demand (searched or asserted), and the Gowers
// residual. Reports rather than throws on clause failures.
WitnessReport witness_check(const FunctionTable& f, const RegularityInstance& I,
                            const PolySequenceWitness& witness,
                            std::optional<int> asserted_rank = std::nullopt,
                            std::uint64_t budget = kDefaultOpBudget, int threads = 1);

// Enumerates degree- and depth-bounded polynomial tuples with per-slot
// constant shifts folded into the structure function, and returns the witness
// with the smallest exact Gowers residual; exactness of degrees and depths is
// reported per clause, not filtered from the search. Absence of a satisfied
// witness under this budget never refutes satisfaction.
struct WitnessSearchResult {
  std::optional<WitnessReport> best;
  std::uint64_t tuples_tried = 0;
  bool exhausted = false;  // the whole family product was scanned
};

WitnessSearchResult search_witness(const FunctionTable& f, const RegularityInstance& I,
                                   std::uint64_t budget = kDefaultOpBudget, int threads = 1);

// One two-coin perturbation pass toward a unit-interval target table: keep
// f(x) with probability 1-delta, else redraw 1 with probability target(x).
// Points are visited in index order; a redrawn point consumes exactly two
// uniforms, a kept point exactly one, so the draw sequence is reproducible.
FunctionTable perturb_toward_structure(const FunctionTable& f, const FunctionTable& target,
                                       double delta, Rng& rng);

struct DriveTrace {
  std::uint64_t sampled = 0;   // perturbations drawn overall
  std::uint64_t accepted = 0;  // rounds that passed both gates
  std::vector<double> norms;   // Gowers norm after each accepted round
  double l1_moved = 0.0;       // ||f - g||_1 at the end
  bool reached_goal = false;
};

// Repeated accept/reject perturbation rounds toward a unit-interval target:
// a sample is accepted when it keeps the per-round ||g - h||_1 <= 2 delta and
// contracts ||h - target||_{U^d} by the factor (1 - delta/3); stops once the
// norm reaches gamma_goal or max_samples perturbations have been drawn.
// trace.norms holds the starting norm followed by one entry per accepted round.
std::pair<FunctionTable, DriveTrace> small_perturbation_drive(
    const FunctionTable& f, const FunctionTable& target, double delta,
    double gamma_goal, int d, std::uint64_t max_samples, Rng& rng,
    std::uint64_t budget = kDefaultOpBudget, int threads = 1);

// mu_{I,m}: uniform over consistent atom assignments on the p^m evaluation
// forms (the equidistribution limit), pushed through per-point Bernoulli
// rounding by Gamma.
RestrictionDistribution instance_distribution(const RegularityInstance& I, int m,
                                              int n_check = 2,
                                              std::uint64_t budget = kDefaultOpBudget);

}  // namespace hofa

#endif
