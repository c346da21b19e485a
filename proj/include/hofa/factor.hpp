#ifndef HOFA_FACTOR_HPP
#define HOFA_FACTOR_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hofa/polynomial.hpp"
#include "hofa/table.hpp"

namespace hofa {

// Joint value of the defining polynomials at one point.
using AtomLabel = std::vector<TorusValue>;

std::string label_str(const AtomLabel& label);

// Partition of F_p^n into level sets of a polynomial sequence P_1..P_C.
// Order = prod_i p^(h_i+1) counts all conceivable labels; the number of
// nonempty atoms never exceeds it and attains p^n at most.
class PolyFactor {
public:
  PolyFactor(int p, int n);  // trivial factor: one atom, order 1
  explicit PolyFactor(std::vector<NcPolynomial> polys,
                      std::uint64_t cell_budget = kDefaultCellBudget);

  int p() const { return p_; }
  int n() const { return n_; }
  const Domain& dom() const { return dom_; }
  std::uint64_t complexity() const { return polys_.size(); }
  std::uint64_t order() const { return order_; }
  const std::vector<NcPolynomial>& polys() const { return polys_; }
  const std::vector<int>& degrees() const { return degrees_; }
  const std::vector<int>& depths() const { return depths_; }

  // Dense mixed-radix code of the atom containing each point; codes are
  // consistent with label_of_code in radix p^(h_i+1) per slot, slot 1 fastest.
  std::uint64_t atom_code(std::uint64_t index) const { return codes_[index]; }
  const std::vector<std::uint64_t>& codes() const { return codes_; }

  AtomLabel atom_of(std::span<const std::uint8_t> x) const;
  AtomLabel label_of_code(std::uint64_t code) const;

private:
  int p_;
  int n_;
  Domain dom_;
  std::vector<NcPolynomial> polys_;
  std::vector<int> degrees_;
  std::vector<int> depths_;
  std::vector<std::uint64_t> radices_;  // p^(h_i+1)
  std::vector<std::uint64_t> codes_;
  std::uint64_t order_;
};

// Atom-wise averaging projection. Boolean input widens to a unit table; torus
// tables are rejected. The result is measurable and mean-preserving.
FunctionTable conditional_expectation(const FunctionTable& f, const PolyFactor& B);

// Function from conceivable atom labels of a depth signature to [0,1], stored
// dense by atom code in the same mixed-radix convention as PolyFactor.
class GammaTable {
public:
  // C = 0 constant 0 on the unique empty label
  GammaTable() : GammaTable(2, {}, {0.0}) {}
  GammaTable(int p, std::vector<int> depths, std::vector<double> values);
  static GammaTable constant(int p, std::vector<int> depths, double value);
  // C = 1 map sending the label j / p^(depth+1) to that number in [0,1).
  static GammaTable identity(int p, int depth);

  int p() const { return p_; }
  std::uint64_t complexity() const { return depths_.size(); }
  const std::vector<int>& depths() const { return depths_; }
  std::uint64_t order() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }

  double at_code(std::uint64_t code) const;
  double at_label(const AtomLabel& label) const;
  AtomLabel label_of_code(std::uint64_t code) const;

private:
  int p_;
  std::vector<int> depths_;
  std::vector<std::uint64_t> radices_;
  std::vector<double> values_;
};

// Gamma(P_1(x), ..., P_C(x)) as a unit table; depth signatures must agree.
FunctionTable compose_gamma(const GammaTable& G, const PolyFactor& B);

enum class Refinement { Syntactic, Semantic, Neither };

// Whether fine's atoms determine coarse's atoms: by defining-sequence prefix
// (syntactic) or by an exhaustive scan of the atom maps (semantic).
Refinement refinement_relation(const PolyFactor& fine, const PolyFactor& coarse);

struct RankWitness {
  std::vector<NcPolynomial> decomposition;   // Q_1..Q_r
  std::map<std::string, TorusValue> gamma;   // joint-label -> value
};

// Outcome of a budgeted rank search. Exact settles the minimum; Infinite is
// the order-1 non-constant case; AtMost carries a witness without ruling out
// smaller ones; AtLeast proves a lower bound after an exhausted search;
// Inconclusive names the budget the search would have needed.
struct RankReport {
  enum class Kind { Exact, Infinite, AtMost, AtLeast, Inconclusive };
  Kind kind = Kind::Inconclusive;
  int r = 0;
  std::uint64_t required_budget = 0;
  std::optional<RankWitness> witness;
  std::optional<std::vector<std::uint64_t>> lambda;

  // True when the report proves rank >= need.
  bool proves_at_least(int need) const;
  std::string str() const;
};

bool verify_rank_witness(const NcPolynomial& P, const RankWitness& w,
                         std::uint64_t cell_budget = kDefaultCellBudget);

// Smallest r such that P is a function of r polynomials of degree <= d-1,
// searched exhaustively over tuples from the full canonical family. Order 1
// is settled without search: 0 for the zero polynomial, infinity otherwise.
RankReport rank_d_search(const NcPolynomial& P, int d, int r_max,
                         std::uint64_t budget = kDefaultOpBudget, int threads = 1);

// Factor rank: minimum over nonzero canonical combinations lambda of the
// d_lambda-rank of sum_i lambda_i P_i, with d_lambda the largest degree among
// the scaled summands. Exact only when every inner search settled.
RankReport factor_rank_search(const PolyFactor& B, int r_max,
                              std::uint64_t budget = kDefaultOpBudget, int threads = 1);

struct AtomDistribution {
  std::uint64_t order = 0;
  std::uint64_t points = 0;
  std::vector<std::pair<std::string, std::uint64_t>> nonempty;  // label -> count
  double max_deviation = 0.0;  // vs the equidistributed 1/order, empties included
};

AtomDistribution atom_distribution_report(const PolyFactor& B);

struct StabilityReport {
  int trials = 0;
  double degree_drop = 0.0;  // fraction of embeddings dropping some degree
  double depth_drop = 0.0;
  double rank_drop = 0.0;
  bool rank_conclusive = true;
};

// Frequencies of degree/depth/rank loss of the restricted factor under random
// affine embeddings of F_p^m.
StabilityReport embedding_stability_report(const PolyFactor& B, int m, int trials,
                                           Rng& rng, int r_max = 3,
                                           std::uint64_t budget = kDefaultOpBudget);

enum class ClauseStatus { Pass, Fail, Inconclusive };

struct DecompositionReport {
  struct Clause {
    std::string name;
    ClauseStatus status;
    double measured;
  };
  std::vector<Clause> clauses;
  bool all_pass = false;
};

// Checks a claimed decomposition f = f1 + f2 + f3 clause by clause:
// pointwise sum, f1 = E[f|B1], ||f2||_2 < zeta (mean of squares), the order
// d+1 norm of f3 < eta, ranges of f1 and f1+f3 in [0,1], and a budgeted
// factor-rank bound >= r_required. Reports, never throws on a failed clause.
DecompositionReport validate_decomposition(const FunctionTable& f, const FunctionTable& f1,
                                           const FunctionTable& f2, const FunctionTable& f3,
                                           const PolyFactor& B1, int d, double zeta,
                                           double eta_value, int r_required,
                                           std::uint64_t budget = kDefaultOpBudget,
                                           int threads = 1);

}  // namespace hofa

#endif
