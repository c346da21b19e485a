#ifndef HOFA_FORMS_HPP
#define HOFA_FORMS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hofa/factor.hpp"

namespace hofa {

// Linear form L(x_1..x_m) = sum l_i x_i with coefficients mod p.
struct LinearForm {
  std::vector<std::uint8_t> coeffs;

  std::size_t arity() const { return coeffs.size(); }
  std::string str() const;  // "1,0,1"
  bool operator==(const LinearForm& o) const { return coeffs == o.coeffs; }
};

// Parse ";"-separated forms, e.g. "1,0;0,1;1,1". All must share one arity.
std::vector<LinearForm> parse_forms(int p, const std::string& text);

// Index of L(x) for points given by their domain indices.
std::uint64_t apply_form(const Domain& dom, const LinearForm& L,
                         std::span<const std::uint64_t> points);

// The lambda tuples annihilating (P(L_1(x)), ..., P(L_l(x))) for every
// polynomial of degree exactly d and depth exactly h on n_check variables.
// Certification is relative to n_check and recorded as such.
struct DependencySet {
  int p = 2;
  int d = 1;
  int h = 0;
  int n_check = 2;
  std::vector<LinearForm> forms;
  std::vector<std::vector<std::uint64_t>> lambdas;  // lexicographic, entries < p^(h+1)

  std::uint64_t modulus() const;  // p^(h+1)
  // Exact count of scalar consistent tuples, p^((h+1)l) / |lambdas|.
  std::uint64_t consistent_count() const;
};

DependencySet dependency_set(int p, const std::vector<LinearForm>& forms, int d, int h,
                             int n_check = 2, std::uint64_t budget = kDefaultOpBudget,
                             int threads = 1);

// Scalar consistency: b_i lies in U_{h+1} and every lambda annihilates b.
bool is_consistent(const std::vector<TorusValue>& b, const DependencySet& dep,
                   std::string* reason = nullptr);

// Atom-label consistency, checked coordinate-wise against per-slot sets.
bool is_consistent(const std::vector<AtomLabel>& b, const std::vector<DependencySet>& deps,
                   std::string* reason = nullptr);

struct ConsistentSet {
  std::vector<DependencySet> deps;              // one per polynomial slot
  std::vector<std::vector<AtomLabel>> tuples;   // each entry: one label per form
  std::uint64_t conceivable = 0;                // order^l
};

// All label sequences consistent with the forms, enumerated per slot and
// combined; the count obeys conceivable = tuples.size() * prod |lambdas_i|.
ConsistentSet enumerate_consistent(int p, const std::vector<LinearForm>& forms,
                                   const std::vector<int>& degrees,
                                   const std::vector<int>& depths, int n_check = 2,
                                   std::uint64_t budget = kDefaultOpBudget);

struct EquidistReport {
  std::uint64_t order = 0;
  std::size_t ell = 0;
  double formula = 0.0;              // prod |lambdas_i| / order^l
  std::uint64_t consistent_count = 0;
  double max_deviation = 0.0;        // over every consistent tuple
  double inconsistent_mass = 0.0;    // observed mass off the consistent set
  bool exact = true;
  std::uint64_t samples = 0;
};

// Joint distribution of the atoms at (L_1(x), ..., L_l(x)) against the
// equidistribution formula. Pass rng for sampling mode, nullptr for exact.
EquidistReport equidistribution_report(const PolyFactor& B,
                                       const std::vector<LinearForm>& forms, Rng* rng,
                                       std::uint64_t trials, int n_check = 2,
                                       std::uint64_t budget = kDefaultOpBudget);

struct TransferReport {
  double value = 0.0;
  bool via_tv = false;  // domains differed; distributional comparison used
  int m = 0;            // subspace dimension behind the tv surrogate
};

// Gowers norm of Gamma(P) - Gamma(Q) when the factors share a domain; for
// different ambient dimensions the comparison falls back to the total
// variation between the order-d restriction distributions.
TransferReport gamma_transfer_report(const GammaTable& G, const PolyFactor& P,
                                     const PolyFactor& Q, int d,
                                     std::uint64_t budget = kDefaultOpBudget,
                                     int threads = 1);

}  // namespace hofa

#endif
