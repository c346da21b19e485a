#ifndef HOFA_POLYNOMIAL_HPP
#define HOFA_POLYNOMIAL_HPP

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hofa/field.hpp"
#include "hofa/torus.hpp"

namespace hofa {

// Polynomial F_p^n -> R/Z in canonical monomial form
//
//   P(x) = sum_d  alpha_d * |x_1|^{d_1} ... |x_n|^{d_n}   (mod 1)
//
// over exponent vectors d with 0 <= d_i < p, d != 0, where alpha_d is a torus
// value with p-power denominator. The base-p digits of alpha_d are the usual
// per-level coefficients: the digit at denominator p^(h+1) carries degree
// sum(d_i) + h(p-1). The constant shift is fixed to zero throughout, so the
// zero polynomial is the only constant one. Representation is unique.
class NcPolynomial {
public:
  NcPolynomial(int p, int n);

  int p() const { return p_; }
  int n() const { return n_; }
  const std::map<std::vector<std::uint8_t>, TorusValue>& coeffs() const { return coeffs_; }

  // Sets the full torus coefficient of one monomial; zero erases it.
  void set_coeff(std::span<const std::uint8_t> exps, const TorusValue& alpha);
  TorusValue coeff(std::span<const std::uint8_t> exps) const;

  bool is_zero() const { return coeffs_.empty(); }
  TorusValue evaluate(std::span<const std::uint8_t> x) const;
  std::vector<TorusValue> evaluate_table(std::uint64_t cell_budget = kDefaultCellBudget) const;

  // Largest degree over stored monomial digits; (0, 0) for the zero polynomial.
  int degree() const;
  // Largest h with a nonzero digit at denominator p^(h+1); 0 for zero.
  int depth() const;

  NcPolynomial operator+(const NcPolynomial& o) const;
  NcPolynomial operator-(const NcPolynomial& o) const;
  // lambda * P; scaling by p lowers every monomial's depth by one.
  NcPolynomial scaled(std::int64_t lambda) const;
  // Shift-free part of P(A(x)) on the map's source space (table + refit).
  // The constant P(A(0)) is dropped; it does not affect degree or depth.
  NcPolynomial compose_affine(const AffineMap& A,
                              std::uint64_t cell_budget = kDefaultCellBudget) const;

  bool operator==(const NcPolynomial& o) const;
  bool operator!=(const NcPolynomial& o) const { return !(*this == o); }

  // Term-list text, e.g. "1 * x1^1*x2^1 / 2 + 3 * x1^1 / 4"; "0" when zero.
  std::string str() const;
  static NcPolynomial parse(int p, int n, std::string_view text);

private:
  int p_;
  int n_;
  std::map<std::vector<std::uint8_t>, TorusValue> coeffs_;
};

// Additive directional difference of a value table: (DT)[x] = T[x+h] - T[x].
std::vector<TorusValue> additive_derivative(const Domain& dom,
                                            std::span<const TorusValue> table,
                                            std::span<const std::uint8_t> h);

// Exact fit of a table to canonical form. Throws ShiftError when the value at
// 0 is nonzero (constant shifts are outside the representable family).
NcPolynomial interpolate(int p, int n, std::span<const TorusValue> table);

// Smallest d such that every (d+1)-fold additive difference of the table
// vanishes, checked exhaustively; the reference oracle for degree().
int degree_by_differences(const Domain& dom, std::span<const TorusValue> table,
                          int max_degree, std::uint64_t op_budget = kDefaultOpBudget);

// The family of all canonical polynomials on F_p^n of degree <= max_degree,
// enumerable by index in a fixed order (index 0 is the zero polynomial).
class PolynomialFamily {
public:
  PolynomialFamily(int p, int n, int max_degree, std::uint64_t budget = kDefaultOpBudget);

  std::uint64_t size() const { return size_; }
  NcPolynomial at(std::uint64_t index) const;
  int p() const { return p_; }
  int n() const { return n_; }
  int max_degree() const { return max_degree_; }

private:
  int p_;
  int n_;
  int max_degree_;
  std::uint64_t size_;
  std::vector<std::vector<std::uint8_t>> monomials_;  // admissible exponent vectors
  std::vector<int> levels_;  // per monomial: max depth h admitted by the degree cap
};

// All polynomials with degree exactly `degree` and depth exactly `depth`.
std::vector<NcPolynomial> exact_degree_family(int p, int n, int degree, int depth,
                                              std::uint64_t budget = kDefaultOpBudget);

}  // namespace hofa

#endif
