#ifndef HOFA_TABLE_HPP
#define HOFA_TABLE_HPP

#include <complex>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "hofa/field.hpp"
#include "hofa/polynomial.hpp"
#include "hofa/torus.hpp"

namespace hofa {

enum class Kind { Boolean, Unit, Signed, Torus, Complex };

std::string kind_name(Kind k);
Kind parse_kind(const std::string& name);

// Dense function F_p^n -> values in canonical point order. Real-valued kinds
// share double storage; torus tables stay exact.
class FunctionTable {
public:
  static FunctionTable boolean(int p, int n, std::vector<double> vals);
  static FunctionTable unit(int p, int n, std::vector<double> vals);
  static FunctionTable signed_(int p, int n, std::vector<double> vals);
  static FunctionTable complex_(int p, int n, std::vector<std::complex<double>> vals);
  static FunctionTable torus(int p, int n, std::vector<TorusValue> vals);
  static FunctionTable constant(int p, int n, Kind kind, double value);

  Kind kind() const { return kind_; }
  const Domain& dom() const { return dom_; }
  std::uint64_t size() const { return dom_.size(); }
  bool is_real_kind() const {
    return kind_ == Kind::Boolean || kind_ == Kind::Unit || kind_ == Kind::Signed;
  }

  const std::vector<double>& real() const;
  const std::vector<std::complex<double>>& cplx() const;
  const std::vector<TorusValue>& torus_values() const;
  double real_at(std::uint64_t i) const { return real()[i]; }

  // Lift to complex values; torus kind is rejected (take a phase first).
  std::vector<std::complex<double>> to_complex() const;

private:
  FunctionTable(int p, int n, Kind kind);
  Kind kind_;
  Domain dom_;
  std::variant<std::vector<double>, std::vector<std::complex<double>>,
               std::vector<TorusValue>>
      values_;
};

// e(P) = exp(2 pi i P(x)) as a complex table.
FunctionTable phase_table(const FunctionTable& torus_table);
FunctionTable phase_of_poly(const NcPolynomial& P,
                            std::uint64_t cell_budget = kDefaultCellBudget);

// Pullback f(A(x)) on the map's source space; all kinds.
FunctionTable restrict_table(const FunctionTable& f, const AffineMap& A);

// Pointwise difference; real kinds give a signed table, complex stays complex.
FunctionTable table_sub(const FunctionTable& a, const FunctionTable& b);

// Independent per-point Bernoulli rounding of a unit-interval table.
FunctionTable bernoulli_round(const FunctionTable& f, Rng& rng);

// Multiplicative directional derivative f(x+h) * conj(f(x)), complex output.
FunctionTable mult_derivative(const FunctionTable& f, std::span<const std::uint8_t> h);

// Mean absolute value, mean squared absolute value (no root), max absolute
// value. The squared-mean convention for the middle one is deliberate.
double norm_l1(const FunctionTable& f);
double norm_l2(const FunctionTable& f);
double norm_linf(const FunctionTable& f);

}  // namespace hofa

#endif
