#include "hofa/table.hpp"

#include <cmath>

namespace hofa {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

std::string kind_name(Kind k) {
  switch (k) {
    case Kind::Boolean: return "boolean";
    case Kind::Unit: return "unit";
    case Kind::Signed: return "signed";
    case Kind::Torus: return "torus";
    case Kind::Complex: return "complex";
  }
  return "?";
}

Kind parse_kind(const std::string& name) {
  if (name == "boolean") return Kind::Boolean;
  if (name == "unit") return Kind::Unit;
  if (name == "signed") return Kind::Signed;
  if (name == "torus") return Kind::Torus;
  if (name == "complex") return Kind::Complex;
  throw ParseError("unknown table kind '" + name + "'");
}

FunctionTable::FunctionTable(int p, int n, Kind kind) : kind_(kind), dom_(p, n) {}

FunctionTable FunctionTable::boolean(int p, int n, std::vector<double> vals) {
  FunctionTable t(p, n, Kind::Boolean);
  if (vals.size() != t.dom_.size()) throw DimensionError("table size mismatch");
  for (double v : vals)
    if (v != 0.0 && v != 1.0) throw DimensionError("boolean table entries must be 0 or 1");
  t.values_ = std::move(vals);
  return t;
}

FunctionTable FunctionTable::unit(int p, int n, std::vector<double> vals) {
  FunctionTable t(p, n, Kind::Unit);
  if (vals.size() != t.dom_.size()) throw DimensionError("table size mismatch");
  for (double v : vals)
    if (!(v >= 0.0 && v <= 1.0)) throw DimensionError("unit table entries must lie in [0,1]");
  t.values_ = std::move(vals);
  return t;
}

FunctionTable FunctionTable::signed_(int p, int n, std::vector<double> vals) {
  FunctionTable t(p, n, Kind::Signed);
  if (vals.size() != t.dom_.size()) throw DimensionError("table size mismatch");
  for (double v : vals)
    if (!(v >= -1.0 && v <= 1.0)) throw DimensionError("signed table entries must lie in [-1,1]");
  t.values_ = std::move(vals);
  return t;
}

FunctionTable FunctionTable::complex_(int p, int n, std::vector<std::complex<double>> vals) {
  FunctionTable t(p, n, Kind::Complex);
  if (vals.size() != t.dom_.size()) throw DimensionError("table size mismatch");
  t.values_ = std::move(vals);
  return t;
}

FunctionTable FunctionTable::torus(int p, int n, std::vector<TorusValue> vals) {
  FunctionTable t(p, n, Kind::Torus);
  if (vals.size() != t.dom_.size()) throw DimensionError("table size mismatch");
  for (const auto& v : vals)
    if (v.p() != p) throw DimensionError("torus entry prime mismatch");
  t.values_ = std::move(vals);
  return t;
}

FunctionTable FunctionTable::constant(int p, int n, Kind kind, double value) {
  Domain dom(p, n);
  std::vector<double> vals(dom.size(), value);
  switch (kind) {
    case Kind::Boolean: return boolean(p, n, std::move(vals));
    case Kind::Unit: return unit(p, n, std::move(vals));
    case Kind::Signed: return signed_(p, n, std::move(vals));
    default: throw DimensionError("constant() supports real kinds only");
  }
}

const std::vector<double>& FunctionTable::real() const {
  if (!is_real_kind()) throw DimensionError("table is not real-valued");
  return std::get<std::vector<double>>(values_);
}

const std::vector<std::complex<double>>& FunctionTable::cplx() const {
  if (kind_ != Kind::Complex) throw DimensionError("table is not complex");
  return std::get<std::vector<std::complex<double>>>(values_);
}

const std::vector<TorusValue>& FunctionTable::torus_values() const {
  if (kind_ != Kind::Torus) throw DimensionError("table is not torus-valued");
  return std::get<std::vector<TorusValue>>(values_);
}

std::vector<std::complex<double>> FunctionTable::to_complex() const {
  if (kind_ == Kind::Complex) return cplx();
  if (kind_ == Kind::Torus)
    throw DimensionError("torus tables have no numeric lift; apply a phase first");
  const auto& r = real();
  std::vector<std::complex<double>> out(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) out[i] = r[i];
  return out;
}

FunctionTable phase_table(const FunctionTable& t) {
  const auto& vals = t.torus_values();
  std::vector<std::complex<double>> out(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const double theta = kTwoPi * vals[i].to_double();
    out[i] = {std::cos(theta), std::sin(theta)};
  }
  return FunctionTable::complex_(t.dom().p(), t.dom().n(), std::move(out));
}

FunctionTable phase_of_poly(const NcPolynomial& P, std::uint64_t cell_budget) {
  return phase_table(FunctionTable::torus(P.p(), P.n(), P.evaluate_table(cell_budget)));
}

FunctionTable restrict_table(const FunctionTable& f, const AffineMap& A) {
  if (A.p != f.dom().p() || A.n != f.dom().n())
    throw DimensionError("affine map does not target the table's domain");
  Domain src(A.p, A.m);
  std::vector<std::uint64_t> where(src.size());
  for (std::uint64_t i = 0; i < src.size(); ++i) where[i] = A.apply_index(i);
  switch (f.kind()) {
    case Kind::Complex: {
      std::vector<std::complex<double>> out(src.size());
      for (std::uint64_t i = 0; i < src.size(); ++i) out[i] = f.cplx()[where[i]];
      return FunctionTable::complex_(A.p, A.m, std::move(out));
    }
    case Kind::Torus: {
      std::vector<TorusValue> out;
      out.reserve(src.size());
      for (std::uint64_t i = 0; i < src.size(); ++i) out.push_back(f.torus_values()[where[i]]);
      return FunctionTable::torus(A.p, A.m, std::move(out));
    }
    default: {
      std::vector<double> out(src.size());
      for (std::uint64_t i = 0; i < src.size(); ++i) out[i] = f.real()[where[i]];
      if (f.kind() == Kind::Boolean) return FunctionTable::boolean(A.p, A.m, std::move(out));
      if (f.kind() == Kind::Unit) return FunctionTable::unit(A.p, A.m, std::move(out));
      return FunctionTable::signed_(A.p, A.m, std::move(out));
    }
  }
}

FunctionTable table_sub(const FunctionTable& a, const FunctionTable& b) {
  if (a.dom() != b.dom()) throw DimensionError("table difference domain mismatch");
  if (a.kind() == Kind::Torus || b.kind() == Kind::Torus) {
    if (a.kind() != Kind::Torus || b.kind() != Kind::Torus)
      throw DimensionError("cannot mix torus and numeric tables");
    std::vector<TorusValue> out;
    out.reserve(a.size());
    for (std::uint64_t i = 0; i < a.size(); ++i)
      out.push_back(a.torus_values()[i] - b.torus_values()[i]);
    return FunctionTable::torus(a.dom().p(), a.dom().n(), std::move(out));
  }
  if (a.kind() == Kind::Complex || b.kind() == Kind::Complex) {
    auto av = a.to_complex();
    const auto bv = b.to_complex();
    for (std::size_t i = 0; i < av.size(); ++i) av[i] -= bv[i];
    return FunctionTable::complex_(a.dom().p(), a.dom().n(), std::move(av));
  }
  std::vector<double> out(a.size());
  for (std::uint64_t i = 0; i < a.size(); ++i) out[i] = a.real()[i] - b.real()[i];
  return FunctionTable::signed_(a.dom().p(), a.dom().n(), std::move(out));
}

FunctionTable bernoulli_round(const FunctionTable& f, Rng& rng) {
  if (f.kind() != Kind::Unit && f.kind() != Kind::Boolean)
    throw DimensionError("bernoulli rounding needs a unit-interval table");
  std::vector<double> out(f.size());
  for (std::uint64_t i = 0; i < f.size(); ++i)
    out[i] = rng.unit() < f.real()[i] ? 1.0 : 0.0;
  return FunctionTable::boolean(f.dom().p(), f.dom().n(), std::move(out));
}

FunctionTable mult_derivative(const FunctionTable& f, std::span<const std::uint8_t> h) {
  const auto v = f.to_complex();
  const Domain& dom = f.dom();
  const std::uint64_t h_idx = dom.encode(h);
  std::vector<std::complex<double>> out(v.size());
  for (std::uint64_t i = 0; i < v.size(); ++i)
    out[i] = v[dom.add(i, h_idx)] * std::conj(v[i]);
  return FunctionTable::complex_(dom.p(), dom.n(), std::move(out));
}

namespace {

template <typename F>
double fold_abs(const FunctionTable& f, F&& fold, double init) {
  double acc = init;
  if (f.kind() == Kind::Complex) {
    for (const auto& v : f.cplx()) acc = fold(acc, std::abs(v));
  } else {
    for (double v : f.real()) acc = fold(acc, std::abs(v));
  }
  return acc;
}

}  // namespace

double norm_l1(const FunctionTable& f) {
  const double s = fold_abs(f, [](double a, double b) { return a + b; }, 0.0);
  return s / static_cast<double>(f.size());
}

double norm_l2(const FunctionTable& f) {
  double acc = 0.0;
  if (f.kind() == Kind::Complex) {
    for (const auto& v : f.cplx()) acc += std::norm(v);
  } else {
    for (double v : f.real()) acc += v * v;
  }
  return acc / static_cast<double>(f.size());
}

double norm_linf(const FunctionTable& f) {
  return fold_abs(f, [](double a, double b) { return a > b ? a : b; }, 0.0);
}

}  // namespace hofa
