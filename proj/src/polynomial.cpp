#include "hofa/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace hofa {

namespace {

// V[x][d] = x^d mod p on points 0..p-1; its inverse recovers classical
// coefficients from value tables one axis at a time.
std::vector<std::vector<int>> vandermonde_inverse(int p) {
  std::vector<std::vector<int>> a(p, std::vector<int>(2 * p, 0));
  for (int x = 0; x < p; ++x) {
    int pw = 1;
    for (int d = 0; d < p; ++d) {
      a[x][d] = pw;
      pw = pw * x % p;
    }
    a[x][p + x] = 1;
  }
  for (int col = 0; col < p; ++col) {
    int pivot = -1;
    for (int r = col; r < p; ++r)
      if (a[r][col] != 0) {
        pivot = r;
        break;
      }
    std::swap(a[col], a[pivot]);
    int inv = 1;
    for (int c = 1; c < p; ++c)
      if (a[col][col] * c % p == 1) {
        inv = c;
        break;
      }
    for (int j = 0; j < 2 * p; ++j) a[col][j] = a[col][j] * inv % p;
    for (int r = 0; r < p; ++r) {
      if (r == col || a[r][col] == 0) continue;
      const int f = a[r][col];
      for (int j = 0; j < 2 * p; ++j)
        a[r][j] = (a[r][j] - f * a[col][j] % p + p * p) % p;
    }
  }
  std::vector<std::vector<int>> w(p, std::vector<int>(p));
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) w[i][j] = a[i][p + j];
  return w;
}

// Classical coefficients of a digit table F_p^n -> F_p, little-endian layout.
std::vector<int> classical_fit(const Domain& dom, std::vector<int> vals) {
  const int p = dom.p();
  const auto w = vandermonde_inverse(p);
  const std::uint64_t size = dom.size();
  std::vector<int> next(vals.size());
  std::uint64_t stride = 1;
  for (int axis = 0; axis < dom.n(); ++axis) {
    for (std::uint64_t base = 0; base < size; ++base) {
      const std::uint64_t digit = base / stride % p;
      const std::uint64_t lo = base - digit * stride;
      if (digit != 0) continue;
      for (int d = 0; d < p; ++d) {
        int acc = 0;
        for (int x = 0; x < p; ++x) acc += w[d][x] * vals[lo + x * stride];
        next[lo + d * stride] = acc % p;
      }
    }
    std::swap(vals, next);
    stride *= p;
  }
  return vals;
}

std::int64_t monomial_mod(const std::vector<std::uint8_t>& exps,
                          std::span<const std::uint8_t> x, std::int64_t mod) {
  // product |x_i|^{d_i} reduced mod p^k; only the residue matters for the
  // torus contribution alpha * m.
  std::int64_t m = 1 % mod;
  for (std::size_t i = 0; i < exps.size(); ++i) {
    for (int e = 0; e < exps[i]; ++e) {
      if (x[i] == 0) return 0;
      m = m * x[i] % mod;
    }
  }
  return m;
}

std::int64_t ipow64(std::int64_t b, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

NcPolynomial::NcPolynomial(int p, int n) : p_(p), n_(n) {
  Domain check(p, n);  // validates p and n
  (void)check;
}

void NcPolynomial::set_coeff(std::span<const std::uint8_t> exps, const TorusValue& alpha) {
  if (exps.size() != static_cast<std::size_t>(n_))
    throw DimensionError("exponent vector length mismatch");
  bool all_zero = true;
  for (auto e : exps) {
    if (e >= p_) throw DimensionError("exponent must be < p in canonical form");
    if (e != 0) all_zero = false;
  }
  if (all_zero) throw DimensionError("constant monomial is not representable (shift is fixed to 0)");
  if (alpha.p() != p_) throw DimensionError("coefficient prime mismatch");
  std::vector<std::uint8_t> key(exps.begin(), exps.end());
  if (alpha.is_zero())
    coeffs_.erase(key);
  else
    coeffs_.insert_or_assign(std::move(key), alpha);
}

TorusValue NcPolynomial::coeff(std::span<const std::uint8_t> exps) const {
  std::vector<std::uint8_t> key(exps.begin(), exps.end());
  auto it = coeffs_.find(key);
  return it == coeffs_.end() ? TorusValue::zero(p_) : it->second;
}

TorusValue NcPolynomial::evaluate(std::span<const std::uint8_t> x) const {
  if (x.size() != static_cast<std::size_t>(n_))
    throw DimensionError("evaluation point has wrong dimension");
  TorusValue acc = TorusValue::zero(p_);
  for (const auto& [exps, alpha] : coeffs_) {
    const std::int64_t mod = ipow64(p_, alpha.k());
    acc = acc + alpha.scaled(monomial_mod(exps, x, mod));
  }
  return acc;
}

std::vector<TorusValue> NcPolynomial::evaluate_table(std::uint64_t cell_budget) const {
  Domain dom(p_, n_);
  dom.check_cells(cell_budget);
  std::vector<TorusValue> out;
  out.reserve(dom.size());
  for (std::uint64_t i = 0; i < dom.size(); ++i) {
    const auto x = dom.decode(i);
    out.push_back(evaluate(x));
  }
  return out;
}

int NcPolynomial::degree() const {
  int deg = 0;
  for (const auto& [exps, alpha] : coeffs_) {
    int s = 0;
    for (auto e : exps) s += e;
    deg = std::max(deg, s + (alpha.k() - 1) * (p_ - 1));
  }
  return deg;
}

int NcPolynomial::depth() const {
  int h = 0;
  for (const auto& [exps, alpha] : coeffs_) h = std::max(h, alpha.k() - 1);
  return h;
}

NcPolynomial NcPolynomial::operator+(const NcPolynomial& o) const {
  if (p_ != o.p_ || n_ != o.n_) throw DimensionError("polynomial addition domain mismatch");
  NcPolynomial out(p_, n_);
  out.coeffs_ = coeffs_;
  for (const auto& [exps, alpha] : o.coeffs_) {
    auto it = out.coeffs_.find(exps);
    const TorusValue sum = it == out.coeffs_.end() ? alpha : it->second + alpha;
    if (sum.is_zero()) {
      if (it != out.coeffs_.end()) out.coeffs_.erase(it);
    } else if (it == out.coeffs_.end()) {
      out.coeffs_.emplace(exps, sum);
    } else {
      it->second = sum;
    }
  }
  return out;
}

NcPolynomial NcPolynomial::operator-(const NcPolynomial& o) const {
  return *this + o.scaled(-1);
}

NcPolynomial NcPolynomial::scaled(std::int64_t lambda) const {
  NcPolynomial out(p_, n_);
  for (const auto& [exps, alpha] : coeffs_) {
    const TorusValue s = alpha.scaled(lambda);
    if (!s.is_zero()) out.coeffs_.emplace(exps, s);
  }
  return out;
}

NcPolynomial NcPolynomial::compose_affine(const AffineMap& A, std::uint64_t cell_budget) const {
  if (A.p != p_ || A.n != n_) throw DimensionError("affine map does not target this domain");
  Domain src(p_, A.m);
  src.check_cells(cell_budget);
  const auto table = evaluate_table(cell_budget);
  std::vector<TorusValue> restricted;
  restricted.reserve(src.size());
  for (std::uint64_t i = 0; i < src.size(); ++i)
    restricted.push_back(table[A.apply_index(i)]);
  // Restriction picks up the constant P(A(0)), which the canonical family
  // cannot carry; return the shift-free part. Degree and depth of monomial
  // terms are unaffected, and callers needing the constant can evaluate it.
  const TorusValue constant = restricted[0];
  if (!constant.is_zero())
    for (auto& v : restricted) v = v - constant;
  return interpolate(p_, A.m, restricted);
}

bool NcPolynomial::operator==(const NcPolynomial& o) const {
  return p_ == o.p_ && n_ == o.n_ && coeffs_ == o.coeffs_;
}

std::string NcPolynomial::str() const {
  if (coeffs_.empty()) return "0";
  std::string out;
  for (const auto& [exps, alpha] : coeffs_) {
    // Split the torus coefficient into base-p digits, one printed term per
    // nonzero digit, shallowest level first.
    const int k = alpha.k();
    std::int64_t num = alpha.num();
    std::vector<int> digit(k, 0);
    for (int j = 0; j < k; ++j) {
      digit[j] = static_cast<int>(num % p_);
      num /= p_;
    }
    for (int h = 0; h < k; ++h) {
      const int c = digit[k - 1 - h];
      if (c == 0) continue;
      if (!out.empty()) out += " + ";
      out += std::to_string(c) + " *";
      bool first = true;
      for (std::size_t i = 0; i < exps.size(); ++i) {
        if (exps[i] == 0) continue;
        out += first ? " " : "*";
        out += "x" + std::to_string(i + 1) + "^" + std::to_string(exps[i]);
        first = false;
      }
      out += " / " + std::to_string(ipow64(p_, h + 1));
    }
  }
  return out;
}

NcPolynomial NcPolynomial::parse(int p, int n, std::string_view text) {
  NcPolynomial out(p, n);
  // Strip whitespace; terms are separated by '+'.
  std::string flat;
  flat.reserve(text.size());
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) flat += c;
  if (flat.empty()) throw ParseError("empty polynomial text");
  if (flat == "0") return out;

  std::size_t pos = 0;
  while (pos < flat.size()) {
    std::size_t next = flat.find('+', pos);
    if (next == std::string::npos) next = flat.size();
    const std::string_view term(flat.data() + pos, next - pos);
    pos = next + 1;

    const auto star = term.find('*');
    const auto slash = term.rfind('/');
    if (star == std::string_view::npos || slash == std::string_view::npos || slash < star)
      throw ParseError("malformed term '" + std::string(term) + "'");
    std::int64_t c = 0, den = 0;
    {
      auto cv = term.substr(0, star);
      auto [ptr, ec] = std::from_chars(cv.data(), cv.data() + cv.size(), c);
      if (ec != std::errc() || ptr != cv.data() + cv.size())
        throw ParseError("bad term coefficient");
      auto dv = term.substr(slash + 1);
      auto [ptr2, ec2] = std::from_chars(dv.data(), dv.data() + dv.size(), den);
      if (ec2 != std::errc() || ptr2 != dv.data() + dv.size())
        throw ParseError("bad term denominator");
    }
    int k = 0;
    std::int64_t d = den;
    while (d > 1 && d % p == 0) {
      d /= p;
      ++k;
    }
    if (d != 1 || k == 0)
      throw ParseError("term denominator must be a positive power of p");

    std::vector<std::uint8_t> exps(static_cast<std::size_t>(n), 0);
    std::string_view factors = term.substr(star + 1, slash - star - 1);
    std::size_t fpos = 0;
    while (fpos < factors.size()) {
      std::size_t fend = factors.find('*', fpos);
      if (fend == std::string_view::npos) fend = factors.size();
      std::string_view f = factors.substr(fpos, fend - fpos);
      fpos = fend + 1;
      if (f.empty() || f[0] != 'x') throw ParseError("bad monomial factor");
      const auto caret = f.find('^');
      std::int64_t var = 0, e = 1;
      const auto vtxt = f.substr(1, caret == std::string_view::npos ? f.size() - 1 : caret - 1);
      auto [vp, vec] = std::from_chars(vtxt.data(), vtxt.data() + vtxt.size(), var);
      if (vec != std::errc() || vp != vtxt.data() + vtxt.size())
        throw ParseError("bad variable index");
      if (caret != std::string_view::npos) {
        const auto etxt = f.substr(caret + 1);
        auto [ep, eec] = std::from_chars(etxt.data(), etxt.data() + etxt.size(), e);
        if (eec != std::errc() || ep != etxt.data() + etxt.size())
          throw ParseError("bad exponent");
      }
      if (var < 1 || var > n) throw ParseError("variable index out of range");
      if (e < 1 || e >= p) throw ParseError("exponent must lie in [1, p-1]");
      exps[static_cast<std::size_t>(var - 1)] =
          static_cast<std::uint8_t>(exps[static_cast<std::size_t>(var - 1)] + e);
      if (exps[static_cast<std::size_t>(var - 1)] >= p)
        throw ParseError("accumulated exponent must stay below p");
    }
    bool any = false;
    for (auto e : exps) any = any || e != 0;
    if (!any) throw ParseError("term without variables (shifts are not representable)");
    const TorusValue add = TorusValue(p, c, k);
    out.set_coeff(exps, out.coeff(exps) + add);
  }
  return out;
}

std::vector<TorusValue> additive_derivative(const Domain& dom,
                                            std::span<const TorusValue> table,
                                            std::span<const std::uint8_t> h) {
  if (table.size() != dom.size()) throw DimensionError("table size mismatch");
  const std::uint64_t h_idx = dom.encode(h);
  std::vector<TorusValue> out;
  out.reserve(table.size());
  for (std::uint64_t i = 0; i < dom.size(); ++i)
    out.push_back(table[dom.add(i, h_idx)] - table[i]);
  return out;
}

NcPolynomial interpolate(int p, int n, std::span<const TorusValue> table) {
  Domain dom(p, n);
  if (table.size() != dom.size()) throw DimensionError("table size mismatch");
  if (!table[0].is_zero())
    throw ShiftError("table value at 0 is " + table[0].str() +
                     "; only shift-free functions are representable");
  int K = 0;
  for (const auto& v : table) {
    if (v.p() != p) throw DimensionError("table entry prime mismatch");
    K = std::max(K, v.k());
  }
  NcPolynomial result(p, n);
  std::vector<TorusValue> residual(table.begin(), table.end());
  for (int level = K - 1; level >= 0; --level) {
    // p^level * residual lands in U_1 and is exactly the classical part at
    // this depth; fit it, record its digits, subtract its full contribution.
    const std::int64_t s = ipow64(p, level);
    std::vector<int> digits(residual.size());
    for (std::size_t i = 0; i < residual.size(); ++i)
      digits[i] = static_cast<int>(residual[i].scaled(s).code(1));
    const auto cs = classical_fit(dom, std::move(digits));
    NcPolynomial level_part(p, n);
    for (std::uint64_t e = 1; e < dom.size(); ++e) {
      if (cs[e] == 0) continue;
      const auto exps = dom.decode(e);
      level_part.set_coeff(exps, TorusValue(p, cs[e], level + 1));
    }
    result = result + level_part;
    const auto sub = level_part.evaluate_table(UINT64_MAX);
    for (std::size_t i = 0; i < residual.size(); ++i) residual[i] = residual[i] - sub[i];
  }
  for (const auto& v : residual)
    if (!v.is_zero()) throw Error("interpolation residual did not vanish");
  return result;
}

namespace {

bool all_differences_vanish(const Domain& dom, std::span<const TorusValue> table, int d) {
  if (d < 0) {
    for (const auto& v : table)
      if (!v.is_zero()) return false;
    return true;
  }
  for (std::uint64_t h = 0; h < dom.size(); ++h) {
    const auto diff = additive_derivative(dom, table, dom.decode(h));
    if (!all_differences_vanish(dom, diff, d - 1)) return false;
  }
  return true;
}

}  // namespace

int degree_by_differences(const Domain& dom, std::span<const TorusValue> table,
                          int max_degree, std::uint64_t op_budget) {
  for (int d = 0; d <= max_degree; ++d) {
    const std::uint64_t cost = pow_u64(dom.size(), static_cast<unsigned>(d + 2));
    if (cost > op_budget)
      throw BudgetError("difference oracle needs " + std::to_string(cost) + " steps", cost);
    if (all_differences_vanish(dom, table, d)) return d;
  }
  throw Error("table exceeds degree " + std::to_string(max_degree));
}

PolynomialFamily::PolynomialFamily(int p, int n, int max_degree, std::uint64_t budget)
    : p_(p), n_(n), max_degree_(max_degree) {
  Domain dom(p, n);
  if (max_degree < 0) throw DimensionError("negative degree bound");
  size_ = 1;
  for (std::uint64_t e = 1; e < dom.size(); ++e) {
    const auto exps = dom.decode(e);
    int s = 0;
    for (auto d : exps) s += d;
    if (s > max_degree) continue;
    const int level = (max_degree - s) / (p - 1);
    monomials_.push_back(exps);
    levels_.push_back(level);
    size_ = mul_sat_u64(size_, pow_u64(p, static_cast<unsigned>(level + 1)));
  }
  if (size_ > budget)
    throw BudgetError("polynomial family has " + std::to_string(size_) +
                          " members, budget " + std::to_string(budget),
                      size_);
}

NcPolynomial PolynomialFamily::at(std::uint64_t index) const {
  if (index >= size_) throw Error("family index out of range");
  NcPolynomial out(p_, n_);
  for (std::size_t i = 0; i < monomials_.size(); ++i) {
    const int K = levels_[i] + 1;
    const std::uint64_t radix = pow_u64(p_, static_cast<unsigned>(K));
    const std::uint64_t digit = index % radix;
    index /= radix;
    if (digit != 0)
      out.set_coeff(monomials_[i],
                    TorusValue::from_code(p_, static_cast<std::int64_t>(digit), K));
  }
  return out;
}

std::vector<NcPolynomial> exact_degree_family(int p, int n, int degree, int depth,
                                              std::uint64_t budget) {
  if (degree < 1) throw DimensionError("exact-degree family needs degree >= 1");
  if (depth < 0 || depth * (p - 1) >= degree)
    throw DimensionError("depth incompatible with degree");
  PolynomialFamily fam(p, n, degree, budget);
  std::vector<NcPolynomial> out;
  for (std::uint64_t i = 0; i < fam.size(); ++i) {
    NcPolynomial cand = fam.at(i);
    if (cand.degree() == degree && cand.depth() == depth) out.push_back(std::move(cand));
  }
  return out;
}

}  // namespace hofa
