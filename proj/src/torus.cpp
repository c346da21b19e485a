#include "hofa/torus.hpp"

#include <charconv>

#include "hofa/common.hpp"

namespace hofa {

namespace {

bool is_supported_prime(int p) {
  return p == 2 || p == 3 || p == 5 || p == 7 || p == 11 || p == 13;
}

std::int64_t ipow(std::int64_t base, int exp) {
  std::int64_t out = 1;
  for (int i = 0; i < exp; ++i) {
    if (out > (std::int64_t{1} << 62) / base)
      throw Error("torus denominator overflow");
    out *= base;
  }
  return out;
}

}  // namespace

TorusValue::TorusValue(int p, std::int64_t num, int k) : p_(p), num_(num), k_(k) {
  if (!is_supported_prime(p)) throw DimensionError("unsupported prime p=" + std::to_string(p));
  if (k < 0) throw Error("negative denominator exponent");
  normalize();
}

TorusValue TorusValue::iota(int p, std::int64_t residue) {
  return TorusValue(p, residue, 1);
}

void TorusValue::normalize() {
  const std::int64_t den = ipow(p_, k_);
  num_ %= den;
  if (num_ < 0) num_ += den;
  while (k_ > 0 && num_ % p_ == 0) {
    num_ /= p_;
    --k_;
  }
  if (num_ == 0) k_ = 0;
}

TorusValue TorusValue::operator+(const TorusValue& o) const {
  if (p_ != o.p_) throw DimensionError("torus addition across different primes");
  const int k = k_ > o.k_ ? k_ : o.k_;
  const std::int64_t a = num_ * ipow(p_, k - k_);
  const std::int64_t b = o.num_ * ipow(p_, k - o.k_);
  return TorusValue(p_, a + b, k);
}

TorusValue TorusValue::operator-() const { return TorusValue(p_, -num_, k_); }

TorusValue TorusValue::operator-(const TorusValue& o) const { return *this + (-o); }

TorusValue TorusValue::scaled(std::int64_t lambda) const {
  const std::int64_t den = ipow(p_, k_);
  // __int128 keeps lambda * num exact before reduction.
  __int128 prod = static_cast<__int128>(lambda) * num_;
  __int128 r = prod % den;
  if (r < 0) r += den;
  return TorusValue(p_, static_cast<std::int64_t>(r), k_);
}

double TorusValue::to_double() const {
  return static_cast<double>(num_) / static_cast<double>(ipow(p_, k_));
}

std::int64_t TorusValue::code(int K) const {
  if (k_ > K) throw DimensionError("torus value deeper than requested level");
  return num_ * ipow(p_, K - k_);
}

TorusValue TorusValue::from_code(int p, std::int64_t code, int K) {
  return TorusValue(p, code, K);
}

std::string TorusValue::str() const {
  return std::to_string(num_) + "/" + std::to_string(ipow(p_, k_));
}

TorusValue TorusValue::parse(int p, std::string_view s) {
  const auto slash = s.find('/');
  std::int64_t num = 0, den = 1;
  auto parse_int = [](std::string_view t, std::int64_t& out) {
    const char* b = t.data();
    const char* e = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(b, e, out);
    if (ec != std::errc() || ptr != e) throw ParseError("bad torus literal");
  };
  if (slash == std::string_view::npos) {
    parse_int(s, num);
    return TorusValue(p, num, 0);
  }
  parse_int(s.substr(0, slash), num);
  parse_int(s.substr(slash + 1), den);
  if (den <= 0) throw ParseError("bad torus denominator");
  int k = 0;
  std::int64_t d = den;
  while (d % p == 0) {
    d /= p;
    ++k;
  }
  if (d != 1)
    throw ParseError("torus denominator " + std::to_string(den) +
                     " is not a power of " + std::to_string(p));
  return TorusValue(p, num, k);
}

bool TorusValue::operator==(const TorusValue& o) const {
  return p_ == o.p_ && num_ == o.num_ && k_ == o.k_;
}

bool TorusValue::operator<(const TorusValue& o) const {
  if (p_ != o.p_) throw DimensionError("torus comparison across different primes");
  // Compare num/p^k by cross-multiplying exactly.
  const int k = k_ > o.k_ ? k_ : o.k_;
  return num_ * ipow(p_, k - k_) < o.num_ * ipow(p_, k - o.k_);
}

}  // namespace hofa
