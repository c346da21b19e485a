#ifndef HOFA_TORUS_HPP
#define HOFA_TORUS_HPP

#include <cstdint>
#include <string>
#include <string_view>

namespace hofa {

// Element of the circle group R/Z with denominator a power of a fixed prime p:
// value = num / p^k. Kept normalized so that 0 <= num < p^k and p does not
// divide num unless the value is 0 (then num = 0, k = 0). This makes the
// representation unique and the denominator exponent k minimal.
class TorusValue {
public:
  TorusValue(int p, std::int64_t num, int k);
  static TorusValue zero(int p) { return TorusValue(p, 0, 0); }
  // iota(x) = |x| / p, the standard embedding of a mod-p residue.
  static TorusValue iota(int p, std::int64_t residue);

  int p() const { return p_; }
  std::int64_t num() const { return num_; }
  int k() const { return k_; }
  bool is_zero() const { return num_ == 0; }

  TorusValue operator+(const TorusValue& o) const;
  TorusValue operator-() const;
  TorusValue operator-(const TorusValue& o) const;
  // Integer scaling lambda * value; multiples of p reduce the denominator
  // exponent, so scaling by p drops k by exactly one (p * U_k sits in U_{k-1}).
  TorusValue scaled(std::int64_t lambda) const;

  double to_double() const;  // representative in [0, 1)
  // Numerator after widening the denominator to p^K. Requires k <= K.
  std::int64_t code(int K) const;
  static TorusValue from_code(int p, std::int64_t code, int K);

  std::string str() const;  // "num/p^k" with the denominator evaluated, "0/1" for zero
  static TorusValue parse(int p, std::string_view s);

  bool operator==(const TorusValue& o) const;
  bool operator!=(const TorusValue& o) const { return !(*this == o); }
  // Order by representative in [0,1); usable as a map key within one prime.
  bool operator<(const TorusValue& o) const;

private:
  int p_;
  std::int64_t num_;
  int k_;
  void normalize();
};

}  // namespace hofa

#endif
