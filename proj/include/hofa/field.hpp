#ifndef HOFA_FIELD_HPP
#define HOFA_FIELD_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "hofa/common.hpp"

namespace hofa {

// The point set F_p^n with its canonical index order: points are numbered
// little-endian, coordinate 1 varying fastest, so index = sum x_i * p^(i-1).
class Domain {
public:
  Domain(int p, int n);

  int p() const { return p_; }
  int n() const { return n_; }
  std::uint64_t size() const { return size_; }
  void check_cells(std::uint64_t budget) const;

  std::vector<std::uint8_t> decode(std::uint64_t idx) const;
  std::uint64_t encode(std::span<const std::uint8_t> coords) const;
  // Index of the pointwise mod-p sum of the points at indices a and b.
  std::uint64_t add(std::uint64_t a, std::uint64_t b) const;
  // Index of s * x for a scalar s.
  std::uint64_t scale(std::uint64_t a, int s) const;

  bool operator==(const Domain& o) const { return p_ == o.p_ && n_ == o.n_; }
  bool operator!=(const Domain& o) const { return !(*this == o); }

private:
  int p_;
  int n_;
  std::uint64_t size_;
};

// Affine map F_p^m -> F_p^n, x |-> Lx + c with L given by its m columns.
struct AffineMap {
  int p = 2;
  int m = 0;
  int n = 0;
  std::vector<std::vector<std::uint8_t>> cols;  // m columns, each length n
  std::vector<std::uint8_t> shift;              // length n
  bool embedding = false;     // L has full column rank
  bool non_singular = false;  // m == n and L invertible

  std::vector<std::uint8_t> apply(std::span<const std::uint8_t> x) const;
  std::uint64_t apply_index(std::uint64_t x_idx) const;
  // this(inner(x)); inner maps into this map's domain.
  AffineMap compose(const AffineMap& inner) const;
};

AffineMap identity_map(int p, int n);

// Rank over F_p of the matrix whose columns are given (each length n).
int column_rank_mod_p(int p, int n, const std::vector<std::vector<std::uint8_t>>& cols);

// Uniform affine embedding: L drawn uniformly from full-column-rank n x m
// matrices by rejection, shift uniform. Requires m <= n.
AffineMap sample_affine_embedding(Rng& rng, int p, int m, int n);

}  // namespace hofa

#endif
