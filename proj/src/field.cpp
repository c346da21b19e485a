#include "hofa/field.hpp"

#include <string>

namespace hofa {

namespace {

bool is_supported_prime(int p) {
  return p == 2 || p == 3 || p == 5 || p == 7 || p == 11 || p == 13;
}

}  // namespace

Domain::Domain(int p, int n) : p_(p), n_(n) {
  if (!is_supported_prime(p)) throw DimensionError("unsupported prime p=" + std::to_string(p));
  if (n < 0) throw DimensionError("negative dimension");
  size_ = pow_u64(static_cast<std::uint64_t>(p), static_cast<unsigned>(n));
  if (size_ == UINT64_MAX) throw DimensionError("domain too large to index");
}

void Domain::check_cells(std::uint64_t budget) const {
  if (size_ > budget)
    throw BudgetError("table with " + std::to_string(size_) +
                          " cells exceeds budget " + std::to_string(budget),
                      size_);
}

std::vector<std::uint8_t> Domain::decode(std::uint64_t idx) const {
  std::vector<std::uint8_t> coords(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) {
    coords[i] = static_cast<std::uint8_t>(idx % p_);
    idx /= p_;
  }
  return coords;
}

std::uint64_t Domain::encode(std::span<const std::uint8_t> coords) const {
  if (coords.size() != static_cast<std::size_t>(n_))
    throw DimensionError("coordinate count does not match domain dimension");
  std::uint64_t idx = 0;
  for (int i = n_ - 1; i >= 0; --i) {
    if (coords[i] >= p_) throw DimensionError("coordinate out of range");
    idx = idx * p_ + coords[i];
  }
  return idx;
}

std::uint64_t Domain::add(std::uint64_t a, std::uint64_t b) const {
  if (p_ == 2) return a ^ b;  // digits are bits
  std::uint64_t out = 0, place = 1;
  for (int i = 0; i < n_; ++i) {
    const std::uint64_t da = a % p_, db = b % p_;
    out += ((da + db) % p_) * place;
    a /= p_;
    b /= p_;
    place *= p_;
  }
  return out;
}

std::uint64_t Domain::scale(std::uint64_t a, int s) const {
  s %= p_;
  if (s < 0) s += p_;
  std::uint64_t out = 0, place = 1;
  for (int i = 0; i < n_; ++i) {
    out += ((a % p_) * s % p_) * place;
    a /= p_;
    place *= p_;
  }
  return out;
}

std::vector<std::uint8_t> AffineMap::apply(std::span<const std::uint8_t> x) const {
  if (x.size() != static_cast<std::size_t>(m))
    throw DimensionError("affine map applied to point of wrong dimension");
  std::vector<std::uint8_t> y = shift;
  for (int j = 0; j < m; ++j) {
    const int xj = x[j];
    if (xj == 0) continue;
    for (int i = 0; i < n; ++i) {
      y[i] = static_cast<std::uint8_t>((y[i] + xj * cols[j][i]) % p);
    }
  }
  return y;
}

std::uint64_t AffineMap::apply_index(std::uint64_t x_idx) const {
  const Domain dom_m(p, m);
  const Domain dom_n(p, n);
  const auto x = dom_m.decode(x_idx);
  return dom_n.encode(apply(x));
}

AffineMap AffineMap::compose(const AffineMap& inner) const {
  if (inner.p != p || inner.n != m)
    throw DimensionError("affine composition dimension mismatch");
  AffineMap out;
  out.p = p;
  out.m = inner.m;
  out.n = n;
  out.shift = apply(inner.shift);
  out.cols.resize(inner.m);
  for (int j = 0; j < inner.m; ++j) {
    // Column j of L_outer * L_inner, no shift contribution.
    std::vector<std::uint8_t> col(static_cast<std::size_t>(n), 0);
    for (int t = 0; t < m; ++t) {
      const int c = inner.cols[j][t];
      if (c == 0) continue;
      for (int i = 0; i < n; ++i)
        col[i] = static_cast<std::uint8_t>((col[i] + c * cols[t][i]) % p);
    }
    out.cols[j] = std::move(col);
  }
  out.embedding = column_rank_mod_p(p, n, out.cols) == out.m;
  out.non_singular = (out.m == out.n) && out.embedding;
  return out;
}

AffineMap identity_map(int p, int n) {
  AffineMap a;
  a.p = p;
  a.m = n;
  a.n = n;
  a.shift.assign(static_cast<std::size_t>(n), 0);
  a.cols.assign(static_cast<std::size_t>(n), std::vector<std::uint8_t>(n, 0));
  for (int i = 0; i < n; ++i) a.cols[i][i] = 1;
  a.embedding = true;
  a.non_singular = true;
  return a;
}

int column_rank_mod_p(int p, int n, const std::vector<std::vector<std::uint8_t>>& cols) {
  // Gaussian elimination on a working copy, columns as vectors over F_p.
  std::vector<std::vector<int>> w;
  w.reserve(cols.size());
  for (const auto& c : cols) {
    if (c.size() != static_cast<std::size_t>(n))
      throw DimensionError("column length mismatch");
    w.emplace_back(c.begin(), c.end());
  }
  int rank = 0;
  for (int row = 0; row < n && rank < static_cast<int>(w.size()); ++row) {
    int pivot = -1;
    for (int j = rank; j < static_cast<int>(w.size()); ++j) {
      if (w[j][row] != 0) {
        pivot = j;
        break;
      }
    }
    if (pivot < 0) continue;
    std::swap(w[rank], w[pivot]);
    // Normalize pivot to 1 via modular inverse (p prime, small).
    int inv = 1;
    for (int cand = 1; cand < p; ++cand)
      if (w[rank][row] * cand % p == 1) {
        inv = cand;
        break;
      }
    for (int i = 0; i < n; ++i) w[rank][i] = w[rank][i] * inv % p;
    for (int j = 0; j < static_cast<int>(w.size()); ++j) {
      if (j == rank || w[j][row] == 0) continue;
      const int f = w[j][row];
      for (int i = 0; i < n; ++i)
        w[j][i] = (w[j][i] - f * w[rank][i] % p + p * p) % p;
    }
    ++rank;
  }
  return rank;
}

AffineMap sample_affine_embedding(Rng& rng, int p, int m, int n) {
  if (m > n) throw DimensionError("embedding requires m <= n");
  if (m < 0) throw DimensionError("negative embedding dimension");
  Domain dom(p, n);
  AffineMap a;
  a.p = p;
  a.m = m;
  a.n = n;
  a.cols.assign(static_cast<std::size_t>(m), {});
  while (true) {
    for (int j = 0; j < m; ++j) {
      auto& col = a.cols[j];
      col.resize(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i)
        col[i] = static_cast<std::uint8_t>(rng.below(static_cast<std::uint64_t>(p)));
    }
    if (column_rank_mod_p(p, n, a.cols) == m) break;
  }
  a.shift.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    a.shift[i] = static_cast<std::uint8_t>(rng.below(static_cast<std::uint64_t>(p)));
  a.embedding = true;
  a.non_singular = (m == n);
  return a;
}

}  // namespace hofa
