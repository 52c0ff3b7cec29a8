#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace spinscape {

// Dense bit vector over GF(2), used for chains and cochains.
class GF2Vector {
public:
  GF2Vector() = default;
  explicit GF2Vector(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

  std::size_t size() const { return n_; }

  bool get(std::size_t i) const { return (w_[i / 64] >> (i % 64)) & 1u; }

  void set(std::size_t i, bool v) {
    std::uint64_t m = std::uint64_t(1) << (i % 64);
    if (v)
      w_[i / 64] |= m;
    else
      w_[i / 64] &= ~m;
  }

  void flip(std::size_t i) { w_[i / 64] ^= std::uint64_t(1) << (i % 64); }

  GF2Vector& operator^=(const GF2Vector& o);
  friend GF2Vector operator^(GF2Vector a, const GF2Vector& b) {
    a ^= b;
    return a;
  }
  bool operator==(const GF2Vector& o) const { return n_ == o.n_ && w_ == o.w_; }
  bool operator!=(const GF2Vector& o) const { return !(*this == o); }

  bool is_zero() const;
  std::size_t popcount() const;
  std::vector<std::size_t> support() const;

  // Serializes as "chain <grade>: i,j,k" with the support in increasing order.
  std::string to_chain_string(int grade) const;

private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> w_;
};

// Parses the "chain <grade>: ..." format; fills *grade when non-null.
// The vector is sized to hold the largest listed cell unless dim is given.
GF2Vector parse_chain(const std::string& text, int* grade, std::size_t dim = 0);

// Dense GF(2) matrix, stored as one bit row per matrix row.
class GF2Matrix {
public:
  GF2Matrix() = default;
  GF2Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows, GF2Vector(cols)) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool get(std::size_t r, std::size_t c) const { return data_[r].get(c); }
  void set(std::size_t r, std::size_t c, bool v) { data_[r].set(c, v); }
  void flip(std::size_t r, std::size_t c) { data_[r].flip(c); }
  const GF2Vector& row(std::size_t r) const { return data_[r]; }
  GF2Vector& row(std::size_t r) { return data_[r]; }

  // Matrix times column vector.
  GF2Vector apply(const GF2Vector& x) const;
  GF2Matrix transpose() const;

private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<GF2Vector> data_;
};

struct GF2Solution {
  bool feasible = false;
  GF2Vector particular;           // one solution of A x = b, valid iff feasible
  std::vector<GF2Vector> kernel;  // basis of the null space of A
};

// Gaussian elimination over GF(2). Always fills the kernel basis.
GF2Solution gf2_solve(const GF2Matrix& a, const GF2Vector& b);

std::size_t gf2_rank(const GF2Matrix& a);
std::vector<GF2Vector> gf2_kernel(const GF2Matrix& a);

// Whether v lies in the span of the given vectors.
bool gf2_in_span(const std::vector<GF2Vector>& gens, const GF2Vector& v);

// Rank of the subspace spanned by the given vectors.
std::size_t gf2_span_rank(const std::vector<GF2Vector>& gens);

}  // namespace spinscape
