#include "spinscape/gf2.hpp"

#include <bit>
#include <sstream>
#include <stdexcept>

namespace spinscape {

GF2Vector& GF2Vector::operator^=(const GF2Vector& o) {
  if (n_ != o.n_) throw std::invalid_argument("GF2Vector size mismatch");
  for (std::size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
  return *this;
}

bool GF2Vector::is_zero() const {
  for (auto w : w_)
    if (w) return false;
  return true;
}

std::size_t GF2Vector::popcount() const {
  std::size_t c = 0;
  for (auto w : w_) c += std::popcount(w);
  return c;
}

std::vector<std::size_t> GF2Vector::support() const {
  std::vector<std::size_t> s;
  for (std::size_t i = 0; i < n_; ++i)
    if (get(i)) s.push_back(i);
  return s;
}

std::string GF2Vector::to_chain_string(int grade) const {
  std::ostringstream os;
  os << "chain " << grade << ":";
  bool first = true;
  for (std::size_t i : support()) {
    os << (first ? " " : ",") << i;
    first = false;
  }
  return os.str();
}

GF2Vector parse_chain(const std::string& text, int* grade, std::size_t dim) {
  std::istringstream is(text);
  std::string kw;
  int g = 0;
  char colon = 0;
  if (!(is >> kw >> g >> colon) || kw != "chain" || colon != ':')
    throw std::runtime_error("bad chain header: " + text);
  if (grade) *grade = g;
  std::vector<std::size_t> cells;
  std::string rest;
  std::getline(is, rest);
  std::istringstream cs(rest);
  std::string tok;
  while (std::getline(cs, tok, ',')) {
    std::istringstream ts(tok);
    long v = -1;
    if (!(ts >> v) || v < 0) {
      // allow a trailing empty token from "chain k:" with no cells
      std::string probe;
      if (ts.clear(), ts.str(tok), (ts >> probe), probe.empty()) continue;
      if (tok.find_first_not_of(" \t") == std::string::npos) continue;
      throw std::runtime_error("bad chain cell: '" + tok + "'");
    }
    cells.push_back(std::size_t(v));
  }
  std::size_t n = dim;
  for (auto c : cells)
    if (c + 1 > n) n = c + 1;
  GF2Vector out(n);
  for (auto c : cells) out.flip(c);
  return out;
}

GF2Vector GF2Matrix::apply(const GF2Vector& x) const {
  if (x.size() != cols_) throw std::invalid_argument("GF2Matrix apply size mismatch");
  GF2Vector y(rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    std::size_t dot = 0;
    for (std::size_t c : data_[r].support()) dot ^= x.get(c) ? 1 : 0;
    if (dot) y.set(r, true);
  }
  return y;
}

GF2Matrix GF2Matrix::transpose() const {
  GF2Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c : data_[r].support()) t.set(c, r, true);
  return t;
}

namespace {

// Row echelon elimination on an augmented system. Returns pivot column per
// eliminated row, or keeps track of free columns for the kernel basis.
struct Echelon {
  std::vector<GF2Vector> rows;  // reduced rows of A
  std::vector<GF2Vector> aug;   // matching rows of the augment (may be empty)
  std::vector<std::size_t> pivot_col;
};

Echelon eliminate(const GF2Matrix& a, const GF2Vector* b) {
  Echelon e;
  std::size_t m = a.rows(), n = a.cols();
  std::vector<GF2Vector> rows(m, GF2Vector(n));
  std::vector<GF2Vector> aug(m, GF2Vector(1));
  for (std::size_t r = 0; r < m; ++r) {
    rows[r] = a.row(r);
    if (b) aug[r].set(0, b->get(r));
  }
  std::size_t rank = 0;
  for (std::size_t col = 0; col < n && rank < m; ++col) {
    std::size_t piv = m;
    for (std::size_t r = rank; r < m; ++r)
      if (rows[r].get(col)) {
        piv = r;
        break;
      }
    if (piv == m) continue;
    std::swap(rows[piv], rows[rank]);
    std::swap(aug[piv], aug[rank]);
    for (std::size_t r = 0; r < m; ++r) {
      if (r != rank && rows[r].get(col)) {
        rows[r] ^= rows[rank];
        aug[r] ^= aug[rank];
      }
    }
    e.pivot_col.push_back(col);
    ++rank;
  }
  rows.resize(m);
  e.rows = std::move(rows);
  e.aug = std::move(aug);
  return e;
}

}  // namespace

GF2Solution gf2_solve(const GF2Matrix& a, const GF2Vector& b) {
  if (b.size() != a.rows()) throw std::invalid_argument("gf2_solve size mismatch");
  Echelon e = eliminate(a, &b);
  std::size_t n = a.cols();
  std::size_t rank = e.pivot_col.size();

  GF2Solution sol;
  sol.feasible = true;
  for (std::size_t r = rank; r < a.rows(); ++r)
    if (e.aug[r].get(0)) sol.feasible = false;

  if (sol.feasible) {
    sol.particular = GF2Vector(n);
    for (std::size_t r = 0; r < rank; ++r)
      if (e.aug[r].get(0)) sol.particular.set(e.pivot_col[r], true);
  }

  std::vector<bool> is_pivot(n, false);
  for (auto c : e.pivot_col) is_pivot[c] = true;
  for (std::size_t c = 0; c < n; ++c) {
    if (is_pivot[c]) continue;
    GF2Vector k(n);
    k.set(c, true);
    for (std::size_t r = 0; r < rank; ++r)
      if (e.rows[r].get(c)) k.set(e.pivot_col[r], true);
    sol.kernel.push_back(std::move(k));
  }
  return sol;
}

std::size_t gf2_rank(const GF2Matrix& a) { return eliminate(a, nullptr).pivot_col.size(); }

std::vector<GF2Vector> gf2_kernel(const GF2Matrix& a) {
  GF2Vector zero(a.rows());
  return gf2_solve(a, zero).kernel;
}

bool gf2_in_span(const std::vector<GF2Vector>& gens, const GF2Vector& v) {
  if (gens.empty()) return v.is_zero();
  GF2Matrix a(v.size(), gens.size());
  for (std::size_t j = 0; j < gens.size(); ++j) {
    if (gens[j].size() != v.size()) throw std::invalid_argument("gf2_in_span size mismatch");
    for (std::size_t i : gens[j].support()) a.set(i, j, true);
  }
  return gf2_solve(a, v).feasible;
}

std::size_t gf2_span_rank(const std::vector<GF2Vector>& gens) {
  if (gens.empty()) return 0;
  GF2Matrix a(gens.size(), gens[0].size());
  for (std::size_t i = 0; i < gens.size(); ++i) a.row(i) = gens[i];
  return gf2_rank(a);
}

}  // namespace spinscape
