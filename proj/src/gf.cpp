#include "qnc/gf.hpp"

namespace qnc {

bool is_prime(uint32_t n) {
  if (n < 2) return false;
  for (uint32_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

uint32_t choose_field_size(uint32_t n_targets) {
  uint32_t p = n_targets < 2 ? 2 : n_targets;
  while (!is_prime(p)) ++p;
  return p;
}

FieldElem::FieldElem(uint64_t v, uint32_t p) : v_(0), p_(p) {
  if (!is_prime(p)) fail(Errc::not_prime, "field modulus " + std::to_string(p) + " is not prime");
  v_ = static_cast<uint32_t>(v % p);
}

void FieldElem::check_same(const FieldElem& o) const {
  if (p_ != o.p_)
    fail(Errc::modulus_mismatch, "mixed field moduli " + std::to_string(p_) + " and " +
                                     std::to_string(o.p_));
}

FieldElem FieldElem::operator+(FieldElem o) const {
  check_same(o);
  return FieldElem((uint64_t)v_ + o.v_, p_);
}

FieldElem FieldElem::operator-(FieldElem o) const {
  check_same(o);
  return FieldElem((uint64_t)v_ + p_ - o.v_, p_);
}

FieldElem FieldElem::operator*(FieldElem o) const {
  check_same(o);
  return FieldElem((uint64_t)v_ * o.v_, p_);
}

FieldElem FieldElem::operator-() const { return FieldElem((uint64_t)p_ - v_, p_); }

FieldElem FieldElem::inv() const {
  if (v_ == 0) fail(Errc::no_inverse, "zero has no multiplicative inverse");
  // Fermat: v^(p-2) mod p
  uint64_t base = v_, acc = 1, e = p_ - 2;
  while (e) {
    if (e & 1) acc = acc * base % p_;
    base = base * base % p_;
    e >>= 1;
  }
  return FieldElem(acc, p_);
}

FVec fvec_zero(size_t n, uint32_t p) { return FVec(n, FieldElem(0, p)); }

FVec fvec_unit(size_t n, size_t i, uint32_t p) {
  FVec v = fvec_zero(n, p);
  v[i] = FieldElem(1, p);
  return v;
}

FieldElem fvec_dot(const FVec& a, const FVec& b) {
  if (a.size() != b.size()) fail(Errc::schema_violation, "dot of vectors with different lengths");
  FieldElem acc(0, a.empty() ? 2u : a[0].modulus());
  for (size_t i = 0; i < a.size(); ++i) acc = acc + a[i] * b[i];
  return acc;
}

void fvec_add_scaled(FVec& acc, FieldElem c, const FVec& v) {
  if (acc.size() != v.size()) fail(Errc::schema_violation, "adding vectors of different lengths");
  for (size_t i = 0; i < acc.size(); ++i) acc[i] = acc[i] + c * v[i];
}

size_t mat_rank(FMat m) {
  size_t rank = 0;
  size_t cols = m.empty() ? 0 : m[0].size();
  for (size_t c = 0; c < cols && rank < m.size(); ++c) {
    size_t piv = rank;
    while (piv < m.size() && m[piv][c].is_zero()) ++piv;
    if (piv == m.size()) continue;
    std::swap(m[rank], m[piv]);
    FieldElem inv = m[rank][c].inv();
    for (size_t j = 0; j < cols; ++j) m[rank][j] = m[rank][j] * inv;
    for (size_t r = 0; r < m.size(); ++r) {
      if (r == rank || m[r][c].is_zero()) continue;
      FieldElem f = m[r][c];
      for (size_t j = 0; j < cols; ++j) m[r][j] = m[r][j] - f * m[rank][j];
    }
    ++rank;
  }
  return rank;
}

FMat mat_inverse(const FMat& m) {
  size_t n = m.size();
  if (n == 0 || m[0].size() != n) fail(Errc::no_inverse, "inverse of non-square matrix");
  uint32_t p = m[0][0].modulus();
  // augmented [m | I], reduce to [I | m^-1]
  FMat a(n, fvec_zero(2 * n, p));
  for (size_t r = 0; r < n; ++r) {
    for (size_t c = 0; c < n; ++c) a[r][c] = m[r][c];
    a[r][n + r] = FieldElem(1, p);
  }
  for (size_t c = 0; c < n; ++c) {
    size_t piv = c;
    while (piv < n && a[piv][c].is_zero()) ++piv;
    if (piv == n) fail(Errc::no_inverse, "singular matrix");
    std::swap(a[c], a[piv]);
    FieldElem inv = a[c][c].inv();
    for (size_t j = 0; j < 2 * n; ++j) a[c][j] = a[c][j] * inv;
    for (size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c].is_zero()) continue;
      FieldElem f = a[r][c];
      for (size_t j = 0; j < 2 * n; ++j) a[r][j] = a[r][j] - f * a[c][j];
    }
  }
  FMat out(n, fvec_zero(n, p));
  for (size_t r = 0; r < n; ++r)
    for (size_t c = 0; c < n; ++c) out[r][c] = a[r][n + c];
  return out;
}

std::vector<size_t> greedy_row_basis(const FMat& rows) {
  std::vector<size_t> picked;
  FMat basis;
  for (size_t i = 0; i < rows.size(); ++i) {
    FMat trial = basis;
    trial.push_back(rows[i]);
    if (mat_rank(trial) > basis.size()) {
      basis.push_back(rows[i]);
      picked.push_back(i);
    }
  }
  return picked;
}

}  // namespace qnc
