#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qnc/error.hpp"

namespace qnc {

bool is_prime(uint32_t n);

// Smallest prime >= max(2, n_targets). A multicast code over that field is
// guaranteed to exist whenever the network is feasible; callers may pick a
// larger prime but never a smaller one.
uint32_t choose_field_size(uint32_t n_targets);

// Element of the prime field F_p. The modulus travels with the value and
// mixed-modulus arithmetic is a hard error, not a silent re-reduction.
class FieldElem {
public:
  FieldElem() : v_(0), p_(2) {}
  FieldElem(uint64_t v, uint32_t p);

  uint32_t value() const { return v_; }
  uint32_t modulus() const { return p_; }

  FieldElem operator+(FieldElem o) const;
  FieldElem operator-(FieldElem o) const;
  FieldElem operator*(FieldElem o) const;
  FieldElem operator-() const;
  FieldElem inv() const;

  bool is_zero() const { return v_ == 0; }
  bool operator==(const FieldElem& o) const = default;

private:
  void check_same(const FieldElem& o) const;
  uint32_t v_;
  uint32_t p_;
};

using FVec = std::vector<FieldElem>;
using FMat = std::vector<FVec>;  // row-major

FVec fvec_zero(size_t n, uint32_t p);
FVec fvec_unit(size_t n, size_t i, uint32_t p);
FieldElem fvec_dot(const FVec& a, const FVec& b);
// acc += c * v
void fvec_add_scaled(FVec& acc, FieldElem c, const FVec& v);

size_t mat_rank(FMat m);
// Inverse of a square matrix; Errc::no_inverse if singular.
FMat mat_inverse(const FMat& m);
// Indices of the first rows (in order) that form a basis of the row space.
std::vector<size_t> greedy_row_basis(const FMat& rows);

}  // namespace qnc
