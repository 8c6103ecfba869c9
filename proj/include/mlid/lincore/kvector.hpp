#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mlid/common/error.hpp"
#include "mlid/lincore/matrix.hpp"

namespace mlid::lincore {

// Index subsets of {0..n-1} are bitmasks; coefficient arrays are indexed by
// colexicographic rank, rank(S) = sum_i C(s_i, i+1) for s_0 < s_1 < ...
using SubsetMask = std::uint32_t;

constexpr int kMaxAmbientDim = 24;

std::uint64_t binomial(int n, int k);
std::size_t colex_rank(SubsetMask subset);
SubsetMask colex_unrank(std::size_t rank, int grade);

// Sign of the permutation sorting the concatenation (a, b) of two disjoint
// sorted index lists: (-1)^{#{(i in a, j in b) : i > j}}.
int merge_sign(SubsetMask a, SubsetMask b);

// Antisymmetric k-vector in R^n, coefficients on the basis e_S, |S| = k.
template <class S>
class KVector {
 public:
  KVector(int dim, int grade) : dim_(dim), grade_(grade) {
    require(dim >= 1 && dim <= kMaxAmbientDim, ErrorCode::kInvalidArgument, "ambient dimension out of range");
    require(grade >= 0 && grade <= dim, ErrorCode::kInvalidArgument, "grade must lie in [0, n]");
    coeffs_.assign(binomial(dim, grade), S(0));
  }

  static KVector scalar(int dim, const S& value) {
    KVector out(dim, 0);
    out.coeffs_[0] = value;
    return out;
  }

  static KVector vector(std::span<const S> components) {
    KVector out(static_cast<int>(components.size()), 1);
    for (std::size_t i = 0; i < components.size(); ++i) out.coeffs_[i] = components[i];
    return out;
  }

  // Top-grade element e_1 ^ ... ^ e_n with the given coefficient.
  static KVector volume(int dim, const S& value = S(1)) {
    KVector out(dim, dim);
    out.coeffs_[0] = value;
    return out;
  }

  int dim() const { return dim_; }
  int grade() const { return grade_; }
  std::size_t size() const { return coeffs_.size(); }

  const S& operator[](std::size_t rank) const { return coeffs_[rank]; }
  S& operator[](std::size_t rank) { return coeffs_[rank]; }

  const S& at(SubsetMask subset) const { return coeffs_[checked_rank(subset)]; }
  S& at(SubsetMask subset) { return coeffs_[checked_rank(subset)]; }

  SubsetMask subset(std::size_t rank) const { return colex_unrank(rank, grade_); }

  // Scalar value of a grade-0 or grade-n element.
  const S& scalar_value() const {
    require(grade_ == 0 || grade_ == dim_, ErrorCode::kInvalidArgument,
            "scalar value requested from a middle-grade k-vector");
    return coeffs_[0];
  }

  bool is_zero() const {
    for (const auto& c : coeffs_)
      if (c != 0) return false;
    return true;
  }

  std::vector<S> components() const { return coeffs_; }

  bool operator==(const KVector& other) const = default;

 private:
  std::size_t checked_rank(SubsetMask subset) const {
    require(std::popcount(subset) == grade_ && (subset >> dim_) == 0, ErrorCode::kInvalidArgument,
            "subset does not match k-vector grade or dimension");
    return colex_rank(subset);
  }

  int dim_;
  int grade_;
  std::vector<S> coeffs_;
};

template <class S>
KVector<S> wedge(const KVector<S>& a, const KVector<S>& b) {
  require(a.dim() == b.dim(), ErrorCode::kDimensionMismatch, "wedge of k-vectors in different dimensions");
  require(a.grade() + b.grade() <= a.dim(), ErrorCode::kInvalidArgument, "wedge grade exceeds ambient dimension");
  KVector<S> out(a.dim(), a.grade() + b.grade());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    const SubsetMask sa = a.subset(i);
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (b[j] == 0) continue;
      const SubsetMask sb = b.subset(j);
      if (sa & sb) continue;
      const S term = a[i] * b[j];
      if (merge_sign(sa, sb) > 0) {
        out.at(sa | sb) += term;
      } else {
        out.at(sa | sb) -= term;
      }
    }
  }
  return out;
}

// Wedge of m vectors of R^n, in order.
template <class S>
KVector<S> wedge_vectors(const std::vector<std::vector<S>>& vectors, int dim) {
  require(vectors.size() <= static_cast<std::size_t>(dim), ErrorCode::kInvalidArgument,
          "more vectors than the ambient dimension");
  KVector<S> acc = KVector<S>::scalar(dim, S(1));
  for (const auto& v : vectors) {
    require(v.size() == static_cast<std::size_t>(dim), ErrorCode::kDimensionMismatch,
            "wedge input vector has the wrong dimension");
    acc = wedge(acc, KVector<S>::vector(std::span<const S>(v)));
  }
  return acc;
}

// Wedge of the columns of an n x m matrix.
template <class S>
KVector<S> wedge_columns(const Matrix<S>& m) {
  std::vector<std::vector<S>> cols;
  cols.reserve(m.cols());
  for (std::size_t c = 0; c < m.cols(); ++c) cols.push_back(m.column(c));
  return wedge_vectors(cols, static_cast<int>(m.rows()));
}

// Hodge dual fixed by the pairing <dual(L), C> = L ^ C (as the coefficient of
// e_1 ^ ... ^ e_n) for every C of complementary grade.
template <class S>
KVector<S> hodge_dual(const KVector<S>& v) {
  const int n = v.dim();
  const SubsetMask full = n == 32 ? ~SubsetMask{0} : ((SubsetMask{1} << n) - 1);
  KVector<S> out(n, n - v.grade());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const SubsetMask s = v.subset(i);
    const SubsetMask complement = full & ~s;
    if (merge_sign(s, complement) > 0) {
      out.at(complement) = v[i];
    } else {
      out.at(complement) = -v[i];
    }
  }
  return out;
}

// Euclidean inner product of k-vectors in the orthonormal basis e_S.
template <class S>
S inner(const KVector<S>& a, const KVector<S>& b) {
  require(a.dim() == b.dim() && a.grade() == b.grade(), ErrorCode::kDimensionMismatch,
          "inner product of k-vectors with different shapes");
  S acc(0);
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

// Dual of a grade n-1 element, as a plain vector of R^n.
template <class S>
std::vector<S> dual_vector(const KVector<S>& v) {
  require(v.grade() == v.dim() - 1, ErrorCode::kInvalidArgument, "dual_vector expects an (n-1)-vector");
  return hodge_dual(v).components();
}

}  // namespace mlid::lincore
