#pragma once

#include <vector>

#include "mlid/common/rng.hpp"
#include "mlid/lincore/kvector.hpp"
#include "mlid/lincore/matrix.hpp"

namespace mlid::lincore {

// Inputs of the nk x nk block matrix
//
//   [ A1  0  ...  0  B ]
//   [ 0   A2 ...  0  B ]
//   [ ...              ]
//   [ 0   0  ...  Ak B ]
//
// with k blocks Ai of shape n x (n-1) and a shared last block B of shape n x k.
template <class S>
struct BlockMatrixSpec {
  int n = 0;
  int k = 0;
  std::vector<Matrix<S>> blocks;
  Matrix<S> last;

  void validate() const {
    require(n >= 2, ErrorCode::kInvalidArgument, "block spec needs n >= 2");
    require(k >= 1 && k <= n - 1, ErrorCode::kInvalidArgument, "block spec needs 1 <= k <= n-1");
    require(blocks.size() == static_cast<std::size_t>(k), ErrorCode::kDimensionMismatch,
            "block spec must carry exactly k diagonal blocks");
    for (const auto& b : blocks) {
      require(b.rows() == static_cast<std::size_t>(n) && b.cols() == static_cast<std::size_t>(n - 1),
              ErrorCode::kDimensionMismatch, "diagonal blocks must be n x (n-1)");
    }
    require(last.rows() == static_cast<std::size_t>(n) && last.cols() == static_cast<std::size_t>(k),
            ErrorCode::kDimensionMismatch, "last block must be n x k");
  }

  Matrix<S> assemble() const {
    validate();
    const std::size_t side = static_cast<std::size_t>(n) * k;
    Matrix<S> m(side, side);
    for (int b = 0; b < k; ++b) {
      const std::size_t row0 = static_cast<std::size_t>(b) * n;
      const std::size_t col0 = static_cast<std::size_t>(b) * (n - 1);
      for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n - 1; ++c) m(row0 + r, col0 + c) = blocks[b](r, c);
        for (int c = 0; c < k; ++c) m(row0 + r, side - k + c) = last(r, c);
      }
    }
    return m;
  }
};

// Dense determinant of the assembled matrix.
template <class S>
S block_det_direct(const BlockMatrixSpec<S>& spec) {
  return determinant(spec.assemble());
}

// (-1)^{(n-1)k(k-1)/2} det[ L_i ^ C_j ], L_i the wedge of the columns of the
// i-th diagonal block and C_j the j-th column of the last block.
template <class S>
S block_det_wedge(const BlockMatrixSpec<S>& spec) {
  spec.validate();
  const int n = spec.n;
  const int k = spec.k;
  std::vector<KVector<S>> lambdas;
  lambdas.reserve(k);
  for (const auto& block : spec.blocks) lambdas.push_back(wedge_columns(block));

  Matrix<S> pairing(k, k);
  for (int j = 0; j < k; ++j) {
    const std::vector<S> column = spec.last.column(j);
    const KVector<S> c = KVector<S>::vector(std::span<const S>(column));
    for (int i = 0; i < k; ++i) pairing(i, j) = wedge(lambdas[i], c).scalar_value();
  }
  const long long exponent = static_cast<long long>(n - 1) * k * (k - 1) / 2;
  S det = determinant(pairing);
  if (exponent % 2 != 0) det = -det;
  return det;
}

// Sign (-1)^{n-1+(n-1)^2(n-2)/2} relating det Hess Psi to det(X_1..X_n).
int hess_sign(int n);

// Block spec with independent uniform integer entries in [lo, hi].
BlockMatrixSpec<Rational> random_integer_spec(int n, int k, CounterRng& rng, int lo = -9, int hi = 9);

BlockMatrixSpec<double> to_double(const BlockMatrixSpec<Rational>& spec);

}  // namespace mlid::lincore
