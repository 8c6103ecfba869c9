#include "mlid/lincore/block_det.hpp"

namespace mlid::lincore {

int hess_sign(int n) {
  require(n >= 2, ErrorCode::kInvalidArgument, "hess_sign needs n >= 2");
  const long long m = n - 1;
  const long long exponent = m + m * m * (n - 2) / 2;
  return exponent % 2 == 0 ? 1 : -1;
}

BlockMatrixSpec<Rational> random_integer_spec(int n, int k, CounterRng& rng, int lo, int hi) {
  BlockMatrixSpec<Rational> spec;
  spec.n = n;
  spec.k = k;
  for (int b = 0; b < k; ++b) {
    Matrix<Rational> block(n, n - 1);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n - 1; ++c) block(r, c) = Rational(static_cast<long>(rng.integer(lo, hi)));
    spec.blocks.push_back(std::move(block));
  }
  spec.last = Matrix<Rational>(n, k);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < k; ++c) spec.last(r, c) = Rational(static_cast<long>(rng.integer(lo, hi)));
  spec.validate();
  return spec;
}

BlockMatrixSpec<double> to_double(const BlockMatrixSpec<Rational>& spec) {
  BlockMatrixSpec<double> out;
  out.n = spec.n;
  out.k = spec.k;
  for (const auto& b : spec.blocks) out.blocks.push_back(to_double(b));
  out.last = to_double(spec.last);
  return out;
}

}  // namespace mlid::lincore
