#include "mlid/lincore/matrix.hpp"

#include <Eigen/Dense>
#include <utility>

namespace mlid::lincore {

double determinant(const Matrix<double>& m) {
  require(m.rows() == m.cols(), ErrorCode::kDimensionMismatch, "determinant of a non-square matrix");
  const auto n = static_cast<Eigen::Index>(m.rows());
  if (n == 0) return 1.0;
  Eigen::MatrixXd dense(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) dense(r, c) = m(r, c);
  return dense.partialPivLu().determinant();
}

Rational determinant(const Matrix<Rational>& m) {
  require(m.rows() == m.cols(), ErrorCode::kDimensionMismatch, "determinant of a non-square matrix");
  const std::size_t n = m.rows();
  if (n == 0) return Rational(1);

  // Clear denominators row by row so elimination runs over integers.
  std::vector<mpz_class> a(n * n);
  mpz_class scale = 1;
  for (std::size_t r = 0; r < n; ++r) {
    mpz_class row_lcm = 1;
    for (std::size_t c = 0; c < n; ++c) {
      mpz_lcm(row_lcm.get_mpz_t(), row_lcm.get_mpz_t(), m(r, c).get_den_mpz_t());
    }
    for (std::size_t c = 0; c < n; ++c) {
      a[r * n + c] = m(r, c).get_num() * (row_lcm / m(r, c).get_den());
    }
    scale *= row_lcm;
  }

  int sign = 1;
  mpz_class prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k * n + k] == 0) {
      std::size_t pivot = k + 1;
      while (pivot < n && a[pivot * n + k] == 0) ++pivot;
      if (pivot == n) return Rational(0);
      for (std::size_t c = 0; c < n; ++c) std::swap(a[k * n + c], a[pivot * n + c]);
      sign = -sign;
    }
    const mpz_class& pivot_value = a[k * n + k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const mpz_class lead = a[i * n + k];
      for (std::size_t j = k + 1; j < n; ++j) {
        mpz_class& target = a[i * n + j];
        target = target * pivot_value - lead * a[k * n + j];
        mpz_divexact(target.get_mpz_t(), target.get_mpz_t(), prev.get_mpz_t());
      }
      a[i * n + k] = 0;
    }
    prev = pivot_value;
  }
  Rational det(a[(n - 1) * n + (n - 1)] * sign, scale);
  det.canonicalize();
  return det;
}

Matrix<double> to_double(const Matrix<Rational>& m) {
  Matrix<double> out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = m(r, c).get_d();
  return out;
}

std::string to_string(const Rational& q) { return q.get_str(); }

}  // namespace mlid::lincore
