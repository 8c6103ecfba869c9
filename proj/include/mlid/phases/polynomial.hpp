#pragma once

#include <span>
#include <vector>

namespace mlid::phases {

struct Monomial {
  std::vector<int> exponents;
  double coeff = 0.0;
};

// Sparse real polynomial in `dim` variables with analytic first and second
// derivatives.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(int dim, std::vector<Monomial> terms);

  int dim() const { return dim_; }
  const std::vector<Monomial>& terms() const { return terms_; }
  int degree() const { return max_degree_; }

  double value(std::span<const double> x) const;
  void gradient(std::span<const double> x, std::span<double> out) const;
  // d^2 p / (dx_a dx_b).
  double second_partial(std::span<const double> x, int a, int b) const;

  Polynomial scaled(double factor) const;

  // |x|^2 in `dim` variables.
  static Polynomial squared_norm(int dim);

 private:
  // powers[v * (max_degree_ + 1) + e] = x_v^e
  void fill_powers(std::span<const double> x, std::vector<double>& powers) const;

  int dim_ = 0;
  int max_degree_ = 0;
  std::vector<Monomial> terms_;
};

}  // namespace mlid::phases
