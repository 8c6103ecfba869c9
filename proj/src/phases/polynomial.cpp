#include "mlid/phases/polynomial.hpp"

#include <algorithm>

#include "mlid/common/error.hpp"

namespace mlid::phases {

Polynomial::Polynomial(int dim, std::vector<Monomial> terms) : dim_(dim), terms_(std::move(terms)) {
  require(dim >= 1, ErrorCode::kInvalidArgument, "polynomial needs at least one variable");
  for (const auto& t : terms_) {
    require(t.exponents.size() == static_cast<std::size_t>(dim), ErrorCode::kDimensionMismatch,
            "monomial exponent count differs from polynomial dimension");
    for (int e : t.exponents) {
      require(e >= 0, ErrorCode::kInvalidArgument, "negative monomial exponent");
      max_degree_ = std::max(max_degree_, e);
    }
  }
}

void Polynomial::fill_powers(std::span<const double> x, std::vector<double>& powers) const {
  require(x.size() == static_cast<std::size_t>(dim_), ErrorCode::kDimensionMismatch,
          "polynomial evaluated at a point of the wrong dimension");
  const int stride = max_degree_ + 1;
  powers.resize(static_cast<std::size_t>(dim_) * stride);
  for (int v = 0; v < dim_; ++v) {
    double p = 1.0;
    for (int e = 0; e <= max_degree_; ++e) {
      powers[v * stride + e] = p;
      p *= x[v];
    }
  }
}

double Polynomial::value(std::span<const double> x) const {
  thread_local std::vector<double> powers;
  fill_powers(x, powers);
  const int stride = max_degree_ + 1;
  double total = 0.0;
  for (const auto& t : terms_) {
    double term = t.coeff;
    for (int v = 0; v < dim_; ++v) term *= powers[v * stride + t.exponents[v]];
    total += term;
  }
  return total;
}

void Polynomial::gradient(std::span<const double> x, std::span<double> out) const {
  thread_local std::vector<double> powers;
  fill_powers(x, powers);
  const int stride = max_degree_ + 1;
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& t : terms_) {
    for (int a = 0; a < dim_; ++a) {
      const int ea = t.exponents[a];
      if (ea == 0) continue;
      double term = t.coeff * ea;
      for (int v = 0; v < dim_; ++v) term *= powers[v * stride + (v == a ? ea - 1 : t.exponents[v])];
      out[a] += term;
    }
  }
}

double Polynomial::second_partial(std::span<const double> x, int a, int b) const {
  thread_local std::vector<double> powers;
  fill_powers(x, powers);
  const int stride = max_degree_ + 1;
  double total = 0.0;
  for (const auto& t : terms_) {
    std::vector<int> e = t.exponents;
    double factor = t.coeff;
    factor *= e[a];
    if (e[a] == 0) continue;
    --e[a];
    factor *= e[b];
    if (e[b] == 0) continue;
    --e[b];
    for (int v = 0; v < dim_; ++v) factor *= powers[v * stride + e[v]];
    total += factor;
  }
  return total;
}

Polynomial Polynomial::scaled(double factor) const {
  Polynomial out = *this;
  for (auto& t : out.terms_) t.coeff *= factor;
  return out;
}

Polynomial Polynomial::squared_norm(int dim) {
  std::vector<Monomial> terms;
  for (int v = 0; v < dim; ++v) {
    Monomial m{std::vector<int>(dim, 0), 1.0};
    m.exponents[v] = 2;
    terms.push_back(std::move(m));
  }
  return Polynomial(dim, std::move(terms));
}

}  // namespace mlid::phases
