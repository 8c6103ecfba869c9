#include "mlid/extension/convention.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "mlid/common/digest.hpp"
#include "mlid/common/error.hpp"
#include "mlid/phases/support.hpp"

namespace mlid::extension {

double FourierConvention::plancherel_factor() const {
  return 2.0 * std::numbers::pi / std::abs(frequency_scale);
}

double FourierConvention::identity_constant(int n) const {
  return std::pow(plancherel_factor(), n * (n - 1));
}

double FourierConvention::paraboloid_matrix_factor(int n) const {
  const std::vector<phases::PhaseFunction> ph(n, phases::PhaseFunction::paraboloid(n - 1));
  std::vector<phases::Point> simplex(n, phases::Point(n - 1, 0.0));
  for (int j = 1; j < n; ++j) simplex[j][j - 1] = 1.0;
  return 1.0 / phases::transversality_weight(ph, simplex);
}

double FourierConvention::inverse_normalization(int d) const {
  return std::pow(plancherel_factor(), -d);
}

double FourierConvention::schrodinger_constant(int d) const {
  const int n = d + 1;
  return std::pow(inverse_normalization(d), 2 * n) * identity_constant(n) * paraboloid_matrix_factor(n);
}

double FourierConvention::ot_constant(int d) const {
  // int |f^|^2 = plancherel^d ||f||^2 for each of the d+1 factors.
  return schrodinger_constant(d) * std::pow(plancherel_factor(), d * (d + 1));
}

std::string FourierConvention::fingerprint() const {
  std::ostringstream os;
  os << "forward=" << forward_sign << ";extension=" << extension_sign << ";scale=" << frequency_scale;
  return hex_digest(os.str());
}

const FourierConvention& default_convention() {
  static const FourierConvention c{};
  return c;
}

std::vector<ConstantCheck> verify_default_constants() {
  const auto& c = default_convention();
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<ConstantCheck> out;
  for (int n = 2; n <= 5; ++n) {
    out.push_back({"identity_constant(n=" + std::to_string(n) + ")", c.identity_constant(n), std::pow(two_pi, n * (n - 1))});
    out.push_back({"paraboloid_matrix_factor(n=" + std::to_string(n) + ")", c.paraboloid_matrix_factor(n),
                   std::pow(2.0, -(n - 1))});
  }
  for (int d = 1; d <= 3; ++d) {
    out.push_back({"schrodinger_constant(d=" + std::to_string(d) + ")", c.schrodinger_constant(d),
                   1.0 / (std::pow(2.0, d) * std::pow(two_pi, d * (d + 1)))});
    out.push_back({"ot_constant(d=" + std::to_string(d) + ")", c.ot_constant(d), std::pow(2.0, -d)});
  }
  for (const auto& check : out) {
    require(std::abs(check.derived - check.expected) <= 1e-12 * std::abs(check.expected), ErrorCode::kInvariantViolation,
            "derived constant " + check.name + " disagrees with its closed form");
  }
  return out;
}

}  // namespace mlid::extension
