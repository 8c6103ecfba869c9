#pragma once

#include <string>
#include <vector>

namespace mlid::extension {

// Fourier transform on R^d:  f^(xi) = int e^{forward_sign * i b x.xi} f(x) dx,
// extension operator:         Eg(x) = int e^{extension_sign * i b (x'.xi + x_n phi(xi))} g(xi) dxi,
// with Plancherel  int |f|^2 = (|b| / 2pi)^d int |f^|^2.
// Every displayed constant is derived from these fields.
struct FourierConvention {
  int forward_sign = -1;
  int extension_sign = 1;
  double frequency_scale = 1.0;

  // int_{R^d} |int e^{i b x.xi} g(xi) dxi|^2 dx = plancherel_factor()^d int |g|^2.
  double plancherel_factor() const;
  // Constant of the multilinear identity on the subspace x_1 + ... + x_n = 0.
  double identity_constant(int n) const;
  // Factor converting the paraboloid transversality weight into the
  // (1; xi_j) determinant form: 1 / weight(0, e_1, ..., e_{n-1}).
  double paraboloid_matrix_factor(int n) const;
  // Normalisation of the inverse transform, u = inverse_normalization(d) * E f^.
  double inverse_normalization(int d) const;
  // Constant of the (d+1)-linear Schrodinger identity.
  double schrodinger_constant(int d) const;
  // Constant of the sigma = 1/2 Schrodinger identity against prod ||f_j||^2.
  double ot_constant(int d) const;

  std::string fingerprint() const;
};

const FourierConvention& default_convention();

struct ConstantCheck {
  std::string name;
  double derived;
  double expected;
};

// Derived constants of the default convention next to their closed forms;
// throws kInvariantViolation on any mismatch beyond 1e-12 relative.
std::vector<ConstantCheck> verify_default_constants();

}  // namespace mlid::extension
