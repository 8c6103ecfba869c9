#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace mlid::extension {

// Complex samples on a uniform grid over R^m; node k of axis a sits at
// origin[a] + k * spacing[a]. First axis fastest.
struct GridField {
  std::vector<int> shape;
  std::vector<double> spacing;
  std::vector<double> origin;
  std::vector<std::complex<double>> values;

  int dim() const { return static_cast<int>(shape.size()); }
  std::size_t size() const { return values.size(); }
};

// Fourier multiplier symbol evaluated at an angular frequency vector.
using Symbol = std::function<double(std::span<const double> frequency)>;

// |xi|^gamma (Euclidean norm); value at the origin is 0 for gamma > 0.
Symbol euclidean_power(double gamma);
// |rho(xi)|^gamma for xi in (R^d)^{d+1}, rho = det(1 ... 1; xi_1 ... xi_{d+1}).
Symbol rho_power(int d, double gamma);

struct MultiplierOptions {
  // Decay required at the outer layer of the grid, relative to max |field|.
  double decay_tolerance = 1e-8;
  // Zero-pad every axis by this factor before transforming.
  int padding = 2;
};

// FFT, multiply by symbol, inverse FFT. Throws kInsufficientDecay when the
// field has not decayed at the grid boundary.
GridField apply_multiplier(const GridField& field, const Symbol& symbol, const MultiplierOptions& options = {});
GridField apply_fractional_multiplier(const GridField& field, double gamma, const MultiplierOptions& options = {});

// Angular frequencies of an n-point FFT with spacing h (standard ordering;
// the Nyquist bin is taken positive).
std::vector<double> fft_frequencies(int n, double h);

// In-place 1D transform with e^{-i k x} (forward) or e^{+i k x} / n (inverse).
void fft_inplace(std::vector<std::complex<double>>& data, bool inverse);

}  // namespace mlid::extension
