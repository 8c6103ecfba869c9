#include "mlid/extension/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "mlid/common/error.hpp"
#include "mlid/phases/support.hpp"

namespace mlid::extension {
namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void transform(std::vector<std::complex<double>>& data, const std::vector<int>& shape, int sign) {
  // FFTW expects row-major (last axis fastest); our first axis is fastest.
  std::vector<int> dims(shape.rbegin(), shape.rend());
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf, buf, sign, FFTW_ESTIMATE);
  }
  require(plan != nullptr, ErrorCode::kInvalidArgument, "FFT plan creation failed");
  fftw_execute(plan);
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan);
}

void check_decay(const GridField& f, double tol) {
  double peak = 0.0;
  for (const auto& v : f.values) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return;
  const int m = f.dim();
  for (std::size_t i = 0; i < f.size(); ++i) {
    std::size_t rem = i;
    bool edge = false;
    for (int a = 0; a < m; ++a) {
      const int k = static_cast<int>(rem % f.shape[a]);
      rem /= f.shape[a];
      if (k == 0 || k == f.shape[a] - 1) edge = true;
    }
    if (edge && std::abs(f.values[i]) > tol * peak) {
      throw Error(ErrorCode::kInsufficientDecay, "field is not below " + std::to_string(tol) +
                                                     " of its peak at the grid boundary; enlarge the grid");
    }
  }
}

}  // namespace

std::vector<double> fft_frequencies(int n, double h) {
  std::vector<double> k(n);
  const double base = 2.0 * std::numbers::pi / (n * h);
  for (int j = 0; j < n; ++j) k[j] = base * (j <= n / 2 ? j : j - n);
  return k;
}

void fft_inplace(std::vector<std::complex<double>>& data, bool inverse) {
  transform(data, {static_cast<int>(data.size())}, inverse ? FFTW_BACKWARD : FFTW_FORWARD);
  if (inverse) {
    const double s = 1.0 / static_cast<double>(data.size());
    for (auto& v : data) v *= s;
  }
}

Symbol euclidean_power(double gamma) {
  require(gamma >= 0, ErrorCode::kInvalidArgument, "negative multiplier exponents are not supported");
  return [gamma](std::span<const double> k) {
    if (gamma == 0.0) return 1.0;
    double r2 = 0.0;
    for (double v : k) r2 += v * v;
    return std::pow(std::sqrt(r2), gamma);
  };
}

Symbol rho_power(int d, double gamma) {
  require(gamma >= 0, ErrorCode::kInvalidArgument, "negative multiplier exponents are not supported");
  return [d, gamma](std::span<const double> k) {
    require(k.size() == static_cast<std::size_t>(d * (d + 1)), ErrorCode::kDimensionMismatch,
            "rho symbol expects (d+1) frequency blocks of size d");
    if (gamma == 0.0) return 1.0;
    const int n = d + 1;
    std::vector<double> a(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j) {
      a[j] = 1.0;
      for (int r = 0; r < d; ++r) a[(r + 1) * n + j] = k[j * d + r];
    }
    return std::pow(std::abs(phases::small_determinant(a.data(), n)), gamma);
  };
}

GridField apply_multiplier(const GridField& field, const Symbol& symbol, const MultiplierOptions& options) {
  const int m = field.dim();
  require(m >= 1 && field.spacing.size() == static_cast<std::size_t>(m), ErrorCode::kDimensionMismatch,
          "grid field needs one spacing per axis");
  std::size_t total = 1;
  for (int s : field.shape) total *= static_cast<std::size_t>(s);
  require(total == field.size(), ErrorCode::kDimensionMismatch, "grid field sample count differs from its shape");
  check_decay(field, options.decay_tolerance);

  const int pad = std::max(1, options.padding);
  std::vector<int> big(m);
  std::size_t big_total = 1;
  for (int a = 0; a < m; ++a) {
    big[a] = field.shape[a] * pad;
    big_total *= static_cast<std::size_t>(big[a]);
  }
  std::vector<std::complex<double>> work(big_total, 0.0);
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rem = i, flat = 0, stride = 1;
    for (int a = 0; a < m; ++a) {
      const std::size_t k = rem % field.shape[a];
      rem /= field.shape[a];
      flat += k * stride;
      stride *= big[a];
    }
    work[flat] = field.values[i];
  }

  transform(work, big, FFTW_FORWARD);
  std::vector<std::vector<double>> freqs(m);
  for (int a = 0; a < m; ++a) freqs[a] = fft_frequencies(big[a], field.spacing[a]);
  std::vector<double> k(m);
  for (std::size_t i = 0; i < big_total; ++i) {
    std::size_t rem = i;
    for (int a = 0; a < m; ++a) {
      k[a] = freqs[a][rem % big[a]];
      rem /= big[a];
    }
    work[i] *= symbol(k) / static_cast<double>(big_total);
  }
  transform(work, big, FFTW_BACKWARD);

  GridField out = field;
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rem = i, flat = 0, stride = 1;
    for (int a = 0; a < m; ++a) {
      const std::size_t kk = rem % field.shape[a];
      rem /= field.shape[a];
      flat += kk * stride;
      stride *= big[a];
    }
    out.values[i] = work[flat];
  }
  return out;
}

GridField apply_fractional_multiplier(const GridField& field, double gamma, const MultiplierOptions& options) {
  return apply_multiplier(field, euclidean_power(gamma), options);
}

}  // namespace mlid::extension
