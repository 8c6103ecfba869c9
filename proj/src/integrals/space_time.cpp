#include "mlid/integrals/space_time.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "mlid/common/error.hpp"
#include "mlid/common/parallel.hpp"
#include "mlid/extension/spectral.hpp"

namespace mlid::integrals {
namespace {

using Complex = std::complex<double>;
using phases::Density;

// Largest |k| where the spectrum of f exceeds level * peak, from a finely
// sampled FFT over a window four times the support.
double estimate_cutoff(const Density& f, double level) {
  constexpr int kSamples = 8192;
  const double lo = f.box().lo[0], hi = f.box().hi[0];
  const double width = std::max(hi - lo, 1e-3);
  const double start = 0.5 * (lo + hi) - 2.0 * width;
  const double h = 4.0 * width / kSamples;
  std::vector<Complex> s(kSamples);
  for (int i = 0; i < kSamples; ++i) s[i] = f.at(start + i * h);
  extension::fft_inplace(s, false);
  const auto k = extension::fft_frequencies(kSamples, h);
  double peak = 0.0;
  for (const auto& v : s) peak = std::max(peak, std::abs(v));
  double cutoff = 0.0, edge = 0.0;
  const double nyquist = std::numbers::pi / h;
  for (int i = 0; i < kSamples; ++i) {
    if (std::abs(s[i]) > level * peak) cutoff = std::max(cutoff, std::abs(k[i]));
    if (std::abs(k[i]) > 0.9 * nyquist) edge = std::max(edge, std::abs(s[i]));
  }
  require(edge <= level * peak, ErrorCode::kInsufficientDecay,
          "datum spectrum has not decayed at frequency " + std::to_string(0.9 * nyquist) + "; data must be smooth");
  return cutoff;
}

struct Setup {
  int n = 0;
  double dx = 0.0;
  std::vector<double> k;
  std::vector<Complex> spec1, spec2;
  double norm1 = 0.0, norm2 = 0.0;
};

Setup make_setup(const Density& f1, const Density& f2, const SpaceTimeGrid& grid) {
  require(f1.dim() == 1 && f2.dim() == 1, ErrorCode::kDimensionMismatch, "space-time identity data must live on R");
  require(grid.t_max > grid.t_uniform && grid.t_uniform > 0 && grid.uniform_steps >= 2 && grid.growth > 1,
          ErrorCode::kInvalidArgument, "time grid needs 0 < t_uniform < t_max, at least 2 steps and growth > 1");
  const double k1 = grid.frequency_cutoff > 0 ? grid.frequency_cutoff : estimate_cutoff(f1, grid.cutoff_level);
  const double k2 = grid.frequency_cutoff > 0 ? grid.frequency_cutoff : estimate_cutoff(f2, grid.cutoff_level);
  const double kmax = std::max({k1, k2, 1.0});
  Setup s;
  // The product's spectrum lies in |k| <= K_1 + K_2, which the grid resolves.
  const double dx = std::numbers::pi / std::max(k1 + k2, 1.0);
  double reach = 0.0;
  for (const Density* f : {&f1, &f2}) reach = std::max({reach, std::abs(f->box().lo[0]), std::abs(f->box().hi[0])});
  const double length = 2.0 * (2.0 * grid.t_max * kmax + reach);
  int log2n = 10;
  while (std::ldexp(1.0, log2n) * dx < length) ++log2n;
  require(log2n <= grid.max_log2_points, ErrorCode::kQuadratureBudget,
          "spatial grid needs 2^" + std::to_string(log2n) + " points, above the cap 2^" +
              std::to_string(grid.max_log2_points));
  s.n = 1 << log2n;
  s.dx = dx;
  s.k = extension::fft_frequencies(s.n, dx);
  const double origin = -0.5 * s.n * dx;
  s.spec1.resize(s.n);
  s.spec2.resize(s.n);
  std::vector<double> m1(s.n), m2(s.n);
  for (int i = 0; i < s.n; ++i) {
    const double x = origin + i * dx;
    s.spec1[i] = f1.at(x);
    s.spec2[i] = f2.at(x);
    m1[i] = std::norm(s.spec1[i]);
    m2[i] = std::norm(s.spec2[i]);
  }
  s.norm1 = dx * pairwise_sum(m1);
  s.norm2 = dx * pairwise_sum(m2);
  extension::fft_inplace(s.spec1, false);
  extension::fft_inplace(s.spec2, false);
  for (const auto* spec : {&s.spec1, &s.spec2}) {
    double peak = 0.0;
    for (const auto& v : *spec) peak = std::max(peak, std::abs(v));
    const double edge = std::abs((*spec)[s.n / 2]);
    require(edge <= grid.spectrum_decay * peak, ErrorCode::kInsufficientDecay,
            "datum spectrum is not below " + std::to_string(grid.spectrum_decay) + " of its peak at the grid Nyquist frequency");
  }
  return s;
}

double slice(const Setup& s, double t) {
  std::vector<Complex> u1(s.n), u2(s.n);
  for (int i = 0; i < s.n; ++i) {
    const Complex prop = std::polar(1.0, t * s.k[i] * s.k[i]);
    u1[i] = prop * s.spec1[i];
    u2[i] = prop * s.spec2[i];
  }
  extension::fft_inplace(u1, true);
  extension::fft_inplace(u2, true);
  extension::GridField p{{s.n}, {s.dx}, {-0.5 * s.n * s.dx}, std::vector<Complex>(s.n)};
  for (int i = 0; i < s.n; ++i) p.values[i] = u1[i] * std::conj(u2[i]);
  // The grid is periodic by construction and sized so the solutions have not
  // reached its ends; the decay check guards that sizing.
  const auto d = extension::apply_fractional_multiplier(p, 0.5, {1e-6, 1});
  std::vector<double> sq(s.n);
  for (int i = 0; i < s.n; ++i) sq[i] = std::norm(d.values[i]);
  return s.dx * pairwise_sum(sq);
}

}  // namespace

double ot_time_slice(const Density& f1, const Density& f2, double t, const SpaceTimeGrid& grid) {
  if (f1.known_zero() || f2.known_zero()) return 0.0;
  SpaceTimeGrid g = grid;
  g.t_max = std::max(grid.t_max, std::abs(t));
  return slice(make_setup(f1, f2, g), t);
}

SpaceTimeResult ot_identity_lhs(const Density& f1, const Density& f2, const SpaceTimeGrid& grid) {
  SpaceTimeResult res;
  if (f1.known_zero() || f2.known_zero()) return res;
  const Setup s = make_setup(f1, f2, grid);
  res.norm1 = s.norm1;
  res.norm2 = s.norm2;
  res.spatial_points = static_cast<std::size_t>(s.n);
  res.dx = s.dx;
  res.length = s.n * s.dx;

  const int u = grid.uniform_steps;
  const int m = static_cast<int>(std::ceil(std::log(grid.t_max / grid.t_uniform) / std::log(grid.growth)));
  const double ratio = std::pow(grid.t_max / grid.t_uniform, 1.0 / m);
  // Node layout: uniform nodes 0..u, then +t and -t geometric nodes j = 1..m.
  std::vector<double> times;
  for (int i = 0; i <= u; ++i) times.push_back(-grid.t_uniform + 2.0 * grid.t_uniform * i / u);
  for (int j = 1; j <= m; ++j) times.push_back(grid.t_uniform * std::pow(ratio, j));
  for (int j = 1; j <= m; ++j) times.push_back(-grid.t_uniform * std::pow(ratio, j));
  const auto values = parallel_map(times.size(), grid.workers, [&](std::size_t i) { return slice(s, times[i]); });
  res.time_nodes = times.size();

  std::vector<double> terms;
  const double hu = 2.0 * grid.t_uniform / u;
  for (int i = 0; i <= u; ++i) terms.push_back(hu * (i == 0 || i == u ? 0.5 : 1.0) * values[i]);
  // Geometric part: trapezoid in s = log t, dt = t ds.
  const double hs = std::log(ratio);
  for (int side = 0; side < 2; ++side) {
    for (int j = 0; j <= m; ++j) {
      const std::size_t idx = j == 0 ? (side == 0 ? u : 0) : static_cast<std::size_t>(u + 1 + side * m + (j - 1));
      const double tj = grid.t_uniform * std::pow(ratio, j);
      terms.push_back(hs * (j == 0 || j == m ? 0.5 : 1.0) * tj * values[idx]);
    }
  }
  const double body = pairwise_sum(terms);
  res.tail = grid.t_max * (values[u + m] + values[u + 2 * m]);
  res.value = body + res.tail;
  require(std::isfinite(res.value), ErrorCode::kNonFinite, "space-time integral is not finite");
  if (res.tail > grid.tail_tolerance * std::abs(res.value)) {
    throw Error(ErrorCode::kTailModelRejected, "time tail " + std::to_string(res.tail) + " exceeds " +
                                                   std::to_string(grid.tail_tolerance) + " of the value " +
                                                   std::to_string(res.value) + "; increase t_max");
  }
  return res;
}

}  // namespace mlid::integrals
