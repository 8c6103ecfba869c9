#include "mlid/extension/extension.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mlid/common/error.hpp"
#include "mlid/common/parallel.hpp"
#include "mlid/common/quadrature.hpp"
#include "mlid/phases/support.hpp"

namespace mlid::extension {
namespace {

using phases::Box;

NodeSet build_rule(const PhaseFunction& phase, const Box& box, std::span<const double> x_extent, double t_extent,
                   const QuadratureOptions& options, double panel_factor) {
  const int dim = box.dim();
  require(phase.dim() == dim, ErrorCode::kDimensionMismatch, "phase and density dimensions differ");
  require(x_extent.size() == static_cast<std::size_t>(dim), ErrorCode::kDimensionMismatch,
          "spatial point dimension differs from density dimension");
  const std::vector<double> grad = gradient_bounds(phase, box);
  NodeSet set;
  set.dim = dim;
  std::vector<QuadratureRule1D> axes;
  long double total = 1.0L;
  for (int a = 0; a < dim; ++a) {
    const double width = box.width(a);
    const double rate = std::abs(x_extent[a]) + std::abs(t_extent) * grad[a];
    const double need = std::ceil(rate * width / options.max_phase_per_panel);
    const double base = std::max<double>(options.min_panels, need);
    const double panels = width > 0 ? std::max(1.0, std::ceil(base * panel_factor)) : 1.0;
    set.panels.push_back(panels < 1e9 ? static_cast<int>(panels) : 1000000000);
    total *= static_cast<long double>(panels) * options.nodes_per_panel;
  }
  if (total > static_cast<long double>(options.node_cap)) {
    std::string counts;
    for (int p : set.panels) counts += (counts.empty() ? "" : "x") + std::to_string(p);
    throw Error(ErrorCode::kQuadratureBudget, "oscillation-resolving rule needs " + counts + " panels of " +
                                                  std::to_string(options.nodes_per_panel) + " nodes, above the cap of " +
                                                  std::to_string(options.node_cap) + " nodes");
  }
  for (int a = 0; a < dim; ++a)
    axes.push_back(composite_gauss_legendre(box.lo[a], box.hi[a], set.panels[a], options.nodes_per_panel));
  TensorRule rule = tensor_product(axes);
  set.xi = std::move(rule.coords);
  set.weights = std::move(rule.weights);
  set.phase_values.resize(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) set.phase_values[i] = phase.value(set.point(i));
  return set;
}

Complex sum_at(const NodeSet& nodes, std::span<const Complex> amplitudes, std::span<const double> x, double t,
               double scale) {
  std::vector<Complex> terms(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto xi = nodes.point(i);
    double theta = t * nodes.phase_values[i];
    for (int a = 0; a < nodes.dim; ++a) theta += x[a] * xi[a];
    terms[i] = amplitudes[i] * std::polar(1.0, scale * theta);
  }
  return pairwise_sum(terms);
}

std::vector<Complex> amplitudes_of(const NodeSet& nodes, const Density& g) {
  std::vector<Complex> amp(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) amp[i] = nodes.weights[i] * g(nodes.point(i));
  return amp;
}

double conv_scale(const FourierConvention& conv) { return conv.extension_sign * conv.frequency_scale; }

std::vector<double> abs_extent(std::span<const double> x, const FourierConvention& conv) {
  std::vector<double> e(x.size());
  for (std::size_t a = 0; a < x.size(); ++a) e[a] = std::abs(x[a] * conv.frequency_scale);
  return e;
}

}  // namespace

std::vector<double> gradient_bounds(const PhaseFunction& phase, const Box& box) {
  const int dim = box.dim();
  const int per_axis = dim == 1 ? 257 : dim == 2 ? 65 : 17;
  std::vector<double> bound(dim, 0.0);
  std::vector<int> idx(dim, 0);
  std::vector<double> p(dim), g(dim);
  while (true) {
    for (int a = 0; a < dim; ++a) p[a] = box.lo[a] + box.width(a) * idx[a] / (per_axis - 1);
    phase.gradient(p, g);
    for (int a = 0; a < dim; ++a) bound[a] = std::max(bound[a], std::abs(g[a]));
    int a = 0;
    while (a < dim && ++idx[a] == per_axis) idx[a++] = 0;
    if (a == dim) break;
  }
  for (auto& b : bound) b *= 1.1;
  return bound;
}

NodeSet oscillation_rule(const PhaseFunction& phase, const Box& box, std::span<const double> x_extent, double t_extent,
                         const QuadratureOptions& options, int panel_scale) {
  return build_rule(phase, box, x_extent, t_extent, options, panel_scale);
}

ExtensionValue eval_E(const PhaseFunction& phase, const Density& g, const SpacetimePoint& x,
                      const QuadratureOptions& options, const FourierConvention& conv) {
  require(std::isfinite(x.t) && std::all_of(x.x.begin(), x.x.end(), [](double v) { return std::isfinite(v); }),
          ErrorCode::kNonFinite, "spacetime point has non-finite coordinates");
  require(x.x.size() == static_cast<std::size_t>(g.dim()), ErrorCode::kDimensionMismatch,
          "spatial point dimension differs from density dimension");
  if (g.known_zero()) return {0.0, 0.0, 0};
  const auto extent = abs_extent(x.x, conv);
  const double t_extent = std::abs(x.t * conv.frequency_scale);
  const double scale = conv_scale(conv);

  const NodeSet rule = build_rule(phase, g.box(), extent, t_extent, options, 1.0);
  const Complex coarse = sum_at(rule, amplitudes_of(rule, g), x.x, x.t, scale);
  long double refined_nodes = 1.0L;
  for (int p : rule.panels) refined_nodes *= 2.0L * p * options.nodes_per_panel;
  if (refined_nodes <= static_cast<long double>(options.node_cap)) {
    const NodeSet fine = build_rule(phase, g.box(), extent, t_extent, options, 2.0);
    const Complex value = sum_at(fine, amplitudes_of(fine, g), x.x, x.t, scale);
    return {value, std::abs(value - coarse), fine.size()};
  }
  const NodeSet half = build_rule(phase, g.box(), extent, t_extent, options, 0.5);
  const Complex rough = sum_at(half, amplitudes_of(half, g), x.x, x.t, scale);
  return {coarse, std::abs(coarse - rough), rule.size()};
}

ExtensionOperator::ExtensionOperator(const PhaseFunction& phase, const Density& g, std::span<const double> x_extent,
                                     double t_extent, const QuadratureOptions& options, const FourierConvention& conv)
    : scale_(conv_scale(conv)) {
  const auto extent = abs_extent(x_extent, conv);
  nodes_ = build_rule(phase, g.box(), extent, std::abs(t_extent * conv.frequency_scale), options, 1.0);
  amplitudes_ = g.known_zero() ? std::vector<Complex>(nodes_.size(), 0.0) : amplitudes_of(nodes_, g);
}

ExtensionOperator::ExtensionOperator(NodeSet nodes, std::vector<Complex> amplitudes, const FourierConvention& conv)
    : nodes_(std::move(nodes)), amplitudes_(std::move(amplitudes)), scale_(conv_scale(conv)) {
  require(amplitudes_.size() == nodes_.size(), ErrorCode::kDimensionMismatch, "one amplitude per node is required");
}

Complex ExtensionOperator::operator()(std::span<const double> x, double t) const {
  require(x.size() == static_cast<std::size_t>(nodes_.dim), ErrorCode::kDimensionMismatch,
          "spatial point dimension differs from the operator dimension");
  return sum_at(nodes_, amplitudes_, x, t, scale_);
}

void ExtensionOperator::line(std::span<const double> x0, int axis, double step, std::size_t count, double t,
                             Complex* out) const {
  require(x0.size() == static_cast<std::size_t>(nodes_.dim) && axis >= 0 && axis < nodes_.dim,
          ErrorCode::kDimensionMismatch, "line start or axis incompatible with the operator dimension");
  const std::size_t n = nodes_.size();
  std::vector<Complex> z(n), rot(n);
  std::vector<double> theta0(n), dtheta(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = nodes_.point(i);
    double th = t * nodes_.phase_values[i];
    for (int a = 0; a < nodes_.dim; ++a) th += x0[a] * xi[a];
    theta0[i] = scale_ * th;
    dtheta[i] = scale_ * step * xi[axis];
    rot[i] = std::polar(1.0, dtheta[i]);
  }
  constexpr std::size_t kResync = 32;
  for (std::size_t k = 0; k < count; ++k) {
    if (k % kResync == 0) {
      const double kk = static_cast<double>(k);
      for (std::size_t i = 0; i < n; ++i) z[i] = amplitudes_[i] * std::polar(1.0, theta0[i] + kk * dtheta[i]);
    }
    Complex acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += z[i];
      z[i] *= rot[i];
    }
    out[k] = acc;
  }
}

ExtensionValue eval_Tsigma(const std::vector<PhaseFunction>& phases, const std::vector<Density>& densities,
                           const std::vector<SpacetimePoint>& points, double sigma, const TsigmaOptions& options,
                           const FourierConvention& conv) {
  const int n = static_cast<int>(phases.size());
  require(n >= 2 && densities.size() == phases.size() && points.size() == phases.size(), ErrorCode::kDimensionMismatch,
          "T_sigma needs n phases, n densities and n points");
  require(std::isfinite(sigma), ErrorCode::kNonFinite, "sigma must be finite");
  for (int j = 0; j < n; ++j) {
    require(phases[j].dim() == n - 1 && densities[j].dim() == n - 1 && points[j].x.size() == static_cast<std::size_t>(n - 1),
            ErrorCode::kDimensionMismatch, "T_sigma factors must live on R^{n-1}");
  }
  for (const auto& g : densities)
    if (g.known_zero()) return {0.0, 0.0, 0};
  const double scale = conv_scale(conv);

  auto evaluate = [&](double factor) -> std::pair<Complex, std::size_t> {
    std::vector<std::vector<Complex>> amp(n);
    std::vector<std::vector<double>> cols(n);
    long double total = 1.0L;
    for (int j = 0; j < n; ++j) {
      const auto extent = abs_extent(points[j].x, conv);
      const NodeSet rule = build_rule(phases[j], densities[j].box(), extent,
                                      std::abs(points[j].t * conv.frequency_scale), options.quadrature, factor);
      total *= static_cast<long double>(rule.size());
      amp[j] = amplitudes_of(rule, densities[j]);
      cols[j].resize(rule.size() * n);
      for (std::size_t i = 0; i < rule.size(); ++i) {
        const auto xi = rule.point(i);
        double th = points[j].t * rule.phase_values[i];
        for (int a = 0; a < n - 1; ++a) th += points[j].x[a] * xi[a];
        amp[j][i] *= std::polar(1.0, scale * th);
        double* c = cols[j].data() + i * n;
        c[0] = 1.0;
        phases[j].gradient(xi, std::span<double>(c + 1, n - 1));
      }
    }
    require(total <= static_cast<long double>(options.quadrature.node_cap), ErrorCode::kQuadratureBudget,
            "T_sigma product rule needs " + std::to_string(static_cast<double>(total)) + " nodes, above the cap of " +
                std::to_string(options.quadrature.node_cap));
    const std::size_t first = amp[0].size();
    auto partial = parallel_map(first, options.quadrature.workers, [&](std::size_t i0) {
      std::vector<std::size_t> idx(n, 0);
      idx[0] = i0;
      std::vector<double> mat(static_cast<std::size_t>(n) * n);
      Complex acc = 0.0;
      while (true) {
        Complex prod = 1.0;
        for (int j = 0; j < n; ++j) {
          prod *= amp[j][idx[j]];
          const double* c = cols[j].data() + idx[j] * n;
          for (int r = 0; r < n; ++r) mat[r * n + j] = c[r];
        }
        const double w = sigma == 0.0 ? 1.0 : std::pow(std::abs(phases::small_determinant(mat.data(), n)), sigma);
        acc += w * prod;
        int j = 1;
        while (j < n && ++idx[j] == amp[j].size()) idx[j++] = 0;
        if (j == n) break;
      }
      return acc;
    });
    return {pairwise_sum(partial), static_cast<std::size_t>(total)};
  };

  const auto [value, nodes] = evaluate(1.0);
  if (!options.estimate_error) return {value, 0.0, nodes};
  try {
    const auto [fine, fine_nodes] = evaluate(2.0);
    return {fine, std::abs(fine - value), fine_nodes};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kQuadratureBudget) throw;
    const auto [rough, rough_nodes] = evaluate(0.5);
    (void)rough_nodes;
    return {value, std::abs(value - rough), nodes};
  }
}

ExtensionValue schrodinger_u(const Density& fhat, std::span<const double> x, double t, const QuadratureOptions& options,
                             const FourierConvention& conv) {
  const int d = fhat.dim();
  SpacetimePoint p{std::vector<double>(x.begin(), x.end()), t};
  ExtensionValue v = eval_E(PhaseFunction::paraboloid(d), fhat, p, options, conv);
  const double c = conv.inverse_normalization(d);
  v.value *= c;
  v.error_estimate *= c;
  return v;
}

Density fourier_transform(const Density& f, const Box& frequency_box, const QuadratureOptions& options,
                          const FourierConvention& conv) {
  const int d = f.dim();
  require(frequency_box.dim() == d, ErrorCode::kDimensionMismatch, "frequency box dimension differs from density");
  std::vector<double> extent(d);
  for (int a = 0; a < d; ++a)
    extent[a] = std::max(std::abs(frequency_box.lo[a]), std::abs(frequency_box.hi[a])) * conv.frequency_scale;
  const PhaseFunction flat = PhaseFunction::polynomial(phases::Polynomial(d, {}));
  auto nodes = std::make_shared<const NodeSet>(build_rule(flat, f.box(), extent, 0.0, options, 1.0));
  auto amp = std::make_shared<const std::vector<Complex>>(amplitudes_of(*nodes, f));
  const double s = conv.forward_sign * conv.frequency_scale;
  auto profile = [nodes, amp, s, frequency_box](std::span<const double> xi) -> Complex {
    if (!frequency_box.contains(xi)) return 0.0;
    return sum_at(*nodes, *amp, xi, 0.0, s);
  };
  return Density(d, frequency_box, phases::ConvexRegion::box(frequency_box), profile, f.known_zero());
}

}  // namespace mlid::extension
