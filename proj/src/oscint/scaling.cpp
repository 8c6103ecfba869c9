#include "mlid/oscint/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <array>
#include <string>

#include "mlid/common/error.hpp"
#include "mlid/common/parallel.hpp"
#include "mlid/common/quadrature.hpp"

namespace mlid::oscint {
namespace {

std::vector<double> joined(std::span<const double> x, std::span<const double> xi) {
  std::vector<double> v(x.begin(), x.end());
  v.insert(v.end(), xi.begin(), xi.end());
  return v;
}

std::optional<Box> intersect(const Box& a, const Box& b) {
  Box out = a;
  for (int i = 0; i < a.dim(); ++i) {
    out.lo[i] = std::max(a.lo[i], b.lo[i]);
    out.hi[i] = std::min(a.hi[i], b.hi[i]);
    if (out.lo[i] > out.hi[i]) return std::nullopt;
  }
  return out;
}

// Grid of `per_axis` points per axis over a box, first axis fastest.
std::vector<Point> grid_points(const Box& b, int per_axis) {
  const int d = b.dim();
  std::vector<Point> pts;
  std::vector<int> idx(d, 0);
  while (true) {
    Point p(d);
    for (int a = 0; a < d; ++a) p[a] = per_axis == 1 ? 0.5 * (b.lo[a] + b.hi[a]) : b.lo[a] + b.width(a) * idx[a] / (per_axis - 1);
    pts.push_back(p);
    int a = 0;
    while (a < d && ++idx[a] == per_axis) idx[a++] = 0;
    if (a == d) break;
  }
  return pts;
}

int xi_samples_per_axis(int d) { return d == 1 ? 129 : d == 2 ? 33 : 9; }

// Phi(x, xi) = sum_alpha x^alpha P_alpha(xi), so that on a fixed xi rule the
// phase at a new x costs one dot product.
struct SplitPhase {
  std::vector<std::vector<int>> x_exponents;
  std::vector<Polynomial> xi_parts;

  explicit SplitPhase(const OscPhase& p) {
    std::map<std::vector<int>, std::vector<phases::Monomial>> groups;
    for (const auto& t : p.phi.terms()) {
      std::vector<int> ex(t.exponents.begin(), t.exponents.begin() + p.n);
      std::vector<int> ek(t.exponents.begin() + p.n, t.exponents.end());
      groups[ex].push_back({ek, t.coeff});
    }
    for (auto& [ex, terms] : groups) {
      x_exponents.push_back(ex);
      xi_parts.emplace_back(p.n - 1, std::move(terms));
      int used = 0;
      for (int e : ex) used += e > 0 ? 1 : 0;
      separable = separable && used <= 1;
    }
  }

  // Axis carrying x^alpha when each x-monomial involves one coordinate at
  // most (the constant goes to axis 0).
  int axis_of(std::size_t k) const {
    for (std::size_t a = 0; a < x_exponents[k].size(); ++a)
      if (x_exponents[k][a] > 0) return static_cast<int>(a);
    return 0;
  }

  bool separable = true;

  void monomials(std::span<const double> x, std::vector<double>& out) const {
    out.resize(x_exponents.size());
    for (std::size_t k = 0; k < x_exponents.size(); ++k) {
      double v = 1.0;
      for (std::size_t a = 0; a < x.size(); ++a)
        for (int e = 0; e < x_exponents[k][a]; ++e) v *= x[a];
      out[k] = v;
    }
  }
};

// xi rule for one phase and density, with amplitudes w psi_xi f and the
// table P_alpha(xi_i) (alpha-major).
struct XiRule {
  std::size_t size = 0;
  std::vector<Complex> amplitude;
  std::vector<double> table;
};

// Per-axis bound of lambda |d Phi / d xi_l| over the given x points and a
// sample grid of the xi domain, with a 10% margin.
std::vector<double> xi_rates(const OscPhase& p, const std::vector<Point>& xs, const Box& domain, double lambda) {
  const int d = p.n - 1;
  std::vector<double> rate(d, 0.0), grad(2 * p.n - 1);
  const auto xis = grid_points(domain, xi_samples_per_axis(d));
  for (const auto& x : xs)
    for (const auto& xi : xis) {
      p.phi.gradient(joined(x, xi), grad);
      for (int l = 0; l < d; ++l) rate[l] = std::max(rate[l], std::abs(grad[p.n + l]));
    }
  for (auto& r : rate) r *= 1.1 * lambda;
  return rate;
}

XiRule build_xi_rule(const OscPhase& p, const SplitPhase& split, const Density& f, const Box& domain,
                     const std::vector<double>& rate, const QuadratureOptions& options, double factor) {
  const int d = p.n - 1;
  std::vector<QuadratureRule1D> axes;
  long double total = 1.0L;
  for (int l = 0; l < d; ++l) {
    const double width = domain.width(l);
    const double need = std::ceil(rate[l] * width / options.max_phase_per_panel);
    const double panels = width > 0 ? std::max(1.0, std::ceil(std::max<double>(options.min_panels, need) * factor)) : 1.0;
    total *= static_cast<long double>(panels) * options.nodes_per_panel;
    if (total > static_cast<long double>(options.node_cap))
      throw Error(ErrorCode::kQuadratureBudget, "T_lambda rule needs more than " + std::to_string(options.node_cap) +
                                                    " nodes at lambda |grad_xi Phi| = " + std::to_string(rate[l]));
    axes.push_back(composite_gauss_legendre(domain.lo[l], domain.hi[l], static_cast<int>(panels), options.nodes_per_panel));
  }
  const TensorRule rule = tensor_product(axes);
  XiRule out;
  out.size = rule.size();
  out.amplitude.resize(out.size);
  out.table.resize(split.xi_parts.size() * out.size);
  for (std::size_t i = 0; i < out.size; ++i) {
    const std::span<const double> xi(rule.point(i), d);
    out.amplitude[i] = rule.weights[i] * p.xi_cutoff(xi) * f(xi);
    for (std::size_t k = 0; k < split.xi_parts.size(); ++k) out.table[k * out.size + i] = split.xi_parts[k].value(xi);
  }
  return out;
}

// sum_i a_i e^{i lambda Phi(x, xi_i)}, without the x cutoff.
Complex apply_rule(const XiRule& rule, const SplitPhase& split, std::span<const double> x, double lambda,
                   std::vector<double>& mono) {
  split.monomials(x, mono);
  const std::size_t m = mono.size();
  Complex acc = 0.0;
  for (std::size_t i = 0; i < rule.size; ++i) {
    double phase = 0.0;
    for (std::size_t k = 0; k < m; ++k) phase += mono[k] * rule.table[k * rule.size + i];
    acc += rule.amplitude[i] * std::polar(1.0, lambda * phase);
  }
  return acc;
}

std::optional<Box> xi_domain(const OscPhase& p, const Density& f) {
  if (f.known_zero()) return std::nullopt;
  return intersect(f.box(), p.xi_cutoff.box);
}

}  // namespace

ExtensionValue eval_Tlambda(const OscPhase& p, const Density& f, double lambda, std::span<const double> x,
                            const QuadratureOptions& options) {
  p.validate();
  require(std::isfinite(lambda) && lambda >= 1.0, ErrorCode::kInvalidArgument, "lambda must be at least 1");
  require(x.size() == static_cast<std::size_t>(p.n) && f.dim() == p.n - 1, ErrorCode::kDimensionMismatch,
          "T_lambda needs x in R^n and a density on R^{n-1}");
  if (!p.x_cutoff.box.contains(x)) return {0.0, 0.0, 0};
  const auto domain = xi_domain(p, f);
  if (!domain) return {0.0, 0.0, 0};
  const SplitPhase split(p);
  const Point xp(x.begin(), x.end());
  const auto rate = xi_rates(p, {xp}, *domain, lambda);
  const double psi_x = p.x_cutoff(x);
  std::vector<double> mono;
  const XiRule rule = build_xi_rule(p, split, f, *domain, rate, options, 1.0);
  const Complex coarse = psi_x * apply_rule(rule, split, x, lambda, mono);
  try {
    const XiRule fine = build_xi_rule(p, split, f, *domain, rate, options, 2.0);
    const Complex value = psi_x * apply_rule(fine, split, x, lambda, mono);
    return {value, std::abs(value - coarse), fine.size};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kQuadratureBudget) throw;
  }
  const XiRule half = build_xi_rule(p, split, f, *domain, rate, options, 0.5);
  const Complex rough = psi_x * apply_rule(half, split, x, lambda, mono);
  return {coarse, std::abs(coarse - rough), rule.size};
}

double lhs_at(const std::vector<OscPhase>& phases, const std::vector<Density>& densities, double lambda,
              const ScalingOptions& options, ScalingPoint* point) {
  require(phases.size() == 2 && densities.size() == 2, ErrorCode::kInvalidArgument,
          "the lambda-scaling integral is implemented for n = 2");
  for (int j = 0; j < 2; ++j) {
    phases[j].validate();
    require(phases[j].n == 2 && densities[j].dim() == 1, ErrorCode::kDimensionMismatch, "n = 2 phases and densities");
  }
  require(std::isfinite(lambda) && lambda >= 1.0, ErrorCode::kInvalidArgument, "lambda must be at least 1");
  require(options.refine >= 1, ErrorCode::kInvalidArgument, "refine must be at least 1");
  ScalingPoint local;
  ScalingPoint& pt = point ? *point : local;
  pt = ScalingPoint{};
  pt.lambda = lambda;

  // x ranges over box_1 and -x over box_2.
  Box reflected = phases[1].x_cutoff.box;
  for (int a = 0; a < 2; ++a) {
    reflected.lo[a] = -phases[1].x_cutoff.box.hi[a];
    reflected.hi[a] = -phases[1].x_cutoff.box.lo[a];
  }
  const auto domain = intersect(phases[0].x_cutoff.box, reflected);
  const auto xi0 = xi_domain(phases[0], densities[0]);
  const auto xi1 = xi_domain(phases[1], densities[1]);
  if (!domain || !xi0 || !xi1) return 0.0;
  const std::array<Box, 2> xi_boxes{*xi0, *xi1};
  const std::array<SplitPhase, 2> split{SplitPhase(phases[0]), SplitPhase(phases[1])};

  // x_a-bandwidth of |T_j|^2 is lambda times the spread of d Phi_j / dx_a over xi.
  std::array<double, 2> band{0.0, 0.0};
  std::vector<double> grad(3);
  for (int j = 0; j < 2; ++j) {
    const double sign = j == 0 ? 1.0 : -1.0;
    const auto xis = grid_points(xi_boxes[j], xi_samples_per_axis(1));
    for (const auto& x : grid_points(*domain, 9)) {
      const Point y{sign * x[0], sign * x[1]};
      std::array<double, 2> lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
      std::array<double, 2> hi{-lo[0], -lo[1]};
      for (const auto& xi : xis) {
        phases[j].phi.gradient(joined(y, xi), grad);
        for (int a = 0; a < 2; ++a) {
          lo[a] = std::min(lo[a], grad[a]);
          hi[a] = std::max(hi[a], grad[a]);
        }
      }
      for (int a = 0; a < 2; ++a) band[a] = std::max(band[a], hi[a] - lo[a]);
    }
  }
  std::array<double, 2> width{}, centre{}, half{};
  std::array<long long, 2> m0{}, last_index{};
  for (int a = 0; a < 2; ++a) {
    centre[a] = 0.5 * (domain->lo[a] + domain->hi[a]);
    half[a] = 0.5 * domain->width(a);
    const double bw = 1.1 * lambda * band[0 + a];
    double w = bw > 0 ? options.kappa / bw : domain->width(a);
    w = std::min(w, std::max(domain->width(a), 1e-300) / 16.0) / options.refine;
    width[a] = w;
    last_index[a] = static_cast<long long>(std::ceil(half[a] / w));
    m0[a] = std::max<long long>(1, static_cast<long long>(std::ceil(options.start_scale / (lambda * w))));
  }

  const QuadratureRule1D& gl = gauss_legendre(options.quadrature.nodes_per_panel);
  const double xi_factor = options.refine;
  auto panel_value = [&](long long p0, long long p1) -> double {
    std::array<double, 2> lo{}, hi{};
    const std::array<long long, 2> p{p0, p1};
    for (int a = 0; a < 2; ++a) {
      lo[a] = std::max(domain->lo[a], centre[a] + p[a] * width[a]);
      hi[a] = std::min(domain->hi[a], centre[a] + (p[a] + 1) * width[a]);
      if (hi[a] <= lo[a]) return 0.0;
    }
    const Box panel{{lo[0], lo[1]}, {hi[0], hi[1]}};
    std::vector<Point> nodes;
    std::vector<double> weights;
    for (std::size_t i1 = 0; i1 < gl.size(); ++i1)
      for (std::size_t i0 = 0; i0 < gl.size(); ++i0) {
        nodes.push_back({0.5 * (lo[0] + hi[0]) + 0.5 * (hi[0] - lo[0]) * gl.nodes[i0],
                         0.5 * (lo[1] + hi[1]) + 0.5 * (hi[1] - lo[1]) * gl.nodes[i1]});
        weights.push_back(0.25 * (hi[0] - lo[0]) * (hi[1] - lo[1]) * gl.weights[i0] * gl.weights[i1]);
      }
    std::vector<double> cut(nodes.size());
    bool any = false;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const Point y{-nodes[i][0], -nodes[i][1]};
      cut[i] = phases[0].x_cutoff(nodes[i]) * phases[1].x_cutoff(y);
      any = any || cut[i] != 0.0;
    }
    if (!any) return 0.0;
    std::vector<double> mono;
    std::vector<double> terms(nodes.size(), 0.0);
    const std::size_t m = gl.size();
    std::array<std::vector<double>, 2> modulus;
    for (int j = 0; j < 2; ++j) {
      const double sign = j == 0 ? 1.0 : -1.0;
      std::vector<Point> corners;
      for (const auto& c : grid_points(panel, 3)) corners.push_back({sign * c[0], sign * c[1]});
      const auto rate = xi_rates(phases[j], corners, xi_boxes[j], lambda);
      const XiRule rule = build_xi_rule(phases[j], split[j], densities[j], xi_boxes[j], rate, options.quadrature, xi_factor);
      modulus[j].assign(nodes.size(), 0.0);
      if (options.separable_fast_path && split[j].separable) {
        // e^{i lambda Phi} factors into one table per axis over the m node
        // coordinates of that axis; nodes are i = i1 * m + i0.
        std::array<std::vector<Complex>, 2> factor;
        for (int a = 0; a < 2; ++a) {
          factor[a].assign(m * rule.size, 1.0);
          for (std::size_t q = 0; q < m; ++q) {
            const double c = sign * nodes[a == 0 ? q : q * m][a];
            std::vector<double> phase(rule.size, 0.0);
            for (std::size_t k = 0; k < split[j].x_exponents.size(); ++k) {
              if (split[j].axis_of(k) != a) continue;
              const double power = std::pow(c, split[j].x_exponents[k][a]);
              for (std::size_t i = 0; i < rule.size; ++i) phase[i] += power * rule.table[k * rule.size + i];
            }
            for (std::size_t i = 0; i < rule.size; ++i) factor[a][q * rule.size + i] = std::polar(1.0, lambda * phase[i]);
          }
        }
        std::vector<Complex> row(rule.size);
        for (std::size_t i1 = 0; i1 < m; ++i1) {
          for (std::size_t i = 0; i < rule.size; ++i) row[i] = rule.amplitude[i] * factor[1][i1 * rule.size + i];
          for (std::size_t i0 = 0; i0 < m; ++i0) {
            if (cut[i1 * m + i0] == 0.0) continue;
            const Complex* f0 = factor[0].data() + i0 * rule.size;
            double re = 0.0, im = 0.0;
            for (std::size_t i = 0; i < rule.size; ++i) {
              re += row[i].real() * f0[i].real() - row[i].imag() * f0[i].imag();
              im += row[i].real() * f0[i].imag() + row[i].imag() * f0[i].real();
            }
            modulus[j][i1 * m + i0] = re * re + im * im;
          }
        }
        continue;
      }
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (cut[i] == 0.0) continue;
        const Point y{sign * nodes[i][0], sign * nodes[i][1]};
        modulus[j][i] = std::norm(apply_rule(rule, split[j], y, lambda, mono));
      }
    }
    for (std::size_t i = 0; i < nodes.size(); ++i)
      terms[i] = weights[i] * cut[i] * cut[i] * modulus[0][i] * modulus[1][i];
    return pairwise_sum(terms);
  };

  double total = 0.0;
  std::array<long long, 2> prev{0, 0};
  for (int level = 0; level < options.max_levels; ++level) {
    std::array<long long, 2> m{};
    bool exhausted = true;
    for (int a = 0; a < 2; ++a) {
      m[a] = std::min(m0[a] << level, last_index[a]);
      exhausted = exhausted && m[a] >= last_index[a];
    }
    std::vector<std::array<long long, 2>> shell;
    for (long long p1 = -m[1]; p1 < m[1]; ++p1)
      for (long long p0 = -m[0]; p0 < m[0]; ++p0) {
        const bool inside = level > 0 && p0 >= -prev[0] && p0 < prev[0] && p1 >= -prev[1] && p1 < prev[1];
        if (!inside) shell.push_back({p0, p1});
      }
    const auto values = parallel_map(shell.size(), options.workers,
                                     [&](std::size_t k) { return panel_value(shell[k][0], shell[k][1]); });
    const double increment = pairwise_sum(values);
    total += increment;
    pt.x_nodes += shell.size() * gl.size() * gl.size();
    pt.radius = std::max(m[0] * width[0], m[1] * width[1]);
    prev = m;
    if (exhausted) {
      pt.truncation = 0.0;
      pt.lhs = total;
      return total;
    }
    if (level >= 1 && total > 0 && increment <= options.stop_tolerance * total) {
      pt.truncation = increment;
      pt.lhs = total;
      return total;
    }
  }
  throw Error(ErrorCode::kTailModelRejected, "nested boxes did not settle within " + std::to_string(options.max_levels) +
                                                 " doublings at lambda = " + std::to_string(lambda));
}

ScalingResult scaling_experiment(const std::vector<OscPhase>& phases, const std::vector<Density>& densities,
                                 const std::vector<double>& lambdas, const ScalingOptions& options) {
  require(phases.size() == 2 && densities.size() == 2, ErrorCode::kInvalidArgument,
          "the lambda-scaling experiment is implemented for n = 2");
  require(lambdas.size() >= 2, ErrorCode::kInvalidArgument, "at least two lambda values are required");
  ScalingResult out;
  std::vector<Box> xi_boxes;
  bool zero = false;
  for (int j = 0; j < 2; ++j) {
    const auto b = xi_domain(phases[j], densities[j]);
    if (!b) {
      zero = true;
      break;
    }
    xi_boxes.push_back(*b);
  }
  if (!zero) {
    out.transversality_min = min_transversality(phases, options.transversality_samples, options.seed, xi_boxes);
    require(out.transversality_min > options.transversality_bound, ErrorCode::kNonTransversal,
            "sampled transversality minimum " + std::to_string(out.transversality_min) + " is below the bound " +
                std::to_string(options.transversality_bound));
  }
  const double norms = zero ? 0.0 : densities[0].l2_norm_squared() * densities[1].l2_norm_squared();
  for (double lambda : lambdas) {
    ScalingPoint pt;
    if (zero) {
      pt.lambda = lambda;
    } else {
      lhs_at(phases, densities, lambda, options, &pt);
    }
    pt.normalized = norms > 0 ? lambda * lambda * pt.lhs / norms : 0.0;
    out.points.push_back(pt);
  }
  const bool positive = std::all_of(out.points.begin(), out.points.end(), [](const ScalingPoint& p) { return p.lhs > 0; });
  if (!positive) {
    out.degenerate = true;
    out.slope = std::numeric_limits<double>::quiet_NaN();
    out.ratio_spread = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(out.points.size());
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& p : out.points) {
    const double x = std::log(p.lambda), y = std::log(p.lhs);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    lo = std::min(lo, p.normalized);
    hi = std::max(hi, p.normalized);
  }
  out.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  out.ratio_spread = hi / lo;
  return out;
}

ScalingPreset scaling_preset() {
  const Polynomial square(1, {{{2}, 1.0}});
  const Cutoff x_cut{Box::cube(2, -1.5, 1.5), 0.5};
  ScalingPreset p;
  p.phases.push_back(extension_phase(square, x_cut, Cutoff{Box::interval(0.5, 2.5), 0.0}));
  p.phases.push_back(extension_phase(square, x_cut, Cutoff{Box::interval(-2.5, -0.5), 0.0}));
  p.densities.push_back(Density::bump({1.5}, 1.0));
  p.densities.push_back(Density::bump({-1.5}, 1.0));
  return p;
}

}  // namespace mlid::oscint
