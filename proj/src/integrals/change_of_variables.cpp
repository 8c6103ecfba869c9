#include "mlid/integrals/change_of_variables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mlid/common/error.hpp"
#include "mlid/common/parallel.hpp"
#include "mlid/common/rng.hpp"

namespace mlid::integrals {
namespace {

using phases::Point;

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

std::vector<double> subspace_time_map(const std::vector<PhaseFunction>& phases, const std::vector<Point>& etas,
                                      std::span<const double> xi) {
  const std::size_t n = phases.size();
  require(n >= 2 && etas.size() == n - 1, ErrorCode::kDimensionMismatch, "time map needs n phases and n-1 shifts");
  const double last = phases[n - 1].value(xi);
  std::vector<double> t(n - 1);
  Point p(xi.size());
  for (std::size_t j = 0; j + 1 < n; ++j) {
    require(etas[j].size() == xi.size(), ErrorCode::kDimensionMismatch, "shift dimension differs from xi");
    for (std::size_t a = 0; a < xi.size(); ++a) p[a] = etas[j][a] + xi[a];
    t[j] = phases[j].value(p) - last;
  }
  return t;
}

JacobianCheck paraboloid_jacobian_check(int n, const std::vector<Point>& etas, const Point& xi_n) {
  const int d = n - 1;
  require(n >= 2 && static_cast<int>(etas.size()) == d && static_cast<int>(xi_n.size()) == d,
          ErrorCode::kDimensionMismatch, "need n-1 shifts and a base point in R^{n-1}");
  std::vector<double> eta(static_cast<std::size_t>(d) * d);
  for (int j = 0; j < d; ++j) {
    require(static_cast<int>(etas[j].size()) == d, ErrorCode::kDimensionMismatch, "shift dimension differs from n-1");
    for (int a = 0; a < d; ++a) eta[j * d + a] = etas[j][a];
  }
  JacobianCheck out;
  out.analytic = std::ldexp(phases::small_determinant(eta.data(), d), d);

  const std::vector<PhaseFunction> ph(n, PhaseFunction::paraboloid(d));
  double scale = 1.0;
  for (double v : xi_n) scale = std::max(scale, std::abs(v));
  const double h = 1e-3 * scale;
  std::vector<double> jac(static_cast<std::size_t>(d) * d);
  Point plus = xi_n, minus = xi_n;
  for (int a = 0; a < d; ++a) {
    plus[a] += h;
    minus[a] -= h;
    const auto tp = subspace_time_map(ph, etas, plus);
    const auto tm = subspace_time_map(ph, etas, minus);
    for (int j = 0; j < d; ++j) jac[j * d + a] = (tp[j] - tm[j]) / (2.0 * h);
    plus[a] = minus[a] = xi_n[a];
  }
  out.numeric = phases::small_determinant(jac.data(), d);
  return out;
}

InjectivityReport injectivity_probe(const IdentityExperiment& exp, const std::vector<Point>& etas,
                                    const InjectivityOptions& options) {
  validate(exp);
  const int n = exp.n();
  const int d = n - 1;
  require(static_cast<int>(etas.size()) == d, ErrorCode::kDimensionMismatch, "need n-1 shifts");
  require(options.shards >= 1, ErrorCode::kInvalidArgument, "shard count must be positive");
  if (options.require_support) {
    phases::SupportScanOptions scan = exp.support;
    if (scan.workers == 0) scan.workers = options.workers;
    const auto report = phases::check_support_condition(exp.phases, exp.densities, scan);
    require(report.min_abs_det >= exp.support_threshold, ErrorCode::kSupportCondition,
            "hull condition fails (min |weight| " + std::to_string(report.min_abs_det) + "); injectivity is not implied");
  }

  // Box holding the support of G_eta: the last box intersected with the
  // shifted boxes of the other factors.
  phases::Box box = exp.densities[n - 1].box();
  for (int j = 0; j < d; ++j) {
    for (int a = 0; a < d; ++a) {
      box.lo[a] = std::max(box.lo[a], exp.densities[j].box().lo[a] - etas[j][a]);
      box.hi[a] = std::min(box.hi[a], exp.densities[j].box().hi[a] - etas[j][a]);
    }
  }
  for (int a = 0; a < d; ++a)
    require(box.lo[a] < box.hi[a], ErrorCode::kEmptySupport, "the support of G_eta is empty for these shifts");

  auto inside = [&](const Point& xi) {
    if (!exp.densities[n - 1].hull().contains(xi)) return false;
    Point p(d);
    for (int j = 0; j < d; ++j) {
      for (int a = 0; a < d; ++a) p[a] = etas[j][a] + xi[a];
      if (!exp.densities[j].hull().contains(p)) return false;
    }
    return true;
  };

  struct Shard {
    double min_ratio = std::numeric_limits<double>::infinity();
    Point a, b;
    std::size_t pairs = 0, rejected = 0;
  };
  const std::size_t shards = static_cast<std::size_t>(options.shards);
  auto results = parallel_map(shards, options.workers, [&](std::size_t s) {
    CounterRng rng(options.seed, s);
    Shard out;
    const auto range = chunk_range(options.samples, shards, s);
    const std::size_t want = range.end - range.begin;
    const std::size_t max_draws = 100 * want + 100;
    std::size_t draws = 0;
    auto draw = [&](Point& p) {
      while (draws < max_draws) {
        ++draws;
        for (int a = 0; a < d; ++a) p[a] = rng.uniform(box.lo[a], box.hi[a]);
        if (inside(p)) return true;
        ++out.rejected;
      }
      return false;
    };
    Point x(d), y(d);
    while (out.pairs < want && draw(x) && draw(y)) {
      const double gap = distance(x, y);
      if (gap == 0.0) continue;
      const auto tx = subspace_time_map(exp.phases, etas, x);
      const auto ty = subspace_time_map(exp.phases, etas, y);
      const double ratio = distance(tx, ty) / gap;
      ++out.pairs;
      if (ratio < out.min_ratio) {
        out.min_ratio = ratio;
        out.a = x;
        out.b = y;
      }
    }
    return out;
  });

  InjectivityReport report;
  report.min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& r : results) {
    report.pairs += r.pairs;
    report.rejected += r.rejected;
    if (r.pairs > 0 && r.min_ratio < report.min_ratio) {
      report.min_ratio = r.min_ratio;
      report.witness = {r.a, r.b};
    }
  }
  require(report.pairs > 0, ErrorCode::kEmptySupport, "no sample pair landed in the support of G_eta");
  report.counterexample = report.min_ratio < options.flag_below;
  return report;
}

}  // namespace mlid::integrals
