#include "mlid/phases/support.hpp"

#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "mlid/common/error.hpp"
#include "mlid/common/parallel.hpp"

namespace mlid::phases {

double small_determinant(double* a, int n) {
  double det = 1.0;
  for (int c = 0; c < n; ++c) {
    int pivot = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[pivot * n + c])) pivot = r;
    if (a[pivot * n + c] == 0.0) return 0.0;
    if (pivot != c) {
      for (int k = 0; k < n; ++k) std::swap(a[c * n + k], a[pivot * n + k]);
      det = -det;
    }
    const double d = a[c * n + c];
    det *= d;
    for (int r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] / d;
      if (f == 0.0) continue;
      for (int k = c + 1; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
    }
  }
  return det;
}

namespace {

void check_shapes(const std::vector<PhaseFunction>& phases, std::size_t count) {
  const int n = static_cast<int>(phases.size());
  require(n >= 2, ErrorCode::kInvalidArgument, "transversality needs at least two phases");
  require(count == phases.size(), ErrorCode::kDimensionMismatch, "one point (or region) per phase is required");
  for (const auto& p : phases)
    require(p.dim() == n - 1, ErrorCode::kDimensionMismatch, "each phase must be defined on R^{n-1}");
}

// column j = (1; grad phi_j(xi_j)), stored as n doubles.
std::vector<double> column_of(const PhaseFunction& phase, std::span<const double> xi) {
  std::vector<double> col(xi.size() + 1);
  col[0] = 1.0;
  phase.gradient(xi, std::span<double>(col).subspan(1));
  return col;
}

double det_from_columns(const std::vector<const double*>& cols, int n) {
  thread_local std::vector<double> a;
  a.resize(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int r = 0; r < n; ++r) a[r * n + j] = cols[j][r];
  return small_determinant(a.data(), n);
}

struct RefineContext {
  const std::vector<PhaseFunction>* phases;
  const std::vector<ConvexRegion>* regions;
};

std::vector<Point> projected_tuple(const RefineContext& ctx, const gsl_vector* v) {
  const int n = static_cast<int>(ctx.phases->size());
  const int d = n - 1;
  std::vector<Point> pts(n);
  for (int j = 0; j < n; ++j) {
    Point p(d);
    for (int a = 0; a < d; ++a) p[a] = gsl_vector_get(v, j * d + a);
    pts[j] = (*ctx.regions)[j].project(p);
  }
  return pts;
}

double refine_objective(const gsl_vector* v, void* params) {
  const auto& ctx = *static_cast<const RefineContext*>(params);
  return std::abs(transversality_weight(*ctx.phases, projected_tuple(ctx, v)));
}

}  // namespace

double transversality_weight(const std::vector<PhaseFunction>& phases, const std::vector<Point>& points) {
  check_shapes(phases, points.size());
  const int n = static_cast<int>(phases.size());
  std::vector<std::vector<double>> cols;
  std::vector<const double*> ptrs;
  for (int j = 0; j < n; ++j) {
    require(points[j].size() == static_cast<std::size_t>(n - 1), ErrorCode::kDimensionMismatch,
            "point dimension differs from phase dimension");
    cols.push_back(column_of(phases[j], points[j]));
  }
  for (const auto& c : cols) ptrs.push_back(c.data());
  return det_from_columns(ptrs, n);
}

SupportReport scan_transversality(const std::vector<PhaseFunction>& phases, const std::vector<ConvexRegion>& regions,
                                  const SupportScanOptions& options) {
  check_shapes(phases, regions.size());
  const int n = static_cast<int>(phases.size());

  int per_axis = std::max(2, options.points_per_axis);
  std::vector<std::vector<Point>> grids;
  std::uint64_t product = 0;
  while (true) {
    grids.clear();
    long double prod = 1.0L;
    for (const auto& r : regions) {
      grids.push_back(r.grid_points(per_axis));
      prod *= static_cast<long double>(grids.back().size());
    }
    if (prod <= static_cast<long double>(options.budget) || per_axis <= 2) {
      product = static_cast<std::uint64_t>(prod);
      break;
    }
    per_axis = std::max(2, per_axis - 2);
  }

  // Column data per phase and grid point.
  std::vector<std::vector<double>> columns(n);
  for (int j = 0; j < n; ++j) {
    for (const auto& p : grids[j]) {
      const auto col = column_of(phases[j], p);
      columns[j].insert(columns[j].end(), col.begin(), col.end());
    }
  }

  struct Best {
    double value = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> index;
  };
  const std::size_t first = grids[0].size();
  const std::size_t chunks = std::min<std::size_t>(first, 64);
  auto partial = parallel_map(chunks, options.workers, [&](std::size_t c) {
    Best best;
    const ChunkRange range = chunk_range(first, chunks, c);
    std::vector<std::size_t> idx(n, 0);
    std::vector<const double*> cols(n);
    for (std::size_t i0 = range.begin; i0 < range.end; ++i0) {
      idx.assign(n, 0);
      idx[0] = i0;
      while (true) {
        for (int j = 0; j < n; ++j) cols[j] = columns[j].data() + idx[j] * n;
        const double v = std::abs(det_from_columns(cols, n));
        if (v < best.value) {
          best.value = v;
          best.index = idx;
        }
        int j = 1;
        while (j < n && ++idx[j] == grids[j].size()) idx[j++] = 0;
        if (j == n) break;
      }
    }
    return best;
  });
  Best best;
  for (const auto& b : partial)
    if (b.value < best.value) best = b;

  SupportReport report;
  report.points_per_axis_used = per_axis;
  report.tuples_scanned = product;
  report.coarse_min = best.value;
  report.min_abs_det = best.value;
  for (int j = 0; j < n; ++j) report.witness.push_back(grids[j][best.index[j]]);
  if (!options.refine || best.value == 0.0) return report;

  const int d = n - 1;
  const std::size_t vars = static_cast<std::size_t>(n) * d;
  RefineContext ctx{&phases, &regions};
  gsl_multimin_function fn{&refine_objective, vars, &ctx};
  gsl_vector* x = gsl_vector_alloc(vars);
  gsl_vector* step = gsl_vector_alloc(vars);
  for (int j = 0; j < n; ++j) {
    const Box& bb = regions[j].bounding_box();
    for (int a = 0; a < d; ++a) {
      gsl_vector_set(x, j * d + a, report.witness[j][a]);
      const double h = bb.width(a) / std::max(1, per_axis - 1);
      gsl_vector_set(step, j * d + a, h > 0 ? h : 1e-3);
    }
  }
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, vars);
  gsl_multimin_fminimizer_set(s, &fn, x, step);
  for (int iter = 0; iter < 4000; ++iter) {
    if (gsl_multimin_fminimizer_iterate(s) != 0) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), 1e-12) == GSL_SUCCESS) break;
  }
  const double refined = gsl_multimin_fminimizer_minimum(s);
  if (refined < report.min_abs_det) {
    report.witness = projected_tuple(ctx, gsl_multimin_fminimizer_x(s));
    report.min_abs_det = std::abs(transversality_weight(phases, report.witness));
  }
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(step);
  gsl_vector_free(x);
  return report;
}

SupportReport check_support_condition(const std::vector<PhaseFunction>& phases, const std::vector<Density>& densities,
                                      const SupportScanOptions& options) {
  std::vector<ConvexRegion> regions;
  for (const auto& g : densities) {
    require(!g.known_zero(), ErrorCode::kEmptySupport, "support condition needs densities with nonempty support");
    regions.push_back(g.hull());
  }
  return scan_transversality(phases, regions, options);
}

}  // namespace mlid::phases
