#pragma once

#include <cstdint>
#include <vector>

#include "mlid/phases/density.hpp"
#include "mlid/phases/phase_function.hpp"
#include "mlid/phases/region.hpp"

namespace mlid::phases {

// det of the n x n matrix whose column j is (1; grad phi_j(xi_j)). Signed.
double transversality_weight(const std::vector<PhaseFunction>& phases, const std::vector<Point>& points);

// In-place partial-pivot determinant of a small row-major n x n matrix.
double small_determinant(double* a, int n);

struct SupportScanOptions {
  int points_per_axis = 17;
  // Upper bound on the number of tuples in the coarse product scan; the
  // per-axis count is reduced until the product fits.
  std::uint64_t budget = std::uint64_t{1} << 26;
  bool refine = true;
  int workers = 0;
};

struct SupportReport {
  double min_abs_det = 0.0;
  std::vector<Point> witness;
  double coarse_min = 0.0;
  int points_per_axis_used = 0;
  std::uint64_t tuples_scanned = 0;
};

// Minimum of |transversality_weight| over the product of the regions: coarse
// grid scan, then one Nelder-Mead refinement (iterates projected onto the
// regions) started at the coarse minimiser.
SupportReport scan_transversality(const std::vector<PhaseFunction>& phases, const std::vector<ConvexRegion>& regions,
                                  const SupportScanOptions& options = {});

// The same scan over the convex hulls of the density supports.
SupportReport check_support_condition(const std::vector<PhaseFunction>& phases, const std::vector<Density>& densities,
                                      const SupportScanOptions& options = {});

}  // namespace mlid::phases
