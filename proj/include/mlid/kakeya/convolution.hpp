#pragma once

#include <cstdint>
#include <vector>

#include "mlid/kakeya/tube.hpp"

namespace mlid::kakeya {

struct MonteCarloSpec {
  std::uint64_t samples = 10'000'000;
  int shards = 64;
  std::uint64_t seed = 1;
  int workers = 0;
  // Width of the slab added beyond the certified range at each segment end;
  // it must stay empty, otherwise it doubles (at most max_doublings times).
  double slab = 1.0;
  int max_doublings = 10;
};

struct MonteCarloEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t hits = 0;
  std::vector<double> segment_lengths;
  int doublings = 0;
};

// Monte Carlo value of int prod_{j<n} chi_{T_j}(x_j) chi_{T_n}(z - sum x_j) dx.
// Each x_j is drawn uniformly from a segment of T_j (length L_j, full cross
// section) that provably contains every contributing x_j plus an empty
// boundary slab. The standard error is binomial on the pooled hits.
MonteCarloEstimate conv_at(const std::vector<Tube>& tubes, const Point& z, const MonteCarloSpec& spec = {});

// Exact value for axis-parallel box tubes along distinct coordinate axes:
// the convolution factors over coordinates, and on each coordinate it is the
// product of the interval lengths of the tubes not running along it.
double conv_exact_boxes(const std::vector<Tube>& tubes, const Point& z);

// c_n, fixed by the orthogonal unit-box case: conv_exact_boxes * |wedge|.
double kakeya_constant(int n);
// Recomputes c_n for n = 2, 3 and throws kInvariantViolation unless it is 1.
void verify_kakeya_constant();

// c_n / |det(e(T_1), ..., e(T_n))|.
double wedge_rhs(const std::vector<Tube>& tubes);

struct TubeFamily {
  std::vector<Tube> tubes;
  std::vector<double> coefficients;
};

struct FamilySums {
  double lhs = 0.0;
  double lhs_stderr = 0.0;
  double rhs = 0.0;
  std::size_t tuples = 0;
};

// lhs = sum over tuples of |wedge|^{2 sigma} prod c_T conv_at(tuple, 0),
// rhs = c_n sum prod c_T / |wedge|^{1 - 2 sigma}. Every tuple must be
// transversal. Tuple k uses the stream derived from (seed, k).
FamilySums sigma_family_sums(const std::vector<TubeFamily>& families, double sigma, const MonteCarloSpec& spec = {});

}  // namespace mlid::kakeya
