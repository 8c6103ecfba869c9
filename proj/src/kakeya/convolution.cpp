#include "mlid/kakeya/convolution.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <string>

#include "mlid/common/error.hpp"
#include "mlid/common/parallel.hpp"
#include "mlid/common/rng.hpp"

namespace mlid::kakeya {
namespace {

double dot(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Uniform point of the cross-section in frame coordinates.
void sample_cross_section(const CrossSection& c, CounterRng& rng, std::vector<double>& u) {
  const int m = c.dim();
  if (c.kind == CrossSection::Kind::kBox) {
    for (int i = 0; i < m; ++i) u[i] = c.sides[i] * (rng.uniform() - 0.5);
    return;
  }
  double norm = 0.0;
  for (int i = 0; i < m; ++i) {
    u[i] = rng.normal();
    norm += u[i] * u[i];
  }
  const double r = c.radius * std::pow(rng.uniform(), 1.0 / m) / std::sqrt(norm);
  for (int i = 0; i < m; ++i) u[i] *= r;
}

// Largest |<v, c>| over the cross-section c of a tube, for v given by its
// frame components.
double extent_along(const CrossSection& c, const std::vector<double>& components) {
  if (c.kind == CrossSection::Kind::kBall) return c.radius * std::sqrt(dot(components, components));
  double s = 0.0;
  for (std::size_t i = 0; i < components.size(); ++i) s += std::abs(components[i]) * 0.5 * c.sides[i];
  return s;
}

void check_tuple(const std::vector<Tube>& tubes) {
  const int n = static_cast<int>(tubes.size());
  require(n >= 2, ErrorCode::kDimensionMismatch, "at least two tubes are required");
  for (const auto& t : tubes)
    require(t.dim() == n, ErrorCode::kDimensionMismatch, "n tubes must live in R^n");
  require(wedge_magnitude(tubes) > 1e-12, ErrorCode::kNonTransversal, "tube directions are not transversal");
}

}  // namespace

MonteCarloEstimate conv_at(const std::vector<Tube>& tubes, const Point& z, const MonteCarloSpec& spec) {
  check_tuple(tubes);
  const int n = static_cast<int>(tubes.size());
  const int m = n - 1;
  require(z.size() == static_cast<std::size_t>(n), ErrorCode::kDimensionMismatch, "z must be a point of R^n");
  require(spec.samples > 0 && spec.shards > 0, ErrorCode::kInvalidArgument, "sample and shard counts must be positive");
  const Tube& last = tubes[n - 1];

  // Writing x_j = o_j + s_j e_j + c_j, membership of z - sum x_j in the last
  // tube reads A s = b - (frame components of sum c_j + u), u in its
  // cross-section, with A_kj = <f_k, e_j>. Hence |s - A^{-1} b|_j is at most
  // sum_k |A^{-1}_jk| w_k, w_k bounding the k-th component.
  Eigen::MatrixXd a(m, m);
  Eigen::VectorXd b(m);
  Point rhs = z;
  for (int i = 0; i < n; ++i) {
    rhs[i] -= last.offset[i];
    for (int j = 0; j < m; ++j) rhs[i] -= tubes[j].offset[i];
  }
  for (int k = 0; k < m; ++k) {
    b(k) = dot(last.frame[k], rhs);
    for (int j = 0; j < m; ++j) a(k, j) = dot(last.frame[k], tubes[j].direction);
  }
  const Eigen::MatrixXd ainv = a.inverse();
  const Eigen::VectorXd s0 = ainv * b;
  std::vector<double> w(m, 0.0);
  for (int k = 0; k < m; ++k) {
    for (int j = 0; j < m; ++j) {
      std::vector<double> comp(m);
      for (int i = 0; i < m; ++i) comp[i] = dot(last.frame[k], tubes[j].frame[i]);
      w[k] += extent_along(tubes[j].cross_section, comp);
    }
    std::vector<double> unit(m, 0.0);
    unit[k] = 1.0;
    w[k] += extent_along(last.cross_section, unit);
  }
  std::vector<double> half(m, 0.0);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) half[j] += std::abs(ainv(j, k)) * w[k];

  double slab = spec.slab;
  for (int doubling = 0; doubling <= spec.max_doublings; ++doubling, slab *= 2.0) {
    std::vector<double> length(m);
    double measure = 1.0;
    for (int j = 0; j < m; ++j) {
      length[j] = 2.0 * (half[j] + slab);
      measure *= length[j];
    }
    struct Counts {
      std::uint64_t hits = 0, slab_hits = 0, samples = 0;
    };
    const auto shards = static_cast<std::size_t>(spec.shards);
    auto counts = parallel_map(shards, spec.workers, [&](std::size_t shard) {
      CounterRng rng(spec.seed, shard + (static_cast<std::uint64_t>(doubling) << 32));
      const auto range = chunk_range(spec.samples, shards, shard);
      Counts c;
      std::vector<double> u(m), y(n), s(m);
      for (std::uint64_t it = range.begin; it < range.end; ++it) {
        y = z;
        for (int j = 0; j < m; ++j) {
          const Tube& t = tubes[j];
          s[j] = length[j] * (rng.uniform() - 0.5);
          const double along = s0(j) + s[j];
          sample_cross_section(t.cross_section, rng, u);
          for (int i = 0; i < n; ++i) {
            double x = t.offset[i] + along * t.direction[i];
            for (int q = 0; q < m; ++q) x += u[q] * t.frame[q][i];
            y[i] -= x;
          }
        }
        ++c.samples;
        if (!tube_contains(last, y)) continue;
        ++c.hits;
        for (int j = 0; j < m; ++j) {
          if (std::abs(s[j]) > half[j]) {
            ++c.slab_hits;
            break;
          }
        }
      }
      return c;
    });
    Counts total;
    for (const auto& c : counts) {
      total.hits += c.hits;
      total.slab_hits += c.slab_hits;
      total.samples += c.samples;
    }
    if (total.slab_hits > 0) continue;
    MonteCarloEstimate out;
    const double p = static_cast<double>(total.hits) / static_cast<double>(total.samples);
    out.estimate = measure * p;
    out.standard_error = measure * std::sqrt(p * (1.0 - p) / static_cast<double>(total.samples));
    out.samples = total.samples;
    out.hits = total.hits;
    out.segment_lengths = length;
    out.doublings = doubling;
    return out;
  }
  throw Error(ErrorCode::kSegmentGrowthCap, "boundary slab still receives hits after " +
                                                std::to_string(spec.max_doublings) + " doublings");
}

double conv_exact_boxes(const std::vector<Tube>& tubes, const Point& z) {
  const int n = static_cast<int>(tubes.size());
  require(z.size() == static_cast<std::size_t>(n), ErrorCode::kDimensionMismatch, "z must be a point of R^n");
  auto axis_of = [n](const Point& v) {
    for (int a = 0; a < n; ++a)
      if (std::abs(std::abs(v[a]) - 1.0) <= 1e-12) return a;
    return -1;
  };
  // length[b][j]: extent of tube j along coordinate b (0 marks its own axis).
  std::vector<std::vector<double>> length(n, std::vector<double>(n, 0.0));
  std::vector<bool> used(n, false);
  for (int j = 0; j < n; ++j) {
    const Tube& t = tubes[j];
    require(t.dim() == n && t.cross_section.kind == CrossSection::Kind::kBox, ErrorCode::kNonOrthogonal,
            "exact evaluation needs box cross-sections in R^n");
    const int a = axis_of(t.direction);
    require(a >= 0 && !used[a], ErrorCode::kNonOrthogonal, "tube directions must be distinct coordinate axes");
    used[a] = true;
    for (int i = 0; i < n - 1; ++i) {
      const int b = axis_of(t.frame[i]);
      require(b >= 0 && b != a, ErrorCode::kNonOrthogonal, "tube frames must be coordinate axes");
      length[b][j] = t.cross_section.sides[i];
    }
  }
  // On coordinate b the tube running along b contributes the constant 1, and
  // 1 * f1 * ... = int f1 * ... = product of the interval lengths.
  double value = 1.0;
  for (int b = 0; b < n; ++b)
    for (int j = 0; j < n; ++j)
      if (length[b][j] > 0) value *= length[b][j];
  return value;
}

double kakeya_constant(int n) {
  std::vector<Tube> tubes;
  for (int a = 0; a < n; ++a) tubes.push_back(Tube::axis(n, a, CrossSection::unit_box(n - 1), Point(n, 0.0)));
  return conv_exact_boxes(tubes, Point(n, 0.0)) * wedge_magnitude(tubes);
}

void verify_kakeya_constant() {
  for (int n : {2, 3})
    require(kakeya_constant(n) == 1.0, ErrorCode::kInvariantViolation,
            "tube constant for n = " + std::to_string(n) + " is not 1");
}

double wedge_rhs(const std::vector<Tube>& tubes) {
  check_tuple(tubes);
  return kakeya_constant(static_cast<int>(tubes.size())) / wedge_magnitude(tubes);
}

FamilySums sigma_family_sums(const std::vector<TubeFamily>& families, double sigma, const MonteCarloSpec& spec) {
  const int n = static_cast<int>(families.size());
  require(n >= 2, ErrorCode::kDimensionMismatch, "at least two families are required");
  for (const auto& f : families) {
    require(!f.tubes.empty() && f.coefficients.size() == f.tubes.size(), ErrorCode::kDimensionMismatch,
            "each family needs one coefficient per tube");
    for (double c : f.coefficients) require(c >= 0, ErrorCode::kInvalidArgument, "coefficients must be nonnegative");
  }
  std::vector<std::vector<std::size_t>> tuples;
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    tuples.push_back(idx);
    int j = 0;
    while (j < n && ++idx[j] == families[j].tubes.size()) idx[j++] = 0;
    if (j == n) break;
  }
  // Transversality of every tuple is checked before any sampling.
  std::vector<double> wedges;
  for (const auto& t : tuples) {
    std::vector<Tube> tubes;
    for (int j = 0; j < n; ++j) tubes.push_back(families[j].tubes[t[j]]);
    check_tuple(tubes);
    wedges.push_back(wedge_magnitude(tubes));
  }
  const double cn = kakeya_constant(n);
  FamilySums out;
  out.tuples = tuples.size();
  std::vector<double> lhs_terms, var_terms, rhs_terms;
  for (std::size_t k = 0; k < tuples.size(); ++k) {
    std::vector<Tube> tubes;
    double coef = 1.0;
    for (int j = 0; j < n; ++j) {
      tubes.push_back(families[j].tubes[tuples[k][j]]);
      coef *= families[j].coefficients[tuples[k][j]];
    }
    MonteCarloSpec s = spec;
    s.seed = derive_key(spec.seed, k);
    const auto est = conv_at(tubes, Point(n, 0.0), s);
    const double weight = std::pow(wedges[k], 2.0 * sigma) * coef;
    lhs_terms.push_back(weight * est.estimate);
    var_terms.push_back(weight * weight * est.standard_error * est.standard_error);
    rhs_terms.push_back(cn * coef / std::pow(wedges[k], 1.0 - 2.0 * sigma));
  }
  out.lhs = pairwise_sum(lhs_terms);
  out.lhs_stderr = std::sqrt(pairwise_sum(var_terms));
  out.rhs = pairwise_sum(rhs_terms);
  return out;
}

}  // namespace mlid::kakeya
