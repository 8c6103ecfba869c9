#include "mlid/cli/suites.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "mlid/common/digest.hpp"
#include "mlid/common/error.hpp"
#include "mlid/common/rng.hpp"
#include "mlid/integrals/change_of_variables.hpp"
#include "mlid/integrals/identity.hpp"
#include "mlid/integrals/space_time.hpp"
#include "mlid/kakeya/convolution.hpp"
#include "mlid/lincore/block_det.hpp"
#include "mlid/oscint/scaling.hpp"

namespace mlid::cli {
namespace {

using phases::Point;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Stream indices keep every suite's random draws independent of the others
// and of the order in which cases run.
enum Stream : std::uint64_t {
  kBlockdetStream = 1000,
  kHessStream = 2000,
  kJacobianStream = 3000,
  kKakeyaTubeStream = 4000,
  kKakeyaZStream = 5000,
  kKakeyaMcStream = 6000,
  kFamilyStream = 7000,
  kScalingStream = 8000,
};

double rel(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / std::abs(b == 0.0 ? scale : b);
}

// Runs body; a library refusal becomes a failed case carrying the message.
template <class F>
CaseReport guarded(std::string id, std::string kind, double tolerance, F body) {
  CaseReport c;
  c.id = std::move(id);
  c.kind = std::move(kind);
  c.tolerance = tolerance;
  try {
    body(c);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    c.error = e.what();
  }
  c.finish();
  return c;
}

integrals::IdentityExperiment experiment(const Config& cfg, const IdentityCase& ic, double sigma) {
  integrals::IdentityExperiment exp;
  for (const auto& p : ic.phases) exp.phases.push_back(build_phase(cfg, p));
  for (const auto& d : ic.densities) exp.densities.push_back(build_density(cfg, d));
  exp.sigma = sigma;
  exp.r1 = cfg.bilinear.r1;
  exp.r2 = cfg.bilinear.r2;
  exp.workers = cfg.workers;
  exp.support.workers = cfg.workers;
  return exp;
}

CaseReport identity_case(const Config& cfg, const IdentityCase& ic, double sigma, const std::string& id,
                         double tolerance, const Tolerances& tol) {
  return guarded(id, "identity", tolerance, [&](CaseReport& c) {
    const auto exp = experiment(cfg, ic, sigma);
    const auto rhs = integrals::rhs_weighted_integral(exp, cfg.convention);
    const auto lhs = integrals::lhs_subspace_integral(exp, cfg.convention);
    c.lhs = lhs.value;
    c.lhs_error = std::abs(lhs.tail_estimate) + std::abs(lhs.quadrature_error);
    c.rhs = rhs.value;
    c.rhs_error = rhs.error_estimate;
    c.add_check("tail_fraction", lhs.value == 0.0 ? 0.0 : std::abs(lhs.tail_estimate / lhs.value), tol.tail);
    c.data = {{"sigma", sigma},
              {"value_r1", lhs.value_r1},
              {"value_r2", lhs.value_r2},
              {"rank", lhs.rank},
              {"grid_points", lhs.grid_points},
              {"rhs_nodes", rhs.nodes}};
    if (rhs.support) c.data["support_min_abs_det"] = rhs.support->min_abs_det;
  });
}

void bilinear_suite(const Config& cfg, const Tolerances& tol, SuiteReport& r) {
  for (const auto& ic : cfg.bilinear.cases)
    r.cases.push_back(identity_case(cfg, ic, 0.0, ic.name, tol.bilinear, tol));
}

void sigma_suite(const Config& cfg, const Tolerances& tol, SuiteReport& r) {
  for (const auto& ic : cfg.sigma.cases)
    for (double s : cfg.sigma.sigmas) {
      std::ostringstream id;
      id << ic.name << "/sigma=" << s;
      r.cases.push_back(identity_case(cfg, ic, s, id.str(), tol.sigma, tol));
    }
}

void ot_suite(const Config& cfg, const Tolerances& tol, SuiteReport& r) {
  for (const auto& pair : cfg.ot.pairs)
    r.cases.push_back(guarded(pair.name, "ot", tol.ot, [&](CaseReport& c) {
      const auto f1 = build_density(cfg, pair.f1);
      const auto f2 = build_density(cfg, pair.f2);
      integrals::SpaceTimeGrid grid;
      grid.workers = cfg.workers;
      const auto res = integrals::ot_identity_lhs(f1, f2, grid);
      const double n1 = f1.l2_norm_squared();
      const double n2 = f2.l2_norm_squared();
      c.lhs = res.value;
      c.lhs_error = std::abs(res.tail);
      c.rhs = cfg.convention.ot_constant(1) * n1 * n2;
      c.data = {{"constant", cfg.convention.ot_constant(1)},
                {"norm1", n1},
                {"norm2", n2},
                {"grid_norm1", res.norm1},
                {"grid_norm2", res.norm2},
                {"spatial_points", res.spatial_points},
                {"time_nodes", res.time_nodes}};
    }));
}

void blockdet_suite(const Config& cfg, const Tolerances& tol, SuiteReport& r) {
  const auto& b = cfg.blockdet;
  for (int n = 2; n <= b.max_n; ++n)
    for (int k = 1; k <= n - 1; ++k) {
      const std::uint64_t stream = kBlockdetStream + 16 * n + k;
      r.cases.push_back(guarded("n=" + std::to_string(n) + ",k=" + std::to_string(k), "blockdet", 0.0,
                                [&](CaseReport& c) {
                                  CounterRng rng(cfg.seed, stream);
                                  int matches = 0;
                                  for (int s = 0; s < b.specs_per_shape; ++s) {
                                    const auto spec = lincore::random_integer_spec(n, k, rng);
                                    matches += lincore::block_det_wedge(spec) == lincore::block_det_direct(spec);
                                  }
                                  c.lhs = matches;
                                  c.rhs = b.specs_per_shape;
                                  c.seeds = {cfg.seed, stream};
                                }));
    }
  for (int n = 2; n <= b.hess_max_n; ++n) {
    const std::uint64_t stream = kHessStream + n;
    r.cases.push_back(guarded("hess/n=" + std::to_string(n), "hess", tol.hess, [&](CaseReport& c) {
      CounterRng rng(cfg.seed, stream);
      double worst = -1.0;
      int refused = 0;
      for (int t = 0; t < b.hess_tuples; ++t) {
        std::vector<oscint::OscPhase> ph;
        std::vector<Point> x(n - 1, Point(n)), xi(n, Point(n - 1));
        for (int j = 0; j < n; ++j) ph.push_back(oscint::random_phase(n, rng));
        for (auto& p : x)
          for (auto& v : p) v = rng.uniform(-1, 1);
        for (auto& p : xi)
          for (auto& v : p) v = rng.uniform(-1, 1);
        try {
          const auto h = oscint::hess_psi_det(ph, x, xi);
          const double g = rel(h.dense, h.formula);
          if (g > worst) {
            worst = g;
            c.lhs = h.dense;
            c.rhs = h.formula;
          }
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kInvariantViolation) throw;
          ++refused;
        }
      }
      c.add_check("disagreements", refused, 0);
      c.data = {{"tuples", b.hess_tuples}, {"worst_relative_gap", worst}, {"sign", lincore::hess_sign(n)}};
      c.seeds = {cfg.seed, stream};
    }));
  }
}

void jacobian_suite(const Config& cfg, const Tolerances& tol, SuiteReport& r) {
  for (int n : cfg.jacobian.dims) {
    const std::uint64_t stream = kJacobianStream + n;
    r.cases.push_back(guarded("n=" + std::to_string(n), "jacobian", tol.jacobian, [&](CaseReport& c) {
      CounterRng rng(cfg.seed, stream);
      double worst = -1.0;
      for (int t = 0; t < cfg.jacobian.tuples; ++t) {
        std::vector<Point> etas(n - 1, Point(n - 1));
        Point xi(n - 1);
        for (auto& e : etas)
          for (auto& v : e) v = rng.uniform(-2.0, 2.0);
        for (auto& v : xi) v = rng.uniform(-2.0, 2.0);
        const auto j = integrals::paraboloid_jacobian_check(n, etas, xi);
        const double g = rel(j.numeric, j.analytic);
        if (g > worst) {
          worst = g;
          c.lhs = j.numeric;
          c.rhs = j.analytic;
        }
      }
      c.data = {{"tuples", cfg.jacobian.tuples}};
      c.seeds = {cfg.seed, stream};
    }));
  }
}

std::vector<kakeya::Tube> random_transversal_tubes(int n, std::uint64_t seed, double min_wedge) {
  CounterRng rng(seed, kKakeyaTubeStream + n);
  for (int attempt = 0; attempt < 10'000; ++attempt) {
    std::vector<kakeya::Tube> tubes;
    for (int j = 0; j < n; ++j) {
      Point d(n), offset(n);
      for (auto& v : d) v = rng.normal();
      for (auto& v : offset) v = rng.uniform(-0.5, 0.5);
      tubes.push_back(kakeya::Tube::along(d, kakeya::CrossSection::unit_box(n - 1), offset));
    }
    if (kakeya::wedge_magnitude(tubes) >= min_wedge) return tubes;
  }
  throw Error(ErrorCode::kConfig, "no random transversal tuple reached the wedge floor");
}

void kakeya_suite(const Config& cfg, const Tolerances& tol, SuiteReport& r) {
  const auto& k = cfg.kakeya;
  for (std::size_t ci = 0; ci < k.configurations.size(); ++ci) {
    const auto& conf = k.configurations[ci];
    r.cases.push_back(guarded(conf.name, "kakeya", tol.kakeya_relative, [&](CaseReport& c) {
      std::vector<kakeya::Tube> tubes;
      if (conf.random_n > 0) {
        tubes = random_transversal_tubes(conf.random_n, conf.random_seed, k.min_wedge);
      } else {
        for (const auto& t : conf.tubes) tubes.push_back(build_tube(t));
      }
      const int n = tubes.front().dim();
      const double rhs = kakeya::wedge_rhs(tubes);
      CounterRng zr(cfg.seed, kKakeyaZStream + ci);
      std::vector<Point> zs;
      for (int i = 0; i < k.z_count; ++i) {
        Point z(n, 0.0);
        if (i > 0)
          for (auto& v : z) v = zr.uniform(-k.z_box, k.z_box);
        zs.push_back(z);
      }
      std::vector<kakeya::MonteCarloEstimate> est;
      Json points = Json::array();
      double wsum = 0.0, wmean = 0.0;
      for (int i = 0; i < k.z_count; ++i) {
        kakeya::MonteCarloSpec spec;
        spec.samples = k.samples;
        spec.shards = k.shards;
        spec.seed = derive_key(cfg.seed, kKakeyaMcStream + 64 * ci + i);
        spec.workers = cfg.workers;
        est.push_back(kakeya::conv_at(tubes, zs[i], spec));
        c.seeds.push_back(spec.seed);
        const auto& e = est.back();
        points.push_back({{"z", zs[i]}, {"conv", e.estimate}, {"stderr", e.standard_error}, {"samples", e.samples}});
        const double w = 1.0 / (e.standard_error * e.standard_error);
        wsum += w;
        wmean += w * e.estimate;
      }
      wmean /= wsum;
      const double se = 1.0 / std::sqrt(wsum);
      for (int i = 0; i < k.z_count; ++i) {
        const auto& e = est[i];
        c.add_check("z" + std::to_string(i) + "_vs_rhs_in_stderr", std::abs(e.estimate - rhs) / e.standard_error,
                    tol.kakeya_sigmas);
        c.add_check("z" + std::to_string(i) + "_vs_pooled_in_stderr", std::abs(e.estimate - wmean) / e.standard_error,
                    tol.kakeya_sigmas);
      }
      c.add_check("pooled_vs_rhs_in_stderr", std::abs(wmean - rhs) / se, tol.kakeya_sigmas);
      c.lhs = wmean;
      c.lhs_error = se;
      c.rhs = rhs;
      c.data = {{"n", n},
                {"wedge", kakeya::wedge_magnitude(tubes)},
                {"constant", kakeya::kakeya_constant(n)},
                {"constant_source", "orthogonal unit-box case"},
                {"points", points}};
    }));
  }
  if (k.families.empty()) return;
  for (std::size_t si = 0; si < k.family_sigmas.size(); ++si) {
    const double sigma = k.family_sigmas[si];
    std::ostringstream id;
    id << "families/sigma=" << sigma;
    CaseReport c;
    c.id = id.str();
    c.kind = "kakeya-families";
    try {
      std::vector<kakeya::TubeFamily> fams;
      for (const auto& f : k.families) {
        kakeya::TubeFamily tf;
        for (const auto& t : f) {
          tf.tubes.push_back(build_tube(t));
          tf.coefficients.push_back(t.coefficient);
        }
        fams.push_back(std::move(tf));
      }
      kakeya::MonteCarloSpec spec;
      spec.samples = k.family_samples;
      spec.shards = k.shards;
      spec.seed = derive_key(cfg.seed, kFamilyStream + si);
      spec.workers = cfg.workers;
      const auto s = kakeya::sigma_family_sums(fams, sigma, spec);
      c.lhs = s.lhs;
      c.lhs_error = s.lhs_stderr;
      c.rhs = s.rhs;
      c.seeds = {spec.seed};
      c.data = {{"sigma", sigma}, {"tuples", s.tuples}};
      // The criterion is statistical: the gap must sit inside the propagated band.
      c.tolerance = s.rhs == 0.0 ? 0.0 : tol.kakeya_sigmas * s.lhs_stderr / std::abs(s.rhs);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kConfig) throw;
      c.error = e.what();
    }
    c.finish();
    r.cases.push_back(std::move(c));
  }
}

phases::Polynomial height_polynomial(const Config& cfg, const std::string& name) {
  const PhaseSpec& p = cfg.phases.at(name);
  if (p.kind == "paraboloid") return phases::Polynomial::squared_norm(1);
  std::vector<phases::Monomial> m;
  for (const auto& [e, coeff] : p.terms) m.push_back({e, coeff});
  return phases::Polynomial(1, std::move(m));
}

void scaling_suite(const Config& cfg, const Tolerances& tol, SuiteReport& r) {
  const auto& s = cfg.scaling;
  if (s.phases.empty()) return;
  const double target = -2.0;  // -n(n-1) at n = 2
  r.cases.push_back(guarded("scaling/n=2", "scaling", tol.scaling_slope / std::abs(target), [&](CaseReport& c) {
    std::vector<oscint::OscPhase> ph;
    for (const auto& p : s.phases)
      ph.push_back(oscint::extension_phase(height_polynomial(cfg, p.height),
                                           oscint::Cutoff{phases::Box{p.x_lo, p.x_hi}, p.x_taper},
                                           oscint::Cutoff{phases::Box::interval(p.xi_lo, p.xi_hi), 0.0}));
    std::vector<phases::Density> dens;
    for (const auto& d : s.densities) dens.push_back(build_density(cfg, d));
    oscint::ScalingOptions opts;
    opts.seed = derive_key(cfg.seed, kScalingStream);
    opts.workers = cfg.workers;
    const auto res = oscint::scaling_experiment(ph, dens, s.lambdas, opts);
    c.seeds = {opts.seed};
    Json points = Json::array();
    for (const auto& p : res.points)
      points.push_back({{"lambda", p.lambda},
                        {"lhs", p.lhs},
                        {"normalized", p.normalized},
                        {"truncation", p.truncation},
                        {"radius", p.radius},
                        {"x_nodes", p.x_nodes}});
    c.data = {{"slope", res.slope}, {"points", points}, {"transversality_min", res.transversality_min}};
    if (res.degenerate) {
      c.error = "degenerate: LHS vanishes identically, slope undefined";
      c.lhs = NAN;
      c.rhs = target;
      return;
    }
    c.lhs = res.slope;
    c.rhs = target;
    c.add_check("ratio_spread", res.ratio_spread, tol.scaling_ratio);
  }));
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"verify-bilinear", "verify-sigma",    "verify-ot",     "verify-kakeya",
                                              "verify-blockdet", "verify-jacobian", "verify-scaling"};
  return names;
}

std::vector<std::string> expand_suite(const std::string& name) {
  if (name == "all") return suite_names();
  for (const auto& s : suite_names())
    if (s == name) return {name};
  throw Error(ErrorCode::kConfig, "--suite: unknown suite '" + name + "'");
}

std::string config_digest(const Config& config) {
  Config c = config;
  c.workers = 0;
  return hex_digest(to_json(c).dump());
}

SuiteReport run_suite(const Config& cfg, const std::string& suite, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  SuiteReport r;
  r.suite = suite;
  r.config_digest = config_digest(cfg);
  r.convention = cfg.convention.fingerprint();
  r.seed = cfg.seed;
  r.tolerance_scale = options.tolerance_scale;
  const Tolerances tol = cfg.tolerances.scaled(options.tolerance_scale);
  if (suite == "verify-bilinear") {
    bilinear_suite(cfg, tol, r);
  } else if (suite == "verify-sigma") {
    sigma_suite(cfg, tol, r);
  } else if (suite == "verify-ot") {
    ot_suite(cfg, tol, r);
  } else if (suite == "verify-kakeya") {
    kakeya_suite(cfg, tol, r);
  } else if (suite == "verify-blockdet") {
    blockdet_suite(cfg, tol, r);
  } else if (suite == "verify-jacobian") {
    jacobian_suite(cfg, tol, r);
  } else if (suite == "verify-scaling") {
    scaling_suite(cfg, tol, r);
  } else {
    throw Error(ErrorCode::kConfig, "--suite: unknown suite '" + suite + "'");
  }
  r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string blockdet_golden(const Config& cfg) {
  std::ostringstream out;
  const auto& b = cfg.blockdet;
  for (int n = 2; n <= b.max_n; ++n)
    for (int k = 1; k <= n - 1; ++k) {
      CounterRng rng(cfg.seed, kBlockdetStream + 16 * n + k);
      std::string dets;
      lincore::Rational sum = 0;
      for (int s = 0; s < b.specs_per_shape; ++s) {
        const auto d = lincore::block_det_direct(lincore::random_integer_spec(n, k, rng));
        dets += lincore::to_string(d) + "\n";
        sum += d;
      }
      out << "n=" << n << " k=" << k << " count=" << b.specs_per_shape << " sum=" << lincore::to_string(sum)
          << " digest=" << hex_digest(dets) << '\n';
    }
  return out.str();
}

std::string hess_sign_golden(int max_n) {
  std::ostringstream out;
  for (int n = 2; n <= max_n; ++n) out << "n=" << n << " sign=" << lincore::hess_sign(n) << '\n';
  return out.str();
}

}  // namespace mlid::cli
