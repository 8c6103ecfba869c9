#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mlid/extension/convention.hpp"
#include "mlid/kakeya/tube.hpp"
#include "mlid/phases/density.hpp"
#include "mlid/phases/phase_function.hpp"

namespace mlid::cli {

using Json = nlohmann::ordered_json;

// A validated experiment configuration. Every section is plain data; the
// build_* helpers turn entries into library objects.
struct PhaseSpec {
  std::string kind;  // paraboloid | polynomial | tabulated
  int dim = 1;
  // polynomial: exponents and coefficient of each term
  std::vector<std::pair<std::vector<int>, double>> terms;
  // tabulated: either inline values or a sampled source (cosh or another
  // polynomial/paraboloid entry given inline)
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;
  std::vector<double> values;
  std::string sample;  // "" | "cosh" | "polynomial"
  std::vector<std::pair<std::vector<int>, double>> sample_terms;

  bool operator==(const PhaseSpec&) const = default;
};

struct DensitySpec {
  std::string kind;  // gaussian | bump | indicator | samples | zero
  std::vector<double> center;
  double stddev = 0.0;
  double amplitude = 1.0;
  double truncation = 8.0;
  double radius = 0.0;
  std::vector<double> lo, hi;
  std::vector<int> shape;
  std::vector<std::pair<double, double>> values;  // (re, im), first axis fastest
  int dim = 1;
  std::vector<double> modulation;

  bool operator==(const DensitySpec&) const = default;
};

struct TubeSpec {
  std::vector<double> direction;
  std::string cross_section = "box";  // box | ball
  std::vector<double> sides;          // box only; unit sides when empty
  std::vector<double> offset;
  double coefficient = 1.0;  // weights inside a family

  bool operator==(const TubeSpec&) const = default;
};

struct Tolerances {
  double bilinear = 1e-2;
  double tail = 0.1;
  double sigma = 1e-2;
  double ot = 1e-3;
  double kakeya_sigmas = 3.0;
  double kakeya_relative = 1e-2;
  double jacobian = 1e-6;
  double hess = 1e-8;
  double scaling_slope = 0.1;
  double scaling_ratio = 2.0;

  bool operator==(const Tolerances&) const = default;
  Tolerances scaled(double factor) const;
};

struct IdentityCase {
  std::string name;
  std::vector<std::string> phases;
  std::vector<std::string> densities;
  double sigma = 0.0;
  bool operator==(const IdentityCase&) const = default;
};

struct BilinearSuite {
  std::vector<IdentityCase> cases;
  double r1 = 40.0;
  double r2 = 80.0;
  bool operator==(const BilinearSuite&) const = default;
};

struct SigmaSuite {
  std::vector<IdentityCase> cases;  // each case is run at every sigma
  std::vector<double> sigmas;
  bool operator==(const SigmaSuite&) const = default;
};

struct OtPair {
  std::string name, f1, f2;
  bool operator==(const OtPair&) const = default;
};

struct OtSuite {
  std::vector<OtPair> pairs;
  bool operator==(const OtSuite&) const = default;
};

struct KakeyaConfiguration {
  std::string name;
  std::vector<TubeSpec> tubes;  // explicit tubes, or
  int random_n = 0;             // a seeded random transversal tuple in R^n
  std::uint64_t random_seed = 0;
  bool operator==(const KakeyaConfiguration&) const = default;
};

struct KakeyaSuite {
  std::uint64_t samples = 10'000'000;
  int shards = 64;
  int z_count = 5;
  double z_box = 5.0;
  double min_wedge = 0.3;
  std::vector<KakeyaConfiguration> configurations;
  std::vector<std::vector<TubeSpec>> families;
  std::vector<double> family_sigmas;
  std::uint64_t family_samples = 2'000'000;
  bool operator==(const KakeyaSuite&) const = default;
};

struct BlockdetSuite {
  int specs_per_shape = 1000;
  int max_n = 6;
  int hess_tuples = 200;
  int hess_max_n = 4;
  bool operator==(const BlockdetSuite&) const = default;
};

struct JacobianSuite {
  std::vector<int> dims{3, 4, 5};
  int tuples = 100;
  bool operator==(const JacobianSuite&) const = default;
};

struct ScalingPhaseSpec {
  std::string height;  // name of a one-variable paraboloid or polynomial phase
  std::vector<double> x_lo, x_hi;
  double x_taper = 0.0;
  double xi_lo = 0.0, xi_hi = 0.0;
  bool operator==(const ScalingPhaseSpec&) const = default;
};

struct ScalingSuite {
  std::vector<ScalingPhaseSpec> phases;
  std::vector<std::string> densities;
  std::vector<double> lambdas;
  bool operator==(const ScalingSuite&) const = default;
};

struct Config {
  extension::FourierConvention convention;
  std::uint64_t seed = 1;
  int workers = 0;
  Tolerances tolerances;
  std::map<std::string, PhaseSpec> phases;
  std::map<std::string, DensitySpec> densities;
  BilinearSuite bilinear;
  SigmaSuite sigma;
  OtSuite ot;
  KakeyaSuite kakeya;
  BlockdetSuite blockdet;
  JacobianSuite jacobian;
  ScalingSuite scaling;

  bool operator==(const Config& o) const;
};

// Parses and validates; throws Error(kConfig) whose message names the
// offending field by its JSON path.
Config parse_config(const Json& j);
Config load_config(const std::string& path);
Json to_json(const Config& c);

// The configuration shipped as configs/default.json.
Config default_config();

phases::PhaseFunction build_phase(const Config& c, const std::string& name);
phases::Density build_density(const Config& c, const std::string& name);
kakeya::Tube build_tube(const TubeSpec& t);

}  // namespace mlid::cli
