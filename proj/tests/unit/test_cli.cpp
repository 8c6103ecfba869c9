#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "mlid/cli/app.hpp"
#include "mlid/cli/config.hpp"
#include "mlid/cli/report.hpp"
#include "mlid/cli/suites.hpp"
#include "mlid/common/error.hpp"
#include "mlid/integrals/presets.hpp"
#include "mlid/lincore/block_det.hpp"

namespace {

using namespace mlid;
using namespace mlid::cli;
namespace fs = std::filesystem;

const fs::path kSource = MLID_SOURCE_DIR;

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Fresh scratch directory per test.
fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("mlid_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

struct Run {
  int code;
  std::string out, err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_main(args, out, err);
  return {code, out.str(), err.str()};
}

std::string config_error(const Json& j) {
  try {
    parse_config(j);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
    return e.what();
  }
  return "";
}

// A config exercising every phase, density and tube form.
Config rich_config() {
  Config c = default_config();
  c.seed = 99;
  c.workers = 3;
  PhaseSpec poly;
  poly.kind = "polynomial";
  poly.dim = 2;
  poly.terms = {{{2, 0}, 1.0}, {{1, 1}, -0.5}};
  c.phases["poly2"] = poly;
  PhaseSpec inline_table;
  inline_table.kind = "tabulated";
  inline_table.lo = -1.0;
  inline_table.step = 0.5;
  inline_table.hi = 1.0;
  inline_table.values = {1.0, 0.25, 0.0, 0.25, 1.0};
  c.phases["inline"] = inline_table;
  DensitySpec ind;
  ind.kind = "indicator";
  ind.lo = {0.0, 0.0};
  ind.hi = {1.0, 2.0};
  ind.dim = 2;
  ind.modulation = {1.0, -1.0};
  c.densities["box"] = ind;
  DensitySpec smp;
  smp.kind = "samples";
  smp.lo = {0.0};
  smp.hi = {1.0};
  smp.shape = {4};
  smp.values = {{0.0, 0.0}, {1.0, 0.5}, {1.0, -0.5}, {0.0, 0.0}};
  c.densities["sampled"] = smp;
  DensitySpec z;
  z.kind = "zero";
  z.dim = 1;
  c.densities["nothing"] = z;
  TubeSpec ball;
  ball.direction = {0.0, 0.0, 1.0};
  ball.cross_section = "ball";
  ball.offset = {0.0, 1.0, 0.0};
  TubeSpec box;
  box.direction = {1.0, 0.0, 0.0};
  box.sides = {2.0, 0.5};
  box.offset = {0.0, 0.0, 0.0};
  TubeSpec unit;
  unit.direction = {0.0, 1.0, 0.0};
  unit.offset = {0.0, 0.0, 0.0};
  c.kakeya.configurations.push_back({"mixed", {ball, box, unit}, 0, 0});
  c.tolerances.ot = 2e-3;
  c.convention.frequency_scale = 2.0;
  return c;
}

TEST(Config, ShippedDefaultParsesToTheBuiltInDefault) {
  EXPECT_TRUE(load_config((kSource / "configs" / "default.json").string()) == default_config());
}

TEST(Config, RoundTripIsTheIdentity) {
  for (const Config& c : {default_config(), rich_config()}) {
    const Config back = parse_config(to_json(c));
    EXPECT_TRUE(back == c);
    EXPECT_EQ(to_json(back).dump(), to_json(c).dump());
  }
  const Json text = Json::parse(to_json(rich_config()).dump());
  EXPECT_TRUE(parse_config(text) == rich_config());
}

TEST(Config, EmptyDocumentGivesEmptySuites) {
  const Config c = parse_config(Json::object());
  EXPECT_TRUE(c.bilinear.cases.empty());
  EXPECT_TRUE(c.kakeya.configurations.empty());
  EXPECT_EQ(c.seed, 1u);
}

TEST(Config, MissingPhaseKindNamesTheField) {
  Json j = to_json(default_config());
  j["phases"]["parabola"].erase("kind");
  EXPECT_NE(config_error(j).find("phases.parabola.kind"), std::string::npos);

  const fs::path dir = scratch("missing_kind");
  std::ofstream(dir / "bad.json") << j.dump();
  const auto r = run({"run", "--config", (dir / "bad.json").string(), "--suite", "verify-jacobian", "--out",
                      (dir / "out").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("phases.parabola.kind"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(Config, DiagnosticsNameThePath) {
  Json j = to_json(default_config());
  j["densities"]["g_plus"]["stddev"] = -1.0;
  EXPECT_NE(config_error(j).find("densities.g_plus.stddev"), std::string::npos);

  j = to_json(default_config());
  j["suites"]["bilinear"]["cases"][1]["phases"][0] = "nope";
  EXPECT_NE(config_error(j).find("suites.bilinear.cases[1].phases[0]"), std::string::npos);

  j = to_json(default_config());
  j["suites"]["kakeya"]["configurations"][0]["tubes"][1]["offset"] = {1.0};
  EXPECT_NE(config_error(j).find("suites.kakeya.configurations[0].tubes[1].offset"), std::string::npos);

  j = to_json(default_config());
  j["suites"]["scaling"]["lambda"] = {1.0};
  EXPECT_NE(config_error(j).find("suites.scaling.lambda: unknown field"), std::string::npos);

  j = to_json(default_config());
  j["phases"]["parabola"]["kind"] = "spline";
  EXPECT_NE(config_error(j).find("unknown phase kind 'spline'"), std::string::npos);

  j = to_json(default_config());
  j["seed"] = "one";
  EXPECT_NE(config_error(j).find("seed: expected an integer"), std::string::npos);
}

TEST(Config, LoadReportsMissingAndMalformedFiles) {
  const fs::path dir = scratch("load");
  try {
    load_config((dir / "absent.json").string());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
  }
  std::ofstream(dir / "broken.json") << "{\"seed\": ";
  EXPECT_EQ(run({"print-config", "--config", (dir / "broken.json").string()}).code, 2);
}

TEST(Config, ToleranceScaling) {
  const Tolerances t = Tolerances{}.scaled(2.0);
  EXPECT_DOUBLE_EQ(t.bilinear, 2e-2);
  EXPECT_DOUBLE_EQ(t.kakeya_sigmas, 6.0);
  EXPECT_DOUBLE_EQ(t.scaling_ratio, 3.0);
  EXPECT_TRUE(Tolerances{}.scaled(1.0) == Tolerances{});
}

TEST(Config, BuildersMatchTheLibraryPresets) {
  const Config c = default_config();
  const auto preset = integrals::tabulated_pair(0.0);
  const auto quartic = build_phase(c, "quartic");
  const auto hyperbolic = build_phase(c, "cosh");
  for (double x : {-2.9, -1.0, 0.013, 0.5, 2.7}) {
    EXPECT_EQ(quartic.value1(x), preset.phases[0].value1(x));
    EXPECT_EQ(hyperbolic.value1(x), preset.phases[1].value1(x));
  }
  const auto g = build_density(c, "ot_modulated");
  const std::vector<double> xi{0.7};
  const double amp = std::pow(std::numbers::pi, -0.25);
  const auto expect = amp * std::exp(-0.245) * std::polar(1.0, 5.0 * 0.7);
  EXPECT_NEAR(std::abs(g(xi) - expect), 0.0, 1e-15);
  EXPECT_THROW(build_density(c, "missing"), Error);

  const Config rich = rich_config();
  const auto p = build_phase(rich, "inline");
  EXPECT_DOUBLE_EQ(p.value1(0.5), 0.25);
  EXPECT_EQ(build_tube(rich.kakeya.configurations.back().tubes[1]).dim(), 3);
}

TEST(Workers, FlagBeatsEnvironmentBeatsConfig) {
  EXPECT_EQ(resolve_workers(3, nullptr, std::nullopt), 3);
  EXPECT_EQ(resolve_workers(3, "5", std::nullopt), 5);
  EXPECT_EQ(resolve_workers(3, "5", 2), 2);
  EXPECT_THROW(resolve_workers(3, "five", std::nullopt), Error);
  EXPECT_THROW(resolve_workers(3, "-1", std::nullopt), Error);
}

TEST(Report, PassNeedsGapAndEveryCheck) {
  CaseReport c;
  c.lhs = 1.005;
  c.rhs = 1.0;
  c.tolerance = 1e-2;
  c.finish();
  EXPECT_TRUE(c.pass);
  EXPECT_NEAR(c.relative_gap, 5e-3, 1e-15);
  c.add_check("tail", 0.2, 0.1);
  c.finish();
  EXPECT_FALSE(c.pass);
  CaseReport refused = c;
  refused.checks.clear();
  refused.error = "refused";
  refused.finish();
  EXPECT_FALSE(refused.pass);
  EXPECT_EQ(relative_gap(0.0, 0.0), 0.0);
  EXPECT_TRUE(std::isinf(relative_gap(1.0, 0.0)));
}

TEST(Report, WritesAreAppendOnly) {
  const fs::path dir = scratch("append");
  SuiteReport r;
  r.suite = "verify-x";
  r.cases.push_back(CaseReport{});
  const auto first = write_report(r, dir);
  const std::string before = read_file(first);
  r.runtime_seconds = 42.0;
  const auto second = write_report(r, dir);
  EXPECT_EQ(first.filename(), "verify-x-1.json");
  EXPECT_EQ(second.filename(), "verify-x-2.json");
  EXPECT_TRUE(fs::exists(dir / "verify-x-2.csv"));
  EXPECT_EQ(read_file(first), before);
}

TEST(Report, PayloadDigestIgnoresTiming) {
  SuiteReport r;
  r.suite = "verify-x";
  r.runtime_seconds = 1.0;
  const Json a = report_json(r);
  r.runtime_seconds = 2.0;
  const Json b = report_json(r);
  EXPECT_EQ(a["payload"].dump(), b["payload"].dump());
  EXPECT_EQ(a["payload_digest"], b["payload_digest"]);
  EXPECT_NE(a["timing"], b["timing"]);
}

SuiteReport fake_scaling() {
  SuiteReport r;
  r.suite = "verify-scaling";
  CaseReport c;
  c.id = "scaling/n=2";
  c.kind = "scaling";
  Json pts = Json::array();
  for (double l : {16.0, 32.0, 64.0, 128.0, 256.0}) pts.push_back({{"lambda", l}, {"lhs", 3.0 / (l * l)}});
  c.data = {{"slope", -2.0}, {"points", pts}};
  r.cases.push_back(c);
  return r;
}

TEST(Export, EmptyReportSetGivesHeaderOnly) {
  EXPECT_EQ(export_plot_data({}, "scaling"), "lambda,lhs,lambda2_lhs\n");
  EXPECT_EQ(export_plot_data({}, "constancy"), "configuration,z,conv,stderr,lower_3sigma,upper_3sigma,rhs\n");
}

TEST(Export, UnknownSeriesIsAConfigError) {
  try {
    export_plot_data({}, "histogram");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
  }
  const fs::path dir = scratch("unknown_series");
  EXPECT_EQ(run({"export", "--reports", dir.string(), "--series", "histogram"}).code, 2);
}

TEST(Export, ScalingRowsCarryTheSlope) {
  const std::string csv = export_plot_data({report_json(fake_scaling())}, "scaling");
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# scaling/n=2 slope=-2");
  std::getline(in, line);
  EXPECT_EQ(line, "lambda,lhs,lambda2_lhs");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    const double l2 = std::stod(line.substr(line.rfind(',') + 1));
    EXPECT_NEAR(l2, 3.0, 1e-14);
  }
  EXPECT_EQ(rows, 5);
}

TEST(Export, ConstancyRowsHaveThreeSigmaBands) {
  SuiteReport r;
  r.suite = "verify-kakeya";
  CaseReport c;
  c.id = "strips";
  c.kind = "kakeya";
  c.rhs = 1.0;
  c.data = {{"points", Json::array({{{"z", {0.5, -1.0}}, {"conv", 1.01}, {"stderr", 0.01}}})}};
  r.cases.push_back(c);
  const std::string csv = export_plot_data({report_json(r)}, "constancy");
  EXPECT_NE(csv.find("strips,0.5;-1,1.01,0.01,0.98"), std::string::npos) << csv;
  EXPECT_NE(csv.find(",1.04"), std::string::npos) << csv;
}

TEST(Golden, BlockdetDeterminantsMatch) {
  EXPECT_EQ(blockdet_golden(default_config()), read_file(kSource / "tests" / "golden" / "blockdet.txt"));
}

TEST(Golden, HessSignTableMatchesTheExponent) {
  EXPECT_EQ(hess_sign_golden(), read_file(kSource / "tests" / "golden" / "hess_sign.txt"));
  // (-1)^{n-1+(n-1)^2(n-2)/2} by hand: exponents 1, 4, 12, 28, 55, 96, 154.
  const int expected[] = {-1, 1, 1, 1, -1, 1, 1};
  for (int n = 2; n <= 8; ++n) EXPECT_EQ(lincore::hess_sign(n), expected[n - 2]) << n;
}

TEST(Run, BlockdetDefaultSeedIsExact) {
  const fs::path dir = scratch("blockdet");
  const auto r = run({"run", "--suite", "verify-blockdet", "--out", dir.string()});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  const Json rep = Json::parse(read_file(dir / "verify-blockdet-1.json"));
  EXPECT_TRUE(rep["payload"]["pass"].get<bool>());
  int exact = 0;
  for (const auto& c : rep["payload"]["cases"])
    if (c["kind"] == "blockdet") {
      EXPECT_EQ(c["lhs"]["value"].get<double>(), 1000.0);
      EXPECT_EQ(c["rhs"]["value"].get<double>(), 1000.0);
      ++exact;
    }
  EXPECT_EQ(exact, 15);
  EXPECT_TRUE(fs::exists(dir / "verify-blockdet-1.csv"));
}

TEST(Run, IdenticalConfigAndSeedReproduceThePayload) {
  const fs::path dir = scratch("determinism");
  ASSERT_EQ(run({"run", "--suite", "verify-jacobian", "--seed", "7", "--out", dir.string()}).code, 0);
  ASSERT_EQ(run({"run", "--suite", "verify-jacobian", "--seed", "7", "--workers", "1", "--out", dir.string()}).code, 0);
  ASSERT_EQ(run({"run", "--suite", "verify-jacobian", "--seed", "8", "--out", dir.string()}).code, 0);
  const Json a = Json::parse(read_file(dir / "verify-jacobian-1.json"));
  const Json b = Json::parse(read_file(dir / "verify-jacobian-2.json"));
  const Json c = Json::parse(read_file(dir / "verify-jacobian-3.json"));
  EXPECT_EQ(a["payload"].dump(), b["payload"].dump());
  EXPECT_NE(a["payload"].dump(), c["payload"].dump());
  EXPECT_EQ(a["payload"]["seed"], 7);
}

TEST(Run, OtPresetGivesOneHalf) {
  Config c = default_config();
  const SuiteReport r = run_suite(c, "verify-ot");
  ASSERT_EQ(r.cases.size(), 2u);
  for (const auto& k : r.cases) {
    EXPECT_TRUE(k.pass) << k.id << " " << k.error;
    EXPECT_NEAR(k.rhs, 0.5, 1e-12);
    EXPECT_LE(k.relative_gap, 1e-3);
  }
}

TEST(Run, FailuresExitOne) {
  // A tolerance scale this small cannot be met by any float suite.
  const fs::path dir = scratch("fail");
  const auto r = run({"run", "--suite", "verify-jacobian", "--tolerance-scale", "1e-30", "--out", dir.string()});
  EXPECT_EQ(r.code, 1) << r.out;
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
}

TEST(Run, BadArgumentsExitTwo) {
  const fs::path dir = scratch("badargs");
  EXPECT_EQ(run({"run", "--suite", "verify-everything", "--out", dir.string()}).code, 2);
  EXPECT_EQ(run({"run", "--tolerance-scale", "-1"}).code, 2);
  EXPECT_EQ(run({"run", "--seed", "minus"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
}

TEST(Run, ZeroDensityScalingIsDegenerate) {
  Config c = default_config();
  DensitySpec z;
  z.kind = "zero";
  c.densities["nothing"] = z;
  c.scaling.densities = {"bump_plus", "nothing"};
  c.scaling.lambdas = {16, 32};
  const SuiteReport r = run_suite(c, "verify-scaling");
  ASSERT_EQ(r.cases.size(), 1u);
  EXPECT_FALSE(r.cases[0].pass);
  EXPECT_NE(r.cases[0].error.find("degenerate"), std::string::npos);
}

TEST(Run, RefusalsBecomeFailedCases) {
  // Radii this small cannot satisfy the tail model.
  Config c = default_config();
  c.bilinear.r1 = 0.5;
  c.bilinear.r2 = 1.0;
  c.bilinear.cases.resize(1);
  const SuiteReport r = run_suite(c, "verify-bilinear");
  ASSERT_EQ(r.cases.size(), 1u);
  EXPECT_FALSE(r.cases[0].pass);
  EXPECT_FALSE(r.cases[0].error.empty());
}

TEST(Run, AllExpandsToEverySuite) {
  EXPECT_EQ(expand_suite("all"), suite_names());
  EXPECT_EQ(suite_names().size(), 7u);
  EXPECT_THROW(expand_suite("verify"), Error);
}

}  // namespace
