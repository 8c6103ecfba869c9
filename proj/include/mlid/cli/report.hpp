#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mlid/cli/config.hpp"

namespace mlid::cli {

// A named side condition of a case: pass iff value <= bound.
struct Check {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct CaseReport {
  std::string id;
  std::string kind;
  double lhs = 0.0, lhs_error = 0.0;
  double rhs = 0.0, rhs_error = 0.0;
  double relative_gap = 0.0;
  double tolerance = 0.0;
  bool pass = false;  // relative_gap <= tolerance and every check passed
  std::vector<Check> checks;
  std::vector<std::uint64_t> seeds;
  std::string error;  // set when the computation itself was refused
  Json data = Json::object();  // series consumed by export

  void add_check(std::string name, double value, double bound);
  // Sets relative_gap from lhs and rhs and recomputes pass.
  void finish();
};

struct SuiteReport {
  std::string suite;
  std::string config_digest;
  std::string convention;
  std::uint64_t seed = 0;
  double tolerance_scale = 1.0;
  std::vector<CaseReport> cases;
  double runtime_seconds = 0.0;

  bool pass() const;
};

double relative_gap(double lhs, double rhs);

// {"payload": {...}, "payload_digest": hex, "timing": {...}}. The payload
// contains everything but wall-clock data and is a pure function of
// (config, seed, suite).
Json report_json(const SuiteReport& r);
// One row per case.
std::string report_csv(const SuiteReport& r);

// Writes <dir>/<suite>-<k>.json and .csv for the first unused k; existing
// files are never touched. Returns the JSON path.
std::filesystem::path write_report(const SuiteReport& r, const std::filesystem::path& dir);

// Report documents from files and directories (every *.json inside, sorted
// by name). Throws Error(kConfig) on unreadable input.
std::vector<Json> load_reports(const std::vector<std::filesystem::path>& inputs);

// Plot-ready CSV of a series over report documents:
//   scaling    lambda,lhs,lambda2_lhs (slope in a leading comment per run)
//   constancy  configuration,z,conv,stderr,lower_3sigma,upper_3sigma,rhs
// Throws Error(kConfig) for an unknown series.
std::string export_plot_data(const std::vector<Json>& reports, const std::string& series);

}  // namespace mlid::cli
