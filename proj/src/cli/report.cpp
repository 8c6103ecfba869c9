#include "mlid/cli/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "mlid/common/digest.hpp"
#include "mlid/common/error.hpp"

namespace mlid::cli {
namespace fs = std::filesystem;

namespace {

// Shortest text that reads back to the same double.
std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto end = std::to_chars(buf, buf + sizeof buf, v).ptr;
  return std::string(buf, end);
}

}  // namespace

double relative_gap(double lhs, double rhs) {
  if (rhs == 0.0) return lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(lhs - rhs) / std::abs(rhs);
}

void CaseReport::add_check(std::string name, double value, double bound) {
  checks.push_back({std::move(name), value, bound, value <= bound});
}

void CaseReport::finish() {
  relative_gap = cli::relative_gap(lhs, rhs);
  pass = error.empty() && relative_gap <= tolerance &&
         std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

bool SuiteReport::pass() const {
  return std::all_of(cases.begin(), cases.end(), [](const CaseReport& c) { return c.pass; });
}

Json report_json(const SuiteReport& r) {
  Json cases = Json::array();
  for (const auto& c : r.cases) {
    Json checks = Json::array();
    for (const auto& k : c.checks) checks.push_back({{"name", k.name}, {"value", k.value}, {"bound", k.bound}, {"pass", k.pass}});
    Json j{{"id", c.id},
           {"kind", c.kind},
           {"lhs", {{"value", c.lhs}, {"error", c.lhs_error}}},
           {"rhs", {{"value", c.rhs}, {"error", c.rhs_error}}},
           {"relative_gap", c.relative_gap},
           {"tolerance", c.tolerance},
           {"pass", c.pass},
           {"checks", checks},
           {"seeds", c.seeds}};
    if (!c.error.empty()) j["error"] = c.error;
    if (!c.data.empty()) j["data"] = c.data;
    cases.push_back(j);
  }
  std::size_t passed = 0;
  for (const auto& c : r.cases) passed += c.pass;
  Json payload{{"suite", r.suite},
               {"config_digest", r.config_digest},
               {"convention", r.convention},
               {"seed", r.seed},
               {"tolerance_scale", r.tolerance_scale},
               {"pass", r.pass()},
               {"passed", passed},
               {"total", r.cases.size()},
               {"cases", cases}};
  return Json{{"payload", payload},
              {"payload_digest", hex_digest(payload.dump())},
              {"timing", {{"runtime_seconds", r.runtime_seconds}}}};
}

std::string report_csv(const SuiteReport& r) {
  std::ostringstream s;
  s << "suite,id,kind,lhs,lhs_error,rhs,rhs_error,relative_gap,tolerance,pass\n";
  for (const auto& c : r.cases)
    s << r.suite << ',' << c.id << ',' << c.kind << ',' << num(c.lhs) << ',' << num(c.lhs_error) << ','
      << num(c.rhs) << ',' << num(c.rhs_error) << ',' << num(c.relative_gap) << ',' << num(c.tolerance) << ','
      << (c.pass ? "true" : "false") << '\n';
  return s.str();
}

fs::path write_report(const SuiteReport& r, const fs::path& dir) {
  fs::create_directories(dir);
  for (int k = 1;; ++k) {
    const fs::path json = dir / (r.suite + "-" + std::to_string(k) + ".json");
    fs::path csv = json;
    csv.replace_extension(".csv");
    if (fs::exists(json) || fs::exists(csv)) continue;
    std::ofstream(json) << report_json(r).dump(2) << '\n';
    std::ofstream(csv) << report_csv(r);
    return json;
  }
}

std::vector<Json> load_reports(const std::vector<fs::path>& inputs) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(in))
        if (e.path().extension() == ".json") found.push_back(e.path());
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::exists(in)) {
      files.push_back(in);
    } else {
      throw Error(ErrorCode::kConfig, "no such report file or directory: " + in.string());
    }
  }
  std::vector<Json> out;
  for (const auto& f : files) {
    std::ifstream s(f);
    try {
      Json j = Json::parse(s);
      if (!j.contains("payload")) throw Error(ErrorCode::kConfig, f.string() + ": not a report (no payload)");
      out.push_back(std::move(j));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kConfig, f.string() + ": " + e.what());
    }
  }
  return out;
}

std::string export_plot_data(const std::vector<Json>& reports, const std::string& series) {
  std::ostringstream s;
  if (series == "scaling") {
    std::ostringstream comments, rows;
    for (const auto& r : reports)
      for (const auto& c : r["payload"]["cases"]) {
        if (c.value("kind", "") != "scaling" || !c.contains("data")) continue;
        const auto& d = c["data"];
        comments << "# " << c["id"].get<std::string>()
                 << " slope=" << num(d["slope"].is_number() ? d["slope"].get<double>() : NAN) << '\n';
        for (const auto& p : d["points"]) {
          const double l = p["lambda"].get<double>();
          const double v = p["lhs"].get<double>();
          rows << num(l) << ',' << num(v) << ',' << num(l * l * v) << '\n';
        }
      }
    s << comments.str() << "lambda,lhs,lambda2_lhs\n" << rows.str();
  } else if (series == "constancy") {
    s << "configuration,z,conv,stderr,lower_3sigma,upper_3sigma,rhs\n";
    for (const auto& r : reports)
      for (const auto& c : r["payload"]["cases"]) {
        if (c.value("kind", "") != "kakeya" || !c.contains("data")) continue;
        const double rhs = c["rhs"]["value"].get<double>();
        for (const auto& p : c["data"]["points"]) {
          std::string z;
          for (const auto& x : p["z"]) z += (z.empty() ? "" : ";") + num(x.get<double>());
          const double v = p["conv"].get<double>();
          const double e = p["stderr"].get<double>();
          s << c["id"].get<std::string>() << ',' << z << ',' << num(v) << ',' << num(e) << ',' << num(v - 3 * e) << ','
            << num(v + 3 * e) << ',' << num(rhs) << '\n';
        }
      }
  } else {
    throw Error(ErrorCode::kConfig, "unknown series '" + series + "' (scaling | constancy)");
  }
  return s.str();
}

}  // namespace mlid::cli
