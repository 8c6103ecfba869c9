#include "mlid/cli/app.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>

#include "CLI11.hpp"
#include "mlid/cli/config.hpp"
#include "mlid/cli/report.hpp"
#include "mlid/cli/suites.hpp"
#include "mlid/common/error.hpp"

namespace mlid::cli {
namespace {

void print_case(std::ostream& out, const std::string& suite, const CaseReport& c) {
  out << (c.pass ? "PASS " : "FAIL ") << suite << ' ' << c.id << std::setprecision(6) << "  lhs=" << c.lhs
      << " rhs=" << c.rhs << " gap=" << c.relative_gap << " tol=" << c.tolerance;
  for (const auto& k : c.checks)
    if (!k.pass) out << "  [" << k.name << ' ' << k.value << " > " << k.bound << ']';
  if (!c.error.empty()) out << "  error: " << c.error;
  out << '\n';
}

}  // namespace

int resolve_workers(int configured, const char* env, std::optional<int> flag) {
  if (flag) return *flag;
  if (!env) return configured;
  try {
    std::size_t used = 0;
    const int w = std::stoi(env, &used);
    if (used == std::string(env).size() && w >= 0) return w;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::kConfig, std::string("MLID_WORKERS: expected a nonnegative integer, got '") + env + "'");
}

int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical and exact checks of multilinear extension and Kakeya identities", "mlid"};
  app.require_subcommand(1);

  std::string config_path, suite = "all", out_dir = "reports";
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  double tolerance_scale = 1.0;
  auto* run = app.add_subcommand("run", "Run verification suites and write reports");
  run->add_option("--config", config_path, "Experiment configuration (JSON); built-in defaults when omitted");
  run->add_option("--suite", suite, "verify-bilinear | verify-sigma | verify-ot | verify-kakeya | verify-blockdet | "
                                    "verify-jacobian | verify-scaling | all");
  run->add_option("--seed", seed, "Override the configured seed");
  run->add_option("--workers", workers, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  run->add_option("--out", out_dir, "Directory receiving <suite>-<k>.json and .csv");
  run->add_option("--tolerance-scale", tolerance_scale, "Multiply every tolerance")->check(CLI::PositiveNumber);

  std::vector<std::string> report_inputs;
  std::string series, output;
  auto* exp = app.add_subcommand("export", "Plot-ready CSV from report files");
  exp->add_option("--reports", report_inputs, "Report files or directories")->required();
  exp->add_option("--series", series, "scaling | constancy")->required();
  exp->add_option("--output", output, "CSV path (stdout when omitted)");

  std::string print_path;
  auto* print = app.add_subcommand("print-config", "Print the validated configuration as JSON");
  print->add_option("--config", print_path, "Configuration to normalise; defaults when omitted");

  std::string golden_kind;
  auto* golden = app.add_subcommand("golden", "Print a golden file of the exact suites (default config)");
  golden->add_option("kind", golden_kind, "blockdet | hess-sign")->required()->check(CLI::IsMember({"blockdet", "hess-sign"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (*print) {
      out << to_json(print_path.empty() ? default_config() : load_config(print_path)).dump(2) << '\n';
      return kExitPass;
    }
    if (*golden) {
      out << (golden_kind == "blockdet" ? blockdet_golden(default_config()) : hess_sign_golden());
      return kExitPass;
    }
    if (*exp) {
      const std::vector<std::filesystem::path> inputs(report_inputs.begin(), report_inputs.end());
      const std::string csv = export_plot_data(load_reports(inputs), series);
      if (output.empty()) {
        out << csv;
      } else {
        std::ofstream(output) << csv;
      }
      return kExitPass;
    }

    Config cfg = config_path.empty() ? default_config() : load_config(config_path);
    if (seed) cfg.seed = *seed;
    cfg.workers = resolve_workers(cfg.workers, std::getenv("MLID_WORKERS"), workers);
    const auto suites = expand_suite(suite);

    bool all_pass = true;
    for (const auto& s : suites) {
      const SuiteReport r = run_suite(cfg, s, RunOptions{tolerance_scale});
      for (const auto& c : r.cases) print_case(out, s, c);
      const auto path = write_report(r, out_dir);
      out << s << ": " << (r.pass() ? "pass" : "FAIL") << " (" << std::fixed << std::setprecision(1)
          << r.runtime_seconds << " s) -> " << path.string() << '\n'
          << std::defaultfloat;
      all_pass = all_pass && r.pass();
    }
    return all_pass ? kExitPass : kExitFail;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) {
      err << "config error: " << e.what() << '\n';
      return kExitConfig;
    }
    err << "error: " << e.what() << '\n';
    return kExitFail;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFail;
  }
}

}  // namespace mlid::cli
