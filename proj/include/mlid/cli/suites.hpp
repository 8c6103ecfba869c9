#pragma once

#include <string>
#include <vector>

#include "mlid/cli/config.hpp"
#include "mlid/cli/report.hpp"

namespace mlid::cli {

// verify-bilinear, verify-sigma, verify-ot, verify-kakeya, verify-blockdet,
// verify-jacobian, verify-scaling; "all" expands to every one in this order.
const std::vector<std::string>& suite_names();
std::vector<std::string> expand_suite(const std::string& name);  // throws kConfig when unknown

struct RunOptions {
  double tolerance_scale = 1.0;
};

// Runs one suite on a validated config (seed and workers already applied).
// Refusals raised by the library (tail model, support condition, ...) mark
// the affected case failed instead of aborting the suite.
SuiteReport run_suite(const Config& config, const std::string& suite, const RunOptions& options = {});

// Exact determinants of the blockdet suite, one per line, and the hess sign
// table; compared against the golden files.
std::string blockdet_golden(const Config& config);
std::string hess_sign_golden(int max_n = 8);

// Digest of the config as it affects results (the worker count is excluded).
std::string config_digest(const Config& config);

}  // namespace mlid::cli
