#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace mlid::cli {

enum ExitCode { kExitPass = 0, kExitFail = 1, kExitConfig = 2 };

// The command line front end; args exclude the program name.
//   run     --config --suite --seed --workers --out --tolerance-scale
//   export  --reports <file|dir>... --series scaling|constancy [--output]
//   print-config [--config]
//   golden blockdet|hess-sign
// MLID_WORKERS overrides the config's worker count; --workers overrides both.
// Flag, then environment, then config. Throws kConfig on a malformed env value.
int resolve_workers(int configured, const char* env, std::optional<int> flag);

int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mlid::cli
