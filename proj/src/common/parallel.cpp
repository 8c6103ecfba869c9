#include "mlid/common/parallel.hpp"

#include <cstdlib>
#include <string>

namespace mlid {

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MLID_WORKERS")) {
    try {
      const int parsed = std::stoi(env);
      if (parsed > 0) return parsed;
    } catch (const std::exception&) {
      // fall through to hardware concurrency
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace mlid
