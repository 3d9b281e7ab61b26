#include "skillprobe/data_dir.hpp"

#include <cstdlib>

#ifndef SKILLPROBE_DEFAULT_DATA_DIR
#define SKILLPROBE_DEFAULT_DATA_DIR "data"
#endif

namespace skillprobe {

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("SKILLPROBE_DATA"); env && *env)
    return std::filesystem::path(env);
  return std::filesystem::path(SKILLPROBE_DEFAULT_DATA_DIR);
}

}  // namespace skillprobe
