#pragma once

#include "cptrrt/io.hpp"
#include "cptrrt/rng.hpp"

#include <filesystem>
#include <string>

namespace testsupport {

inline std::filesystem::path source_dir() { return CPTRRT_SOURCE_DIR; }

inline std::filesystem::path fire_room() { return source_dir() / "scenarios" / "fire_room.json"; }

// Fresh empty directory under the build tree's temp area.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("cptrrt_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline double uniform(cptrrt::Engine& eng, double lo, double hi) {
  return lo + (hi - lo) * cptrrt::unit_uniform(eng);
}

}  // namespace testsupport
