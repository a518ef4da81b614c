#pragma once

#include "cptrrt/cost_field.hpp"
#include "cptrrt/planner.hpp"
#include "cptrrt/spsa.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cptrrt {

struct Scenario {
  std::string description;
  CostField field;
  std::optional<Point> start;
  std::optional<Point> goal;
};

// Thrown for malformed scenario documents; what() names the offending key.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Scenario parse_scenario(const std::string& text, const std::string& source = "<scenario>");
Scenario load_scenario(const std::filesystem::path& file);

// Header "x,y"; lines starting with '#' are comments. When `snapped` is set the
// last row is marked as the synthetic goal snap.
void write_path_csv(const Path& path, std::ostream& os, bool snapped = false);
Path read_path_csv(std::istream& is);
Path load_path_csv(const std::filesystem::path& file);

void write_tree_csv(const Tree& tree, std::ostream& os);
// Restores nodes, parent links, children and J_cum. Per-node risk is not stored.
Tree read_tree_csv(std::istream& is);

std::vector<std::string> param_names(Eigen::Index dim);
void write_fit_report_csv(const FitReport& report, std::ostream& os);
std::vector<FitRecord> read_fit_report_csv(std::istream& is);

// Writes through a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& file,
                       const std::function<void(std::ostream&)>& writer, bool binary = false);

}  // namespace cptrrt
