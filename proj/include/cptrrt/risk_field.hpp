#pragma once

#include "cptrrt/cost_field.hpp"
#include "cptrrt/risk_models.hpp"

#include <functional>
#include <iosfwd>

namespace cptrrt {

using RiskGrid = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Perceived risk sampled on a resolution x resolution lattice spanning the closed
// 2D box (row = increasing y, column = increasing x). Queries between samples are
// bilinear.
class RiskField {
 public:
  RiskField(ConfigSpace space, int resolution, RiskModel model, RiskGrid grid);

  // Samples fn at every lattice point; handy for synthetic fields.
  static RiskField from_function(const ConfigSpace& space, int resolution, RiskModel model,
                                 const std::function<double(const Point&)>& fn);

  const ConfigSpace& space() const { return space_; }
  int resolution() const { return resolution_; }
  const RiskModel& model() const { return model_; }
  const RiskGrid& grid() const { return grid_; }
  Point spacing() const { return step_; }

  Point sample_point(int ix, int iy) const;

  // Throws std::out_of_range outside the space.
  double at(const Point& x) const;
  double operator()(const Point& x) const { return at(x); }

 private:
  ConfigSpace space_;
  int resolution_;
  RiskModel model_;
  RiskGrid grid_;
  Point lower_;
  Point step_;
};

// Runs the discretize + perceive pipeline at every lattice point.
// `threads` > 1 splits rows across workers; the result does not depend on it.
RiskField build_risk_field(const CostField& field, const RiskModel& model, int bins,
                           int resolution, unsigned threads = 1);

void write_risk_csv(const RiskField& risk, std::ostream& os);
RiskField read_risk_csv(std::istream& is);

// Binary PGM (P5) preview, min-max normalized, top row = largest y.
void write_risk_pgm(const RiskField& risk, std::ostream& os);

}  // namespace cptrrt
