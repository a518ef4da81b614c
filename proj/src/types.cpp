#include "cptrrt/types.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cptrrt {

ConfigSpace::ConfigSpace(VectorXd lo, VectorXd hi) : lower(std::move(lo)), upper(std::move(hi)) {
  validate();
}

ConfigSpace ConfigSpace::square(double lo, double hi, int dim) {
  return ConfigSpace(VectorXd::Constant(dim, lo), VectorXd::Constant(dim, hi));
}

void ConfigSpace::validate() const {
  if (lower.size() != upper.size())
    throw std::invalid_argument("config space: lower and upper have different dimension");
  if (lower.size() < 2) throw std::invalid_argument("config space: dimension must be at least 2");
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) || !(lower[i] < upper[i]))
      throw std::invalid_argument("config space: axis " + std::to_string(i) +
                                  " requires finite lower < upper");
  }
}

bool ConfigSpace::contains(const Eigen::Ref<const VectorXd>& x, double tol) const {
  if (x.size() != lower.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lower[i] - tol && x[i] <= upper[i] + tol)) return false;
  }
  return true;
}

std::string ConfigSpace::describe() const {
  std::ostringstream os;
  os.precision(17);
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (i) os << 'x';
    os << '[' << lower[i] << ',' << upper[i] << ']';
  }
  return os.str();
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace cptrrt
