#include "cptrrt/risk_field.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace cptrrt {

namespace {

// Queries may sit a hair outside the box after steering arithmetic.
constexpr double kBoundsTol = 1e-9;

}  // namespace

RiskField::RiskField(ConfigSpace space, int resolution, RiskModel model, RiskGrid grid)
    : space_(std::move(space)),
      resolution_(resolution),
      model_(std::move(model)),
      grid_(std::move(grid)) {
  space_.validate();
  if (space_.dim() != 2) throw std::invalid_argument("risk field: only 2D spaces are supported");
  if (resolution_ < 2) throw std::invalid_argument("risk field: resolution must be at least 2");
  if (grid_.rows() != resolution_ || grid_.cols() != resolution_)
    throw std::invalid_argument("risk field: grid shape does not match resolution");
  if (!grid_.allFinite() || (grid_.array() < 0.0).any())
    throw std::invalid_argument("risk field: values must be finite and nonnegative");
  lower_ = Point(space_.lower[0], space_.lower[1]);
  step_ = Point(space_.upper[0] - space_.lower[0], space_.upper[1] - space_.lower[1]) /
          static_cast<double>(resolution_ - 1);
}

RiskField RiskField::from_function(const ConfigSpace& space, int resolution, RiskModel model,
                                   const std::function<double(const Point&)>& fn) {
  if (resolution < 2) throw std::invalid_argument("risk field: resolution must be at least 2");
  RiskGrid grid(resolution, resolution);
  const Point lo(space.lower[0], space.lower[1]);
  const Point step = Point(space.upper[0] - lo[0], space.upper[1] - lo[1]) / (resolution - 1.0);
  for (int iy = 0; iy < resolution; ++iy) {
    for (int ix = 0; ix < resolution; ++ix) {
      const double x = ix == resolution - 1 ? space.upper[0] : lo[0] + ix * step[0];
      const double y = iy == resolution - 1 ? space.upper[1] : lo[1] + iy * step[1];
      grid(iy, ix) = fn(Point(x, y));
    }
  }
  return RiskField(space, resolution, std::move(model), std::move(grid));
}

Point RiskField::sample_point(int ix, int iy) const {
  const int last = resolution_ - 1;
  return Point(ix == last ? space_.upper[0] : lower_[0] + ix * step_[0],
               iy == last ? space_.upper[1] : lower_[1] + iy * step_[1]);
}

double RiskField::at(const Point& x) const {
  if (!space_.contains(x, kBoundsTol))
    throw std::out_of_range("risk field: query outside the configuration space");
  const int last = resolution_ - 2;
  const double ux = std::clamp((x[0] - lower_[0]) / step_[0], 0.0, resolution_ - 1.0);
  const double uy = std::clamp((x[1] - lower_[1]) / step_[1], 0.0, resolution_ - 1.0);
  const int ix = std::min(static_cast<int>(ux), last);
  const int iy = std::min(static_cast<int>(uy), last);
  const double tx = ux - ix;
  const double ty = uy - iy;
  const double r0 = grid_(iy, ix) + tx * (grid_(iy, ix + 1) - grid_(iy, ix));
  const double r1 = grid_(iy + 1, ix) + tx * (grid_(iy + 1, ix + 1) - grid_(iy + 1, ix));
  return r0 + ty * (r1 - r0);
}

RiskField build_risk_field(const CostField& field, const RiskModel& model, int bins,
                           int resolution, unsigned threads) {
  field.validate();
  validate_model(model);
  if (field.space.dim() != 2) throw std::invalid_argument("risk field: only 2D spaces are supported");
  if (resolution < 2) throw std::invalid_argument("risk field: resolution must be at least 2");
  const VectorXd quantiles = half_normal_bin_quantiles(bins);

  const double x0 = field.space.lower[0];
  const double y0 = field.space.lower[1];
  const double hx = (field.space.upper[0] - x0) / (resolution - 1.0);
  const double hy = (field.space.upper[1] - y0) / (resolution - 1.0);

  RiskGrid grid(resolution, resolution);
  auto fill_rows = [&](int row_begin, int row_end) {
    VectorXd x(2);
    for (int iy = row_begin; iy < row_end; ++iy) {
      for (int ix = 0; ix < resolution; ++ix) {
        // Pin the last sample to the exact upper bound.
        x[0] = ix == resolution - 1 ? field.space.upper[0] : x0 + ix * hx;
        x[1] = iy == resolution - 1 ? field.space.upper[1] : y0 + iy * hy;
        const Moments m = eval_moments(field, x);
        grid(iy, ix) = perceived_risk(discretize_prospect(m.mu, m.sigma, quantiles), model);
      }
    }
  };

  const unsigned workers = std::clamp(threads, 1u, static_cast<unsigned>(resolution));
  if (workers == 1) {
    fill_rows(0, resolution);
  } else {
    std::vector<std::jthread> pool;
    const int chunk = (resolution + static_cast<int>(workers) - 1) / static_cast<int>(workers);
    for (int begin = 0; begin < resolution; begin += chunk)
      pool.emplace_back(fill_rows, begin, std::min(resolution, begin + chunk));
  }
  return RiskField(field.space, resolution, model, std::move(grid));
}

void write_risk_csv(const RiskField& risk, std::ostream& os) {
  os << "# model=" << model_tag(risk.model()) << " resolution=" << risk.resolution()
     << " space=" << risk.space().describe() << '\n';
  const auto& g = risk.grid();
  for (Eigen::Index r = 0; r < g.rows(); ++r) {
    for (Eigen::Index c = 0; c < g.cols(); ++c) {
      if (c) os << ',';
      os << format_double(g(r, c));
    }
    os << '\n';
  }
}

namespace {

std::string header_value(const std::string& header, const std::string& key) {
  const std::string needle = key + "=";
  const auto pos = header.find(needle);
  if (pos == std::string::npos) throw std::runtime_error("risk csv: header lacks " + key);
  const auto start = pos + needle.size();
  const auto end = header.find(' ', start);
  return header.substr(start, end == std::string::npos ? std::string::npos : end - start);
}

ConfigSpace parse_space(const std::string& s) {
  // [lo,hi]x[lo,hi]...
  std::vector<double> lo, hi;
  std::size_t pos = 0;
  while (pos < s.size()) {
    if (s[pos] == 'x') ++pos;
    if (pos >= s.size() || s[pos] != '[') throw std::runtime_error("risk csv: malformed space " + s);
    const auto close = s.find(']', pos);
    if (close == std::string::npos) throw std::runtime_error("risk csv: malformed space " + s);
    const std::string body = s.substr(pos + 1, close - pos - 1);
    const auto comma = body.find(',');
    if (comma == std::string::npos) throw std::runtime_error("risk csv: malformed space " + s);
    lo.push_back(std::stod(body.substr(0, comma)));
    hi.push_back(std::stod(body.substr(comma + 1)));
    pos = close + 1;
  }
  return ConfigSpace(Eigen::Map<VectorXd>(lo.data(), static_cast<Eigen::Index>(lo.size())),
                     Eigen::Map<VectorXd>(hi.data(), static_cast<Eigen::Index>(hi.size())));
}

}  // namespace

RiskField read_risk_csv(std::istream& is) {
  std::string header;
  if (!std::getline(is, header) || header.rfind("# ", 0) != 0)
    throw std::runtime_error("risk csv: missing header line");
  const RiskModel model = parse_model_tag(header_value(header, "model"));
  const int n = std::stoi(header_value(header, "resolution"));
  const ConfigSpace space = parse_space(header_value(header, "space"));
  if (n < 2) throw std::runtime_error("risk csv: resolution must be at least 2");

  RiskGrid grid(n, n);
  std::string line;
  for (int r = 0; r < n; ++r) {
    if (!std::getline(is, line))
      throw std::runtime_error("risk csv: expected " + std::to_string(n) + " rows, got " +
                               std::to_string(r));
    std::stringstream ss(line);
    std::string cell;
    int c = 0;
    while (std::getline(ss, cell, ',')) {
      if (c >= n) throw std::runtime_error("risk csv: too many columns on row " + std::to_string(r + 2));
      grid(r, c++) = std::stod(cell);
    }
    if (c != n) throw std::runtime_error("risk csv: too few columns on row " + std::to_string(r + 2));
  }
  return RiskField(space, n, model, std::move(grid));
}

void write_risk_pgm(const RiskField& risk, std::ostream& os) {
  const auto& g = risk.grid();
  const double lo = g.minCoeff();
  const double hi = g.maxCoeff();
  const double span = hi > lo ? hi - lo : 1.0;
  os << "P5\n" << g.cols() << ' ' << g.rows() << "\n255\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(g.cols()));
  for (Eigen::Index r = g.rows() - 1; r >= 0; --r) {
    for (Eigen::Index c = 0; c < g.cols(); ++c)
      row[static_cast<std::size_t>(c)] =
          static_cast<unsigned char>(std::lround(255.0 * (g(r, c) - lo) / span));
    os.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
}

}  // namespace cptrrt
