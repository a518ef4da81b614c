#include "cptrrt/io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace cptrrt {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& source, const std::string& key, const std::string& what) {
  throw ScenarioError(source + ": " + key + ": " + what);
}

double number_at(const json& j, const std::string& source, const std::string& key) {
  if (!j.is_number()) fail(source, key, "expected a number");
  return j.get<double>();
}

VectorXd vector_at(const json& j, const std::string& source, const std::string& key,
                   Eigen::Index dim) {
  if (!j.is_array()) fail(source, key, "expected an array of numbers");
  if (dim >= 0 && static_cast<Eigen::Index>(j.size()) != dim)
    fail(source, key, "expected " + std::to_string(dim) + " entries, got " + std::to_string(j.size()));
  VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = number_at(j[i], source, key + "[" + std::to_string(i) + "]");
  return v;
}

// Accepts [[..],[..]] or a flat row-major list of dim*dim numbers.
MatrixXd matrix_at(const json& j, const std::string& source, const std::string& key,
                   Eigen::Index dim) {
  if (!j.is_array()) fail(source, key, "expected a matrix");
  MatrixXd m(dim, dim);
  if (!j.empty() && j[0].is_array()) {
    if (static_cast<Eigen::Index>(j.size()) != dim) fail(source, key, "expected " + std::to_string(dim) + " rows");
    for (Eigen::Index r = 0; r < dim; ++r)
      m.row(r) = vector_at(j[static_cast<std::size_t>(r)], source, key + "[" + std::to_string(r) + "]", dim).transpose();
  } else {
    const VectorXd flat = vector_at(j, source, key, dim * dim);
    for (Eigen::Index r = 0; r < dim; ++r)
      for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = flat[r * dim + c];
  }
  return m;
}

const json& require(const json& obj, const char* name, const std::string& source, const std::string& key) {
  if (!obj.is_object()) fail(source, key, "expected an object");
  const auto it = obj.find(name);
  if (it == obj.end()) fail(source, key, std::string("missing key '") + name + "'");
  return *it;
}

GaussianSource gaussian_at(const json& j, const std::string& source, const std::string& key,
                           Eigen::Index dim) {
  VectorXd mean = vector_at(require(j, "mean", source, key), source, key + ".mean", dim);
  MatrixXd cov = matrix_at(require(j, "cov", source, key), source, key + ".cov", dim);
  const double amp = number_at(require(j, "amplitude", source, key), source, key + ".amplitude");
  try {
    return GaussianSource(std::move(mean), std::move(cov), amp);
  } catch (const std::invalid_argument& e) {
    fail(source, key, e.what());
  }
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(source + ": " + e.what());
  }
  if (!doc.is_object()) fail(source, "<root>", "expected an object");

  Scenario sc;
  if (auto it = doc.find("description"); it != doc.end() && it->is_string()) sc.description = it->get<std::string>();

  const json& space = require(doc, "space", source, "<root>");
  VectorXd lo = vector_at(require(space, "lower", source, "space"), source, "space.lower", -1);
  VectorXd hi = vector_at(require(space, "upper", source, "space"), source, "space.upper", lo.size());
  try {
    sc.field.space = ConfigSpace(std::move(lo), std::move(hi));
  } catch (const std::invalid_argument& e) {
    fail(source, "space", e.what());
  }
  const Eigen::Index dim = sc.field.space.dim();

  auto list = [&](const char* name) -> const json* {
    const auto it = doc.find(name);
    if (it == doc.end()) return nullptr;
    if (!it->is_array()) fail(source, name, "expected an array");
    return &*it;
  };

  if (const json* bumps = list("bumps")) {
    for (std::size_t i = 0; i < bumps->size(); ++i) {
      const std::string key = "bumps[" + std::to_string(i) + "]";
      const json& b = (*bumps)[i];
      BumpObstacle ob;
      ob.center = vector_at(require(b, "center", source, key), source, key + ".center", dim);
      ob.inner = vector_at(require(b, "inner", source, key), source, key + ".inner", dim);
      ob.outer = vector_at(require(b, "outer", source, key), source, key + ".outer", dim);
      ob.rho_max = number_at(require(b, "rho_max", source, key), source, key + ".rho_max");
      try {
        ob.validate();
      } catch (const std::invalid_argument& e) {
        fail(source, key, e.what());
      }
      sc.field.mean_terms.emplace_back(std::move(ob));
    }
  }
  if (const json* gs = list("gaussians_mu")) {
    for (std::size_t i = 0; i < gs->size(); ++i)
      sc.field.mean_terms.emplace_back(
          gaussian_at((*gs)[i], source, "gaussians_mu[" + std::to_string(i) + "]", dim));
  }
  if (const json* gs = list("gaussians_sigma")) {
    for (std::size_t i = 0; i < gs->size(); ++i)
      sc.field.sigma_terms.push_back(
          gaussian_at((*gs)[i], source, "gaussians_sigma[" + std::to_string(i) + "]", dim));
  }

  auto point = [&](const char* name) -> std::optional<Point> {
    const auto it = doc.find(name);
    if (it == doc.end()) return std::nullopt;
    const VectorXd v = vector_at(*it, source, name, 2);
    if (!sc.field.space.contains(v)) fail(source, name, "point outside the configuration space");
    return Point(v[0], v[1]);
  };
  sc.start = point("start");
  sc.goal = point("goal");
  return sc;
}

Scenario load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ScenarioError(file.string() + ": cannot open scenario file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), file.string());
}

void write_path_csv(const Path& path, std::ostream& os, bool snapped) {
  if (snapped) os << "# last waypoint is a synthetic goal snap\n";
  os << "x,y\n";
  for (const Point& p : path.waypoints) os << format_double(p.x()) << ',' << format_double(p.y()) << '\n';
}

namespace {

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_number(const std::string& cell, int line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  while (used < cell.size() && (cell[used] == ' ' || cell[used] == '\r')) ++used;
  if (used == 0 || used != cell.size())
    throw std::runtime_error("csv line " + std::to_string(line_no) + ": malformed number '" + cell + "'");
  return v;
}

// Yields data rows, skipping comments, blanks and the header.
template <typename F>
void for_each_row(std::istream& is, const std::string& header_start, F&& fn) {
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen && line.rfind(header_start, 0) == 0) {
      header_seen = true;
      continue;
    }
    fn(split(line), line_no);
  }
}

}  // namespace

Path read_path_csv(std::istream& is) {
  Path path;
  for_each_row(is, "x", [&](const std::vector<std::string>& cells, int line_no) {
    if (cells.size() != 2) throw std::runtime_error("path csv line " + std::to_string(line_no) + ": expected 2 columns");
    const Point p(parse_number(cells[0], line_no), parse_number(cells[1], line_no));
    if (!p.allFinite()) throw std::runtime_error("path csv line " + std::to_string(line_no) + ": non-finite waypoint");
    path.waypoints.push_back(p);
  });
  if (path.empty()) throw std::runtime_error("path csv: no waypoints");
  return path;
}

Path load_path_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error(file.string() + ": cannot open path file");
  return read_path_csv(in);
}

void write_tree_csv(const Tree& tree, std::ostream& os) {
  os << "node_id,parent_id,x,y,j_cum\n";
  for (std::size_t i = 0; i < tree.size(); ++i) {
    os << i << ',' << tree.parent[i] << ',' << format_double(tree.nodes[i].x()) << ','
       << format_double(tree.nodes[i].y()) << ',' << format_double(tree.j_cum[i]) << '\n';
  }
}

Tree read_tree_csv(std::istream& is) {
  Tree tree;
  std::vector<std::ptrdiff_t> parents;
  for_each_row(is, "node_id", [&](const std::vector<std::string>& cells, int line_no) {
    if (cells.size() != 5) throw std::runtime_error("tree csv line " + std::to_string(line_no) + ": expected 5 columns");
    const auto id = static_cast<std::size_t>(parse_number(cells[0], line_no));
    if (id != tree.nodes.size()) throw std::runtime_error("tree csv line " + std::to_string(line_no) + ": node ids must be sequential");
    parents.push_back(static_cast<std::ptrdiff_t>(parse_number(cells[1], line_no)));
    tree.nodes.emplace_back(parse_number(cells[2], line_no), parse_number(cells[3], line_no));
    tree.j_cum.push_back(parse_number(cells[4], line_no));
  });
  tree.parent = parents;
  tree.children.assign(tree.size(), {});
  tree.edge_cost.assign(tree.size(), 0.0);
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const auto p = parents[i];
    if (p == Tree::kNoParent) continue;
    if (p < 0 || static_cast<std::size_t>(p) >= tree.size())
      throw std::runtime_error("tree csv: parent id out of range for node " + std::to_string(i));
    tree.children[static_cast<std::size_t>(p)].push_back(i);
    tree.edge_cost[i] = tree.j_cum[i] - tree.j_cum[static_cast<std::size_t>(p)];
  }
  // Children are listed in ascending id order, which may differ from insertion order after rewiring.
  return tree;
}

std::vector<std::string> param_names(Eigen::Index dim) {
  if (dim == 4) return {"alpha", "beta", "gamma", "lambda"};
  if (dim == 1) return {"q"};
  std::vector<std::string> names;
  for (Eigen::Index i = 0; i < dim; ++i) names.push_back("theta" + std::to_string(i));
  return names;
}

void write_fit_report_csv(const FitReport& report, std::ostream& os) {
  const Eigen::Index dim = report.records.empty() ? 0 : report.records.front().theta.size();
  os << "k";
  for (const auto& n : param_names(dim)) os << ',' << n;
  os << ",a_k,c_k,loss\n";
  for (const FitRecord& r : report.records) {
    os << r.k;
    for (Eigen::Index i = 0; i < r.theta.size(); ++i) os << ',' << format_double(r.theta[i]);
    os << ',' << format_double(r.a_k) << ',' << format_double(r.c_k) << ',' << format_double(r.loss) << '\n';
  }
}

std::vector<FitRecord> read_fit_report_csv(std::istream& is) {
  std::vector<FitRecord> records;
  for_each_row(is, "k,", [&](const std::vector<std::string>& cells, int line_no) {
    if (cells.size() < 5) throw std::runtime_error("fit csv line " + std::to_string(line_no) + ": too few columns");
    FitRecord r;
    r.k = static_cast<int>(parse_number(cells[0], line_no));
    const auto dim = static_cast<Eigen::Index>(cells.size() - 4);
    r.theta.resize(dim);
    for (Eigen::Index i = 0; i < dim; ++i) r.theta[i] = parse_number(cells[static_cast<std::size_t>(1 + i)], line_no);
    r.a_k = parse_number(cells[cells.size() - 3], line_no);
    r.c_k = parse_number(cells[cells.size() - 2], line_no);
    r.loss = parse_number(cells[cells.size() - 1], line_no);
    records.push_back(std::move(r));
  });
  return records;
}

void write_file_atomic(const std::filesystem::path& file,
                       const std::function<void(std::ostream&)>& writer, bool binary) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::filesystem::path tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, binary ? std::ios::binary : std::ios::out);
    if (!out) throw std::runtime_error(tmp.string() + ": cannot open for writing");
    try {
      writer(out);
    } catch (...) {
      out.close();
      std::filesystem::remove(tmp);
      throw;
    }
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw std::runtime_error(tmp.string() + ": write failed");
    }
  }
  std::filesystem::rename(tmp, file);
}

}  // namespace cptrrt
