#include "cptrrt/path_metrics.hpp"

#include "support.hpp"

#include <doctest.h>

#include <vector>

using namespace cptrrt;
using testsupport::uniform;

namespace {

Path make(std::initializer_list<Point> pts) { return Path{std::vector<Point>(pts)}; }

// Random polyline from `a` to `b` with `n` interior points.
Path wander(Engine& eng, const Point& a, const Point& b, int n) {
  Path p;
  p.waypoints.push_back(a);
  for (int i = 0; i < n; ++i) p.waypoints.emplace_back(uniform(eng, -10, 10), uniform(eng, -10, 10));
  p.waypoints.push_back(b);
  return p;
}

// Triangle-fan oracle, written without the library's origin shift.
double loop_area(const std::vector<Point>& loop) {
  double s = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const Point& p = loop[i];
    const Point& q = loop[(i + 1) % loop.size()];
    s += p.x() * q.y() - q.x() * p.y();
  }
  return std::abs(0.5 * s);
}

}  // namespace

TEST_CASE("arc length examples") {
  CHECK(arc_length(make({{0, 0}, {3, 4}})) == 5.0);
  CHECK(arc_length(make({{1, 1}})) == 0.0);
  CHECK(arc_length(make({{0, 0}, {1, 0}, {1, 1}})) == 2.0);
}

TEST_CASE("area examples") {
  const Path a = make({{0, 0}, {1, 0}});
  const Path b = make({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  CHECK(area_between(a, b) == 1.0);
  CHECK(area_between(make({{0, 0}, {2, 0}}), make({{0, 0}, {1, 1}, {2, 0}})) == 1.0);
  CHECK(area_between(b, b) == 0.0);
}

TEST_CASE("shoelace template works in long double") {
  const std::vector<Vec2<long double>> sq{{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  CHECK(shoelace2<long double>(sq) == 8.0L);
}

TEST_CASE("area rejects far endpoints and degenerate paths") {
  const Path a = make({{0, 0}, {5, 0}});
  CHECK_NOTHROW(area_between(a, make({{0.3, 0.3}, {2, 3}, {5, 0.2}})));
  CHECK_THROWS_AS(area_between(a, make({{0, 0}, {2, 3}, {5, 1}})), std::invalid_argument);
  CHECK_THROWS_AS(area_between(a, make({{0, 0}})), std::invalid_argument);
}

TEST_CASE("area closes small endpoint gaps with straight segments") {
  const Path a = make({{0, 0}, {4, 0}});
  const Path b = make({{0, 0.2}, {4, 0.2}});
  CHECK(area_between(a, b) == doctest::Approx(0.8).epsilon(1e-14));
}

TEST_CASE("area matches an independent shoelace on random pairs") {
  Engine eng(21);
  for (int i = 0; i < 1000; ++i) {
    const Point s(uniform(eng, -10, 10), uniform(eng, -10, 10));
    const Point g(uniform(eng, -10, 10), uniform(eng, -10, 10));
    const Path a = wander(eng, s, g, static_cast<int>(eng() % 8));
    const Path b = wander(eng, s, g, static_cast<int>(eng() % 8));
    std::vector<Point> loop = a.waypoints;
    loop.insert(loop.end(), b.waypoints.rbegin(), b.waypoints.rend());
    const double ab = area_between(a, b);
    REQUIRE(ab >= 0.0);
    REQUIRE(std::abs(ab - loop_area(loop)) <= 1e-9);
  }
}

TEST_CASE("area is symmetric and translation invariant") {
  Engine eng(22);
  for (int i = 0; i < 1000; ++i) {
    const Point s(uniform(eng, -10, 10), uniform(eng, -10, 10));
    const Point g(uniform(eng, -10, 10), uniform(eng, -10, 10));
    const Path a = wander(eng, s, g, static_cast<int>(eng() % 10));
    const Path b = wander(eng, s, g, static_cast<int>(eng() % 10));
    const double ab = area_between(a, b);
    REQUIRE(ab == area_between(b, a));
    const Point shift(uniform(eng, -100, 100), uniform(eng, -100, 100));
    Path as = a, bs = b;
    for (auto& p : as.waypoints) p += shift;
    for (auto& p : bs.waypoints) p += shift;
    REQUIRE(std::abs(area_between(as, bs) - ab) <= 1e-9);
    REQUIRE(area_between(a, a) == 0.0);
  }
}
