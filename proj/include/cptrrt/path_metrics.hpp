#pragma once

#include "cptrrt/types.hpp"

#include <span>

namespace cptrrt {

inline constexpr double kDefaultEndpointTol = 0.5;

// Twice the signed area of the closed polygon, accumulated relative to its first
// vertex so the result does not lose digits far from the origin.
template <typename Scalar>
Scalar shoelace2(std::span<const Vec2<Scalar>> loop) {
  const auto n = loop.size();
  if (n < 3) return Scalar(0);
  const Vec2<Scalar> o = loop[0];
  Scalar acc(0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const Vec2<Scalar> p = loop[i] - o;
    const Vec2<Scalar> q = loop[i + 1] - o;
    acc += p.x() * q.y() - q.x() * p.y();
  }
  return acc;
}

double arc_length(const Path& path);

// Absolute area of the loop formed by `a` followed by `b` reversed. Endpoints
// must agree within `endpoint_tol`; the gaps are closed by straight segments.
// Self-intersecting loops report net area (lobes of opposite orientation cancel).
double area_between(const Path& a, const Path& b, double endpoint_tol = kDefaultEndpointTol);

}  // namespace cptrrt
