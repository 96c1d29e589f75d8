#pragma once

#include <vector>

#include "lanekit/geometry.hpp"

namespace lanekit {

// Symmetric Chamfer distance between two point sets:
// 0.5 * (mean_p min_q |p-q| + mean_q min_p |q-p|).
// Throws EmptyInput when either set is empty.
double chamfer(const std::vector<Vec2>& p, const std::vector<Vec2>& q);

// Discrete Frechet distance between two point chains, dynamic programming
// over monotone couplings. Throws EmptyInput when either chain has fewer
// than one point.
double frechet(const std::vector<Vec2>& p, const std::vector<Vec2>& q);

inline double frechet(const Polyline2D& p, const Polyline2D& q) {
  return frechet(p.points, q.points);
}

}  // namespace lanekit
