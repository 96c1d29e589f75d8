#include "lanekit/metrics.hpp"

#include <algorithm>
#include <limits>

#include "lanekit/errors.hpp"

namespace lanekit {

double chamfer(const std::vector<Vec2>& p, const std::vector<Vec2>& q) {
  if (p.empty() || q.empty()) throw EmptyInput("chamfer of empty point set");
  auto directed = [](const std::vector<Vec2>& from, const std::vector<Vec2>& to) {
    double sum = 0.0;
    for (const Vec2& a : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const Vec2& b : to) best = std::min(best, distance(a, b));
      sum += best;
    }
    return sum / static_cast<double>(from.size());
  };
  return 0.5 * (directed(p, q) + directed(q, p));
}

double frechet(const std::vector<Vec2>& p, const std::vector<Vec2>& q) {
  if (p.empty() || q.empty()) throw EmptyInput("frechet of empty polyline");
  const std::size_t n = p.size();
  const std::size_t m = q.size();
  std::vector<double> table(n * m, 0.0);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return table[i * m + j]; };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double d = distance(p[i], q[j]);
      if (i == 0 && j == 0) {
        at(i, j) = d;
      } else if (i == 0) {
        at(i, j) = std::max(at(0, j - 1), d);
      } else if (j == 0) {
        at(i, j) = std::max(at(i - 1, 0), d);
      } else {
        at(i, j) = std::max(
            std::min({at(i - 1, j), at(i, j - 1), at(i - 1, j - 1)}), d);
      }
    }
  }
  return at(n - 1, m - 1);
}

}  // namespace lanekit
