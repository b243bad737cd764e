#include "martvar/value_table.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace martvar {

ValueTable::ValueTable(std::vector<double> xs_, std::vector<double> values_)
    : xs(std::move(xs_)), values(std::move(values_)) {
  if (xs.empty()) throw std::domain_error("ValueTable: empty grid");
  if (xs.size() != values.size())
    throw std::domain_error("ValueTable: grid/value length mismatch");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(values[i]))
      throw std::domain_error("ValueTable: non-finite entry");
    if (i > 0 && !(xs[i] > xs[i - 1]))
      throw std::domain_error("ValueTable: grid not strictly increasing");
  }
}

double ValueTable::at(double x) const {
  if (xs.size() == 1) return values.front();
  if (x <= xs.front()) return values.front();
  if (x >= xs.back()) return values.back();
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t hi = static_cast<std::size_t>(it - xs.begin());
  std::size_t lo = hi - 1;
  double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return values[lo] + t * (values[hi] - values[lo]);
}

std::vector<std::size_t> upper_hull_indices(const std::vector<double>& xs,
                                            const std::vector<double>& ys) {
  std::size_t n = xs.size();
  std::vector<std::size_t> hull;
  hull.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    // pop b while it lies on or below the chord from a to i
    while (hull.size() >= 2) {
      std::size_t a = hull[hull.size() - 2];
      std::size_t b = hull.back();
      double cross =
          (xs[b] - xs[a]) * (ys[i] - ys[a]) - (ys[b] - ys[a]) * (xs[i] - xs[a]);
      if (cross >= 0.0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(i);
  }
  return hull;
}

ValueTable concave_envelope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() < 2) throw std::domain_error("concave_envelope: need at least 2 points");
  if (xs.size() != ys.size())
    throw std::domain_error("concave_envelope: length mismatch");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1]))
      throw std::domain_error("concave_envelope: abscissae not strictly increasing");

  std::vector<std::size_t> hull = upper_hull_indices(xs, ys);
  std::vector<double> env(xs.size());
  std::size_t seg = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    while (seg + 1 < hull.size() && xs[hull[seg + 1]] <= xs[i]) ++seg;
    std::size_t a = hull[seg];
    if (a == i || seg + 1 == hull.size()) {
      env[i] = ys[a];
      continue;
    }
    std::size_t b = hull[seg + 1];
    double t = (xs[i] - xs[a]) / (xs[b] - xs[a]);
    env[i] = ys[a] + t * (ys[b] - ys[a]);
  }
  return ValueTable(xs, std::move(env));
}

}  // namespace martvar
