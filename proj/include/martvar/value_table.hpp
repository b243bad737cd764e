#pragma once

#include <vector>

#include "martvar/common.hpp"

namespace martvar {

/// Piecewise-linear function sampled at strictly increasing abscissae.
struct ValueTable {
  std::vector<double> xs;
  std::vector<double> values;

  ValueTable() = default;
  ValueTable(std::vector<double> xs_, std::vector<double> values_);

  /// Linear interpolation; x is clamped to [xs.front(), xs.back()].
  double at(double x) const;
};

/// Upper concave envelope of the sampled points, returned on the same
/// abscissae. Computed via the upper convex hull with collinear interior
/// vertices dropped. Throws std::domain_error on fewer than 2 points.
ValueTable concave_envelope(const std::vector<double>& xs, const std::vector<double>& ys);

/// Upper convex hull vertex indices of (xs[i], ys[i]) with xs strictly
/// increasing; strict turns only, so each returned segment is maximal.
std::vector<std::size_t> upper_hull_indices(const std::vector<double>& xs,
                                            const std::vector<double>& ys);

}  // namespace martvar
