#pragma once

#include <vector>

#include "martvar/certificate.hpp"
#include "martvar/simplex.hpp"

namespace martvar {

/// Payoff matrix of a zero-sum game; rows index the maximizer's actions.
using Matrix = std::vector<std::vector<double>>;

/// Largest absolute payoff entry.
double matrix_norm(const Matrix& g);

struct GameValueResult {
  double value = 0.0;
  std::vector<double> p1_strategy;  ///< optimal mixed strategy, maximizer
  std::vector<double> p2_strategy;  ///< optimal mixed strategy, minimizer
  double duality_gap = 0.0;
  BoundCertificate certificate;     ///< duality gap within tolerance
};

/// Value of the matrix game, solved as two independent LPs (one per
/// player).  The reported value is the midpoint of the two optima and the
/// duality gap is their absolute difference; the attached certificate
/// asserts the gap stays within kDualityGapTolerance.  Solver hiccups are
/// retried on slightly perturbed payoffs before giving up with
/// SolverError.
GameValueResult matrix_value(const Matrix& g);

}  // namespace martvar
