#pragma once

#include "martvar/splitting_tree.hpp"
#include "martvar/value_table.hpp"

namespace martvar {

/// Maximal total variation of a k-stage splitting martingale on two atoms,
/// computed by dynamic programming on a uniform prior grid over [0, 1].
/// One stage replaces v with the upper concave envelope of
///   q -> 2|q - p| + v(q)
/// evaluated at p (2|q - p| is the L1 distance between the binary
/// distributions (q, 1-q) and (p, 1-p)).  Supported grid steps h:
/// 1e-2, 1e-3 and 5e-4; anything else raises ConfigError.
ValueTable maxvar_binary(int k, double h);

/// maxvar_binary(k, h) evaluated at p = 1/2, divided by sqrt(k).
double maxvar_ratio(int k, double h);

struct MaxvarWitness {
  SplittingTree tree;
  double grid_prior;   ///< first coordinate of the root distribution
  bool prior_snapped;  ///< requested prior was moved onto the grid
  double table_value;  ///< DP value at grid_prior; variation(tree) matches it
};

/// Extracts an optimal splitting tree from the DP.  At each node the
/// posterior support consists of the (at most two) hull vertices whose
/// chord carries the stage envelope at the node's prior, so the tree
/// attains the table value exactly (up to roundoff).
MaxvarWitness witness_tree(int k, double p, double h);

}  // namespace martvar
