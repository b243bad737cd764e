#pragma once

#include "martvar/splitting_tree.hpp"

namespace martvar {

/// Martingale that starts uniform on 2^ell labels and runs ell stages; at
/// each stage one half of the current support is zeroed and the other half's
/// mass doubled, each outcome with weight 1/2. Every edge moves L1 mass
/// exactly 1, so the variation is exactly ell while the entropy-based bound
/// is sqrt(2 ell^2 ln 2). Leaves are point masses.
SplittingTree doubling_martingale(int ell);

/// Depth-k martingale on two labels. The first-coordinate probability starts
/// at p0 and steps +-delta' with weight 1/2 each, where
/// delta' = min(delta, p, 1-p) clamps the step at the simplex boundary;
/// absorbed paths (p in {0,1}) continue with trivial splittings. Stored as a
/// recombining DAG; states are snapped to a 1e-12 lattice so equal values
/// reached along different paths share one node.
SplittingTree binary_walk(int k, double p0, double delta);

/// Depth-k martingale on at most d labels witnessing variation growth of
/// order sqrt(k ln d): the sequential concat of ell = floor(log2 d) copies of
/// binary_walk(floor(k1/ell), 1/2, 1/sqrt(k1/ell)) where k1 is the largest
/// multiple of ell with k/2 < k1 <= k, padded to depth k. When k < 2 ell the
/// doubling martingale (padded) is the stronger witness and is used instead.
/// Requires 2 <= d <= 2^k.
SplittingTree variation_witness(int k, std::size_t d);

}  // namespace martvar
