#pragma once

#include "latpart/lattice.hpp"

namespace latpart {

struct FitResult {
    LatticeField theta;       // fitted piecewise-constant signal
    RectPartition partition;  // leaves realizing the optimum
    double objective = 0;     // 0.5 * SSE + lambda * leaf count
    std::int64_t leaf_count = 0;
    double lambda = 0;
};

/// Penalized least-squares fit over recursive dyadic partitions,
/// minimizing 0.5 * ||y - theta||^2 + lambda * |partition|.
/// Requires side a power of 2 and lambda > 0.  Ties are broken toward the
/// leaf, then toward the smallest split axis.
FitResult dcart_fit(const LatticeField& y, double lambda);

/// Same dynamic program restricted to partitions whose every leaf has
/// volume >= eta.
FitResult constrained_dcart_fit(const LatticeField& y, double lambda1, double eta);

/// Minimal number of dyadic leaves on which theta is piecewise constant.
std::int64_t k_dyad(const LatticeField& theta);

/// Un-memoized recursive minimization over all recursive dyadic partitions
/// with direct per-rectangle summation.  Test oracle; refuses N > 256.
FitResult exhaustive_dyadic_oracle(const LatticeField& y, double lambda, double eta = 1);

/// Exact minimization over all rectangular tilings (d = 2, n <= 4 only).
FitResult exhaustive_rect_oracle(const LatticeField& y, double lambda);

/// Materialize every recursive dyadic partition of a tiny lattice
/// (N <= 16).  `visited`, if given, counts the partitions formed in each
/// recursive call on a non-singleton rectangle, duplicates included.
std::vector<std::vector<Rect>> enumerate_dyadic_partitions(const LatticeShape& shape,
                                                           std::int64_t* visited = nullptr);

}  // namespace latpart
