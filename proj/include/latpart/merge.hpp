#pragma once

#include <cstdint>

#include "latpart/estimators.hpp"
#include "latpart/lattice.hpp"

namespace latpart {

enum class SmallSetPolicy { random, nearest };

struct MergeConfig {
    double lambda2 = 1;  // merge penalty
    double eta = 1;      // distance threshold / minimum-size parameter
    double gamma = 1;    // naive variant's distance threshold
    SmallSetPolicy policy = SmallSetPolicy::random;
    std::uint64_t seed = 0;
};

struct PairRecord {
    std::int64_t i = 0;
    std::int64_t j = 0;
    double distance = 0;
    double gain = 0;
    bool merged = false;
};

struct MergeTrace {
    std::vector<PairRecord> pairs_tested;
    UndirectedGraph graph;
    std::vector<std::int64_t> small_rects;  // indices assigned post hoc
    bool all_small = false;                 // every first-step rect was small
    bool gamma_warning = false;             // gamma < eta was requested
};

struct MergeOutcome {
    RegionPartition partition;
    MergeTrace trace;
    FitResult step1;
};

/// True iff pooling the two rectangles raises the SSE by less than
/// 2 * lambda2, i.e. the pooled residual criterion favors merging.
bool merge_decision(const LatticeField& y, const Rect& ri, const Rect& rj, double lambda2);

/// Constrained DCART followed by distance-and-gain-gated merging.
MergeOutcome two_step_estimate(const LatticeField& y, double lambda1, double lambda2,
                               double eta);

/// Plain DCART followed by merging over the large rectangles only; small
/// rectangles are appended per the configured policy.
MergeOutcome naive_two_step_estimate(const LatticeField& y, double lambda1,
                                     const MergeConfig& config);

}  // namespace latpart
