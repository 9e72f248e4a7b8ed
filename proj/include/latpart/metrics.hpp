#pragma once

#include "latpart/lattice.hpp"

namespace latpart {

struct ModelParams {
    double kappa = 0;            // minimum jump size; +inf for constant fields
    std::int64_t delta = 1;      // minimal rectangle volume of the associated partition
    std::int64_t region_count = 1;
};

/// Maximal face-connected constant regions of a field, ordered by smallest
/// member cell.
RegionPartition induced_partition(const LatticeField& theta);

/// Localization error: max over truth regions of the min symmetric
/// difference with any estimated region.
double dist1(const RegionPartition& estimated, const RegionPartition& truth);

/// Absolute difference of region counts.
std::int64_t dist2(const RegionPartition& estimated, const RegionPartition& truth);

ModelParams model_params(const LatticeField& theta, const RectPartition& associated);

}  // namespace latpart
