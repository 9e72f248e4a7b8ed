#include "latpart/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace latpart {

RegionPartition induced_partition(const LatticeField& theta) {
    const LatticeShape& shape = theta.shape;
    UnionFind uf(shape.cell_count);
    // Face adjacency: for each axis, join equal-valued neighbors.
    std::vector<std::int64_t> stride(static_cast<std::size_t>(shape.dim), 1);
    for (int i = shape.dim - 2; i >= 0; --i)
        stride[static_cast<std::size_t>(i)] = stride[static_cast<std::size_t>(i + 1)] * shape.side;
    for (CellIndex idx = 0; idx < shape.cell_count; ++idx) {
        for (int axis = 0; axis < shape.dim; ++axis) {
            const std::int64_t pos = (idx / stride[static_cast<std::size_t>(axis)]) % shape.side;
            if (pos + 1 >= shape.side) continue;
            const CellIndex nb = idx + stride[static_cast<std::size_t>(axis)];
            if (theta[idx] == theta[nb]) uf.unite(idx, nb);
        }
    }
    RegionPartition out{shape, {}};
    std::vector<std::int64_t> region_of_root(static_cast<std::size_t>(shape.cell_count), -1);
    for (CellIndex idx = 0; idx < shape.cell_count; ++idx) {
        const std::int64_t root = uf.find(idx);
        std::int64_t& slot = region_of_root[static_cast<std::size_t>(root)];
        if (slot < 0) {
            slot = static_cast<std::int64_t>(out.regions.size());
            out.regions.emplace_back();
        }
        out.regions[static_cast<std::size_t>(slot)].push_back(idx);
    }
    return out;
}

double dist1(const RegionPartition& estimated, const RegionPartition& truth) {
    if (estimated.shape != truth.shape) throw param_error("dist1: shape mismatch");
    std::int64_t worst = 0;
    for (const CellSet& a : truth.regions) {
        std::int64_t best = std::numeric_limits<std::int64_t>::max();
        for (const CellSet& b : estimated.regions) {
            CellSet common;
            std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                                  std::back_inserter(common));
            const auto sym = static_cast<std::int64_t>(a.size() + b.size() - 2 * common.size());
            best = std::min(best, sym);
        }
        worst = std::max(worst, best);
    }
    return static_cast<double>(worst);
}

std::int64_t dist2(const RegionPartition& estimated, const RegionPartition& truth) {
    return std::llabs(static_cast<long long>(estimated.regions.size()) -
                      static_cast<long long>(truth.regions.size()));
}

ModelParams model_params(const LatticeField& theta, const RectPartition& associated) {
    for (const Rect& r : associated.rects) {
        const CellSet cells = r.cells(theta.shape);
        for (CellIndex c : cells)
            if (theta[c] != theta[cells.front()])
                throw param_error("model_params: theta is not constant on an associated rect");
    }

    const RegionPartition induced = induced_partition(theta);
    ModelParams out;
    out.region_count = static_cast<std::int64_t>(induced.regions.size());

    std::vector<double> values;
    values.reserve(induced.regions.size());
    for (const CellSet& region : induced.regions) values.push_back(theta[region.front()]);
    // Only values matter for kappa: minimum gap among distinct region values.
    double kappa = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < values.size(); ++i)
        for (std::size_t j = i + 1; j < values.size(); ++j)
            if (values[i] != values[j])
                kappa = std::min(kappa, std::abs(values[i] - values[j]));
    out.kappa = kappa;

    std::int64_t delta = theta.shape.cell_count;
    for (const Rect& r : associated.rects) delta = std::min(delta, r.volume());
    out.delta = delta;
    return out;
}

}  // namespace latpart
