#include "latpart/merge.hpp"

#include <algorithm>
#include <cmath>

#include "latpart/rng.hpp"

namespace latpart {

namespace {

CellSet union_of_rects(const LatticeShape& shape, const std::vector<Rect>& rects,
                       const std::vector<std::int64_t>& indices) {
    CellSet out;
    for (std::int64_t idx : indices) {
        const CellSet cells = rects[static_cast<std::size_t>(idx)].cells(shape);
        out.insert(out.end(), cells.begin(), cells.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

bool merge_decision(const LatticeField& y, const Rect& ri, const Rect& rj, double lambda2) {
    if (ri.intersects(rj)) throw param_error("merge_decision: rectangles must be disjoint");
    if (!(lambda2 > 0)) throw param_error("lambda2 must be > 0");
    // Direct pooled-residual route; the closed-form gain route lives in
    // merge_gain and must agree with this one.
    const CellSet ci = ri.cells(y.shape);
    const CellSet cj = rj.cells(y.shape);
    CellSet both = ci;
    both.insert(both.end(), cj.begin(), cj.end());
    std::sort(both.begin(), both.end());
    const double sse_i = region_stats(y, ci).sse;
    const double sse_j = region_stats(y, cj).sse;
    const double sse_union = region_stats(y, both).sse;
    return 0.5 * (sse_i + sse_j) + lambda2 > 0.5 * sse_union;
}

MergeOutcome two_step_estimate(const LatticeField& y, double lambda1, double lambda2,
                               double eta) {
    if (!(lambda2 > 0)) throw param_error("lambda2 must be > 0");
    FitResult fit = constrained_dcart_fit(y, lambda1, eta);
    const std::vector<Rect>& rects = fit.partition.rects;
    const auto k = static_cast<std::int64_t>(rects.size());

    MergeTrace trace;
    trace.graph.node_count = k;
    const PrefixSumTable table(y);
    for (std::int64_t i = 0; i < k; ++i) {
        for (std::int64_t j = i + 1; j < k; ++j) {
            const Rect& ri = rects[static_cast<std::size_t>(i)];
            const Rect& rj = rects[static_cast<std::size_t>(j)];
            const double dist = rect_distance(ri, rj);
            const double gain = merge_gain(table, ri, rj);
            const bool merged = dist <= eta && gain < 2.0 * lambda2;
            trace.pairs_tested.push_back({i, j, dist, gain, merged});
            if (merged) trace.graph.add_edge(i, j);
        }
    }

    RegionPartition partition{y.shape, {}};
    for (const auto& comp : connected_components(trace.graph))
        partition.regions.push_back(union_of_rects(y.shape, rects, comp));
    return {std::move(partition), std::move(trace), std::move(fit)};
}

MergeOutcome naive_two_step_estimate(const LatticeField& y, double lambda1,
                                     const MergeConfig& config) {
    if (!(config.lambda2 > 0)) throw param_error("lambda2 must be > 0");
    if (!(config.eta >= 1)) throw param_error("eta must be >= 1");
    if (!(config.gamma > 0)) throw param_error("gamma must be > 0");

    FitResult fit = dcart_fit(y, lambda1);
    const std::vector<Rect>& rects = fit.partition.rects;
    const auto k = static_cast<std::int64_t>(rects.size());

    MergeTrace trace;
    trace.graph.node_count = k;
    trace.gamma_warning = config.gamma < config.eta;

    std::vector<bool> small(static_cast<std::size_t>(k), false);
    for (std::int64_t i = 0; i < k; ++i) {
        if (static_cast<double>(rects[static_cast<std::size_t>(i)].volume()) <= config.eta) {
            small[static_cast<std::size_t>(i)] = true;
            trace.small_rects.push_back(i);
        }
    }

    if (static_cast<std::int64_t>(trace.small_rects.size()) == k) {
        trace.all_small = true;
        RegionPartition partition{y.shape, {Rect::full(y.shape).cells(y.shape)}};
        return {std::move(partition), std::move(trace), std::move(fit)};
    }

    const PrefixSumTable table(y);
    for (std::int64_t i = 0; i < k; ++i) {
        if (small[static_cast<std::size_t>(i)]) continue;
        for (std::int64_t j = i + 1; j < k; ++j) {
            if (small[static_cast<std::size_t>(j)]) continue;
            const Rect& ri = rects[static_cast<std::size_t>(i)];
            const Rect& rj = rects[static_cast<std::size_t>(j)];
            const double dist = rect_distance(ri, rj);
            const double gain = merge_gain(table, ri, rj);
            const bool merged = dist <= config.gamma && gain < 2.0 * config.lambda2;
            trace.pairs_tested.push_back({i, j, dist, gain, merged});
            if (merged) trace.graph.add_edge(i, j);
        }
    }

    // Components of the graph restricted to large rectangles; isolated small
    // rectangles appear as singleton components and are filtered here.
    std::vector<std::vector<std::int64_t>> comps;
    for (auto& comp : connected_components(trace.graph)) {
        const bool only_small = comp.size() == 1 && small[static_cast<std::size_t>(comp.front())];
        if (!only_small) comps.push_back(std::move(comp));
    }

    if (!trace.small_rects.empty()) {
        if (config.policy == SmallSetPolicy::random) {
            Rng rng(Rng::derive(config.seed, 0x6d65726765ull));
            for (std::int64_t idx : trace.small_rects) {
                const auto c = rng.below(static_cast<std::uint64_t>(comps.size()));
                comps[static_cast<std::size_t>(c)].push_back(idx);
            }
        } else {
            for (std::int64_t idx : trace.small_rects) {
                double best = std::numeric_limits<double>::infinity();
                std::size_t best_comp = 0;
                for (std::size_t c = 0; c < comps.size(); ++c) {
                    // Distance computed against original member rects only so
                    // that earlier assignments do not shift later ones.
                    double dist = std::numeric_limits<double>::infinity();
                    for (std::int64_t m : comps[c]) {
                        if (small[static_cast<std::size_t>(m)]) continue;
                        dist = std::min(dist, rect_distance(rects[static_cast<std::size_t>(idx)],
                                                            rects[static_cast<std::size_t>(m)]));
                    }
                    if (dist < best) {
                        best = dist;
                        best_comp = c;
                    }
                }
                comps[best_comp].push_back(idx);
            }
        }
    }

    RegionPartition partition{y.shape, {}};
    for (const auto& comp : comps)
        partition.regions.push_back(union_of_rects(y.shape, rects, comp));
    return {std::move(partition), std::move(trace), std::move(fit)};
}

}  // namespace latpart
