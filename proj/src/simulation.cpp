#include "latpart/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

#include "latpart/metrics.hpp"
#include "latpart/rng.hpp"

namespace latpart {

namespace {

double sq(double x) { return x * x; }

double scenario_value(int id, double n, double a, double b) {
    switch (id) {
        case 1:
            return (n / 4 < a && a < 3 * n / 4 && n / 4 < b && b < 3 * n / 4) ? 1 : 0;
        case 2:
            if (sq(a - n / 4) + sq(b - n / 4) < sq(n / 5)) return 1;
            if (sq(a - 3 * n / 4) + sq(b - 3 * n / 4) < sq(n / 5)) return 1;
            return 0;
        case 3:
            if (n / 4 < a && a < 3 * n / 4 && n / 4 < b && b < 3 * n / 8) return 1;
            if (5 * n / 8 < a && a < 3 * n / 4 && 3 * n / 8 <= b && b < 3 * n / 4) return 1;
            if (a > 3 * n / 4 && b > 3 * n / 4) return -1;
            return 0;
        case 4:
            if (a < n / 5 && b < n / 5) return 1;
            if (a < n / 5 && b > 4 * n / 5) return 2;
            if (a > 4 * n / 5 && b < 4 * n / 5) return 3;
            if (a > 4 * n / 5 && b > 4 * n / 5) return 4;
            if (3 * n / 8 < a && a < 5 * n / 8 && 3 * n / 8 < b && b < 5 * n / 8) return 5;
            return 0;
        case 5:
            if (a < n / 5 && b > 2 * n / 5) return 2;
            if (a > 4 * n / 5 && b < 3 * n / 5) return 3;
            if (std::abs(a - n / 2) < n / 4.5 && b < n / 4.5) return 4;
            return 0;
        default:
            throw param_error("unknown scenario id");
    }
}

}  // namespace

LatticeField scenario_signal(const ScenarioSpec& spec) {
    if (spec.id < 1 || spec.id > 5) throw param_error("scenario id must be in 1..5");
    if (spec.n < 8) throw param_error("scenario side length must be >= 8");
    const LatticeShape shape = LatticeShape::make(2, spec.n);
    std::vector<double> values(static_cast<std::size_t>(shape.cell_count));
    const double n = static_cast<double>(spec.n);
    std::size_t idx = 0;
    for (std::int64_t a = 1; a <= spec.n; ++a)
        for (std::int64_t b = 1; b <= spec.n; ++b)
            values[idx++] = scenario_value(spec.id, n, static_cast<double>(a),
                                           static_cast<double>(b));
    return LatticeField(shape, std::move(values));
}

LatticeField corrupt(const LatticeField& theta, double sigma, std::uint64_t seed) {
    if (sigma < 0) throw param_error("sigma must be >= 0");
    if (sigma == 0) return theta;
    Rng rng(seed);
    std::vector<double> values = theta.values;
    for (double& v : values) v += sigma * rng.normal();
    return LatticeField(theta.shape, std::move(values));
}

double variance_estimate(const LatticeField& y) {
    const std::int64_t n = y.shape.cell_count;
    if (n < 2) throw param_error("variance_estimate requires at least 2 cells");
    double acc = 0;
    for (std::int64_t j = 0; j + 1 < n; ++j) acc += sq(y[j] - y[j + 1]);
    return acc / (2.0 * static_cast<double>(n));
}

std::vector<double> default_lambda_grid() {
    std::vector<double> grid;
    for (int l = 0; l <= 14; ++l) grid.push_back(5.0 + 25.0 * l / 14.0);
    return grid;
}

LambdaSelection lambda_select(const LatticeField& y, const std::vector<double>& grid) {
    if (grid.empty()) throw param_error("lambda grid must be non-empty");
    std::vector<double> sorted = grid;
    std::sort(sorted.begin(), sorted.end());
    const double sigma_sq = variance_estimate(y);
    const double log_n = std::log(static_cast<double>(y.shape.cell_count));

    LambdaSelection best;
    double best_score = std::numeric_limits<double>::infinity();
    for (double lambda : sorted) {
        FitResult fit = dcart_fit(y, lambda);
        double resid = 0;
        for (std::int64_t i = 0; i < y.shape.cell_count; ++i) resid += sq(y[i] - fit.theta[i]);
        const double score = resid + sigma_sq * static_cast<double>(fit.leaf_count) * log_n;
        if (score < best_score) {
            best_score = score;
            best.lambda = lambda;
            best.fit = std::move(fit);
        }
    }
    best.sigma_sq = sigma_sq;
    return best;
}

Aggregate aggregate(const std::vector<double>& xs) {
    Aggregate a;
    if (xs.empty()) return a;
    double sum = 0;
    for (double x : xs) sum += x;
    a.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0;
        for (double x : xs) ss += sq(x - a.mean);
        a.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return a;
}

namespace {

RegionPartition rects_as_regions(const LatticeShape& shape, const RectPartition& partition) {
    RegionPartition out{shape, {}};
    for (const Rect& r : partition.rects) out.regions.push_back(r.cells(shape));
    return out;
}

BenchRow run_rep(const BenchConfig& config, const LatticeField& theta_star,
                 const RegionPartition& truth, int rep) {
    BenchRow row;
    row.seed = config.seed_base + static_cast<std::uint64_t>(rep);
    try {
        const LatticeField y = corrupt(theta_star, config.sigma, row.seed);
        const auto t0 = std::chrono::steady_clock::now();

        Tuning t = config.tuning;
        if (t.auto_tune) {
            const LambdaSelection sel =
                lambda_select(y, t.grid.empty() ? default_lambda_grid() : t.grid);
            t.lambda1 = sel.lambda;
            t.lambda2 = sel.lambda;
            t.eta = 8;
            t.gamma = 8;
        }

        RegionPartition estimated{y.shape, {}};
        switch (config.estimator) {
            case EstimatorKind::dcart_raw: {
                const FitResult fit = dcart_fit(y, t.lambda1);
                row.leaf_count_step1 = fit.leaf_count;
                estimated = rects_as_regions(y.shape, fit.partition);
                break;
            }
            case EstimatorKind::two_step: {
                MergeOutcome out = two_step_estimate(y, t.lambda1, t.lambda2, t.eta);
                row.leaf_count_step1 = out.step1.leaf_count;
                estimated = std::move(out.partition);
                break;
            }
            case EstimatorKind::naive_two_step: {
                MergeConfig mc;
                mc.lambda2 = t.lambda2;
                mc.eta = t.eta;
                mc.gamma = t.gamma;
                mc.policy = t.policy;
                mc.seed = row.seed;
                MergeOutcome out = naive_two_step_estimate(y, t.lambda1, mc);
                row.leaf_count_step1 = out.step1.leaf_count;
                estimated = std::move(out.partition);
                break;
            }
        }
        const auto t1 = std::chrono::steady_clock::now();
        row.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        row.region_count = static_cast<std::int64_t>(estimated.regions.size());
        row.dist1 = dist1(estimated, truth);
        row.dist2 = dist2(estimated, truth);
    } catch (const std::exception& e) {
        row.failed = true;
        row.error = e.what();
    }
    return row;
}

}  // namespace

BenchResult monte_carlo(const BenchConfig& config) {
    if (config.reps < 1) throw param_error("reps must be >= 1");
    if (config.sigma < 0) throw param_error("sigma must be >= 0");

    const LatticeField theta_star = scenario_signal(config.scenario);
    const RegionPartition truth = induced_partition(theta_star);

    BenchResult result;
    result.config = config;
    result.rows.resize(static_cast<std::size_t>(config.reps));

    const int threads = std::max(1, config.threads);
    if (threads == 1) {
        for (int r = 0; r < config.reps; ++r)
            result.rows[static_cast<std::size_t>(r)] = run_rep(config, theta_star, truth, r);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                for (int r = t; r < config.reps; r += threads)
                    result.rows[static_cast<std::size_t>(r)] =
                        run_rep(config, theta_star, truth, r);
            });
        }
        for (auto& th : pool) th.join();
    }

    std::vector<double> d1s, d2s, rts;
    for (const BenchRow& row : result.rows) {
        if (row.failed) continue;
        d1s.push_back(row.dist1);
        d2s.push_back(static_cast<double>(row.dist2));
        rts.push_back(row.runtime_ms);
    }
    result.dist1 = aggregate(d1s);
    result.dist2 = aggregate(d2s);
    result.runtime_ms = aggregate(rts);
    return result;
}

LatticeField bin_ingest(const std::vector<SamplePoint>& points, int d) {
    if (points.empty()) throw param_error("bin_ingest requires at least one point");
    if (d < 1) throw param_error("dimension must be >= 1");
    for (const SamplePoint& p : points) {
        if (static_cast<int>(p.x.size()) != d)
            throw param_error("point dimension mismatch");
        for (double c : p.x)
            if (!(c >= 0.0 && c <= 1.0)) throw param_error("point coordinate outside [0,1]");
    }

    const double count = static_cast<double>(points.size());
    std::int64_t n = 2;
    if (count > 2) {
        const double target = std::pow(count / std::log(count), 1.0 / d);
        while (static_cast<double>(2 * n) <= target) n *= 2;
    }
    const LatticeShape shape = LatticeShape::make(d, n);

    std::vector<double> sums(static_cast<std::size_t>(shape.cell_count), 0.0);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(shape.cell_count), 0);
    for (const SamplePoint& p : points) {
        Coord c(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) {
            auto cell = static_cast<std::int64_t>(std::floor(p.x[static_cast<std::size_t>(i)] *
                                                             static_cast<double>(n))) + 1;
            c[static_cast<std::size_t>(i)] = std::clamp<std::int64_t>(cell, 1, n);
        }
        const CellIndex idx = shape.index_of(c);
        sums[static_cast<std::size_t>(idx)] += p.value;
        ++counts[static_cast<std::size_t>(idx)];
    }

    std::vector<double> values(static_cast<std::size_t>(shape.cell_count), 0.0);
    std::vector<CellIndex> filled;
    for (CellIndex i = 0; i < shape.cell_count; ++i) {
        if (counts[static_cast<std::size_t>(i)] > 0) {
            values[static_cast<std::size_t>(i)] =
                sums[static_cast<std::size_t>(i)] /
                static_cast<double>(counts[static_cast<std::size_t>(i)]);
            filled.push_back(i);
        }
    }
    for (CellIndex i = 0; i < shape.cell_count; ++i) {
        if (counts[static_cast<std::size_t>(i)] > 0) continue;
        const Coord ci = shape.coord_of(i);
        double best = std::numeric_limits<double>::infinity();
        CellIndex best_src = filled.front();
        for (CellIndex j : filled) {
            const Coord cj = shape.coord_of(j);
            double d2 = 0;
            for (int k = 0; k < d; ++k)
                d2 += sq(static_cast<double>(ci[static_cast<std::size_t>(k)] -
                                             cj[static_cast<std::size_t>(k)]));
            if (d2 < best) {
                best = d2;
                best_src = j;
            }
        }
        values[static_cast<std::size_t>(i)] = values[static_cast<std::size_t>(best_src)];
    }
    return LatticeField(shape, std::move(values));
}

}  // namespace latpart
