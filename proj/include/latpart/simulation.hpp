#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "latpart/estimators.hpp"
#include "latpart/lattice.hpp"
#include "latpart/merge.hpp"

namespace latpart {

struct ScenarioSpec {
    int id = 1;  // 1..5
    std::int64_t n = 128;
};

/// Closed-form simulation signals (d = 2).
LatticeField scenario_signal(const ScenarioSpec& spec);

/// y = theta + sigma * Z with i.i.d. standard normal Z from a seeded,
/// platform-independent generator.
LatticeField corrupt(const LatticeField& theta, double sigma, std::uint64_t seed);

/// Difference-based estimate (2N)^-1 * sum (y_j - y_{j+1})^2 over the
/// row-major cell ordering.
double variance_estimate(const LatticeField& y);

/// {5 + 25l/14 : l = 0..14}
std::vector<double> default_lambda_grid();

struct LambdaSelection {
    double lambda = 0;
    FitResult fit;
    double sigma_sq = 0;  // variance estimate used by the criterion
};

/// Grid minimizer of SSE(lambda) + sigma_hat^2 * leafCount * log N;
/// ties go to the smallest lambda.
LambdaSelection lambda_select(const LatticeField& y, const std::vector<double>& grid);

enum class EstimatorKind { dcart_raw, two_step, naive_two_step };

struct Tuning {
    bool auto_tune = true;
    double lambda1 = 0;
    double lambda2 = 0;
    double eta = 8;
    double gamma = 8;
    std::vector<double> grid;  // empty = default grid
    SmallSetPolicy policy = SmallSetPolicy::random;
};

struct BenchConfig {
    ScenarioSpec scenario;
    double sigma = 1;
    int reps = 50;
    std::uint64_t seed_base = 0;
    EstimatorKind estimator = EstimatorKind::naive_two_step;
    Tuning tuning;
    int threads = 1;
};

struct BenchRow {
    std::uint64_t seed = 0;
    double dist1 = 0;
    std::int64_t dist2 = 0;
    std::int64_t leaf_count_step1 = 0;
    std::int64_t region_count = 0;
    double runtime_ms = 0;
    bool failed = false;
    std::string error;
};

struct Aggregate {
    double mean = 0;
    double sd = 0;  // sample standard deviation
};

struct BenchResult {
    BenchConfig config;
    std::vector<BenchRow> rows;
    Aggregate dist1;
    Aggregate dist2;
    Aggregate runtime_ms;
};

Aggregate aggregate(const std::vector<double>& xs);

/// Seeded Monte Carlo benchmark: per-rep corrupt -> tune -> estimate ->
/// score against the induced partition of the scenario signal.
BenchResult monte_carlo(const BenchConfig& config);

struct SamplePoint {
    std::vector<double> x;  // in [0,1]^d
    double value = 0;
};

/// Bin scattered observations onto a dyadic lattice; empty cells copy the
/// nearest non-empty cell (center distance, ties to lowest row-major index).
LatticeField bin_ingest(const std::vector<SamplePoint>& points, int d);

}  // namespace latpart
