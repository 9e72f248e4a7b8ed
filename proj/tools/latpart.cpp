// latpart: simulate / fit / bench / eval / ingest / render front end.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "latpart/io.hpp"
#include "latpart/metrics.hpp"

namespace fs = std::filesystem;
using namespace latpart;

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

const char* estimator_name(EstimatorKind k) {
    switch (k) {
        case EstimatorKind::dcart_raw: return "dcart";
        case EstimatorKind::two_step: return "two-step";
        case EstimatorKind::naive_two_step: return "naive";
    }
    return "?";
}

EstimatorKind parse_estimator(const std::string& s) {
    if (s == "dcart") return EstimatorKind::dcart_raw;
    if (s == "two-step") return EstimatorKind::two_step;
    if (s == "naive") return EstimatorKind::naive_two_step;
    throw CLI::ValidationError("--estimator", "must be dcart, two-step or naive");
}

std::vector<double> parse_grid(const std::string& s) {
    std::vector<double> grid;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t next = s.find(',', pos);
        if (next == std::string::npos) next = s.size();
        grid.push_back(std::stod(s.substr(pos, next - pos)));
        pos = next + 1;
    }
    if (grid.empty()) throw param_error("--grid: empty lambda grid");
    return grid;
}

int env_thread_cap() {
    const char* env = std::getenv("LATPART_THREADS");
    if (!env || !*env) return 0;
    const int v = std::atoi(env);
    return v > 0 ? v : 1;
}

struct FitFlags {
    std::string input;
    std::string out_dir = ".";
    std::string estimator = "naive";
    std::string policy = "random";
    double lambda1 = -1;  // <0 = auto tune
    double lambda2 = -1;  // <0 = copy lambda1
    double eta = 8;
    double gamma = 8;
    std::uint64_t seed = 0;
    std::string grid;
};

int run_fit(const FitFlags& f) {
    const LatticeField y = read_field(f.input);
    fs::create_directories(f.out_dir);

    double lambda1 = f.lambda1;
    if (lambda1 < 0) {
        const LambdaSelection sel =
            lambda_select(y, f.grid.empty() ? default_lambda_grid() : parse_grid(f.grid));
        lambda1 = sel.lambda;
    }
    const double lambda2 = f.lambda2 < 0 ? lambda1 : f.lambda2;
    const EstimatorKind kind = parse_estimator(f.estimator);

    std::cout << "config: estimator=" << estimator_name(kind) << " lambda1=" << g17(lambda1)
              << " lambda2=" << g17(lambda2) << " eta=" << g17(f.eta)
              << " gamma=" << g17(f.gamma) << " policy=" << f.policy << " seed=" << f.seed
              << " auto_lambda=" << (f.lambda1 < 0 ? 1 : 0) << '\n';

    FitResult fit{LatticeField::constant(y.shape, 0), {y.shape, {}}, 0, 0, 0};
    RegionPartition regions{y.shape, {}};
    MergeTrace trace;
    switch (kind) {
        case EstimatorKind::dcart_raw: {
            fit = dcart_fit(y, lambda1);
            for (const Rect& r : fit.partition.rects) regions.regions.push_back(r.cells(y.shape));
            break;
        }
        case EstimatorKind::two_step: {
            MergeOutcome out = two_step_estimate(y, lambda1, lambda2, f.eta);
            fit = std::move(out.step1);
            regions = std::move(out.partition);
            trace = std::move(out.trace);
            break;
        }
        case EstimatorKind::naive_two_step: {
            MergeConfig mc;
            mc.lambda2 = lambda2;
            mc.eta = f.eta;
            mc.gamma = f.gamma;
            mc.policy = f.policy == "nearest" ? SmallSetPolicy::nearest : SmallSetPolicy::random;
            mc.seed = f.seed;
            MergeOutcome out = naive_two_step_estimate(y, lambda1, mc);
            fit = std::move(out.step1);
            regions = std::move(out.partition);
            trace = std::move(out.trace);
            break;
        }
    }

    const fs::path dir(f.out_dir);
    write_fit_json(fit, (dir / "fit.json").string(), true);
    write_leaves_csv(fit.partition, (dir / "leaves.csv").string());
    write_field_text(label_map(regions), (dir / "labels.txt").string());
    write_trace_csv(trace, (dir / "trace.csv").string());
    std::cout << "leaf_count=" << fit.leaf_count << " region_count=" << regions.regions.size()
              << " objective=" << g17(fit.objective) << '\n';
    if (trace.gamma_warning)
        std::cerr << "warning: gamma < eta; distance gate tighter than the size gate\n";
    return 0;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"Partition recovery for piecewise-constant lattice signals"};
    app.require_subcommand(1);

    // --- simulate ---
    auto* sim = app.add_subcommand("simulate", "Generate a scenario field");
    int sim_scenario = 1;
    std::int64_t sim_n = 128;
    double sim_sigma = 0;
    std::uint64_t sim_seed = 0;
    std::string sim_out, sim_truth, sim_signal;
    sim->add_option("--scenario", sim_scenario, "Scenario id 1..5")->required();
    sim->add_option("--n", sim_n, "Side length (power of 2)");
    sim->add_option("--sigma", sim_sigma, "Noise level");
    sim->add_option("--seed", sim_seed, "RNG seed");
    sim->add_option("--out", sim_out, "Output field file")->required();
    sim->add_option("--truth-out", sim_truth, "True label map output");
    sim->add_option("--signal-out", sim_signal, "Noiseless signal output");

    // --- fit ---
    auto* fit = app.add_subcommand("fit", "Fit an estimator to a field file");
    FitFlags ff;
    fit->add_option("--in", ff.input, "Input field file")->required();
    fit->add_option("--out", ff.out_dir, "Output directory");
    fit->add_option("--estimator", ff.estimator, "dcart | two-step | naive");
    fit->add_option("--policy", ff.policy, "random | nearest")
        ->check(CLI::IsMember({"random", "nearest"}));
    fit->add_option("--lambda1", ff.lambda1, "Fit penalty (omit for auto tuning)");
    fit->add_option("--lambda2", ff.lambda2, "Merge penalty (default: lambda1)");
    fit->add_option("--eta", ff.eta, "Size / distance threshold");
    fit->add_option("--gamma", ff.gamma, "Naive distance threshold");
    fit->add_option("--seed", ff.seed, "Seed for the random small-set policy");
    fit->add_option("--grid", ff.grid, "Comma-separated lambda grid for auto tuning");

    // --- bench ---
    auto* bench = app.add_subcommand("bench", "Seeded Monte Carlo benchmark");
    std::string bench_config, bench_out = ".";
    bench->add_option("--config", bench_config, "JSON config file")->required();
    bench->add_option("--out", bench_out, "Output directory");

    // --- eval ---
    auto* eval = app.add_subcommand("eval", "Score a label map against the truth");
    std::string eval_est, eval_truth;
    eval->add_option("--labels", eval_est, "Estimated label map")->required();
    eval->add_option("--truth", eval_truth, "True label map")->required();

    // --- ingest ---
    auto* ingest = app.add_subcommand("ingest", "Bin scattered points onto a lattice");
    std::string ingest_in, ingest_out;
    int ingest_d = 2;
    ingest->add_option("--in", ingest_in, "Points CSV (x1,...,xd,value)")->required();
    ingest->add_option("--d", ingest_d, "Dimension");
    ingest->add_option("--out", ingest_out, "Output field file")->required();

    // --- render ---
    auto* render = app.add_subcommand("render", "Write a PGM/PPM image of a field");
    std::string render_in, render_out;
    bool render_labels = false;
    render->add_option("--in", render_in, "Input field file")->required();
    render->add_option("--out", render_out, "Output image path")->required();
    render->add_flag("--labels", render_labels, "Treat input as a label map (color PPM)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (sim->parsed()) {
        const LatticeField signal = scenario_signal({sim_scenario, sim_n});
        const LatticeField y = corrupt(signal, sim_sigma, sim_seed);
        std::cout << "config: scenario=S" << sim_scenario << " n=" << sim_n
                  << " sigma=" << g17(sim_sigma) << " seed=" << sim_seed << '\n';
        write_field_text(y, sim_out);
        if (!sim_signal.empty()) write_field_text(signal, sim_signal);
        if (!sim_truth.empty()) write_field_text(label_map(induced_partition(signal)), sim_truth);
        return 0;
    }
    if (fit->parsed()) return run_fit(ff);
    if (bench->parsed()) {
        BenchConfig config = read_bench_config(bench_config);
        if (const int cap = env_thread_cap(); cap > 0)
            config.threads = std::min(std::max(config.threads, 1), cap);
        std::cout << "config: scenario=S" << config.scenario.id << " n=" << config.scenario.n
                  << " sigma=" << g17(config.sigma) << " reps=" << config.reps
                  << " seed=" << config.seed_base << " estimator="
                  << estimator_name(config.estimator)
                  << " tuning=" << (config.tuning.auto_tune ? "auto" : "manual")
                  << " threads=" << config.threads << '\n';
        const BenchResult result = monte_carlo(config);
        fs::create_directories(bench_out);
        const fs::path dir(bench_out);
        write_bench_csv(result, (dir / "bench.csv").string());
        write_bench_timings_csv(result, (dir / "timings.csv").string());
        write_bench_summary_json(result, (dir / "summary.json").string());
        std::cout << "dist1=" << format_mean_sd(result.dist1)
                  << " dist2=" << format_mean_sd(result.dist2) << '\n';
        return 0;
    }
    if (eval->parsed()) {
        const RegionPartition est = regions_from_label_map(read_field(eval_est));
        const RegionPartition truth = regions_from_label_map(read_field(eval_truth));
        std::cout << "dist1=" << g17(dist1(est, truth)) << '\n';
        std::cout << "dist2=" << dist2(est, truth) << '\n';
        return 0;
    }
    if (ingest->parsed()) {
        const LatticeField field = bin_ingest(read_points_csv(ingest_in, ingest_d), ingest_d);
        std::cout << "config: d=" << ingest_d << " n=" << field.shape.side << '\n';
        write_field_text(field, ingest_out);
        return 0;
    }
    if (render->parsed()) {
        const LatticeField field = read_field(render_in);
        if (render_labels)
            write_labels_ppm(field, render_out);
        else
            write_field_pgm(field, render_out);
        return 0;
    }
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const param_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const infeasible_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const shape_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 5;
    }
}
