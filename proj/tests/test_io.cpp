#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "latpart/estimators.hpp"
#include "latpart/io.hpp"
#include "latpart/merge.hpp"
#include "latpart/metrics.hpp"
#include "latpart/rng.hpp"

using namespace latpart;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("latpart_io_" + std::to_string(::getpid()) + "_" +
                std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

LatticeField awkward_field() {
    const LatticeShape s = LatticeShape::make(2, 4);
    std::vector<double> v(16);
    Rng rng(404);
    for (double& x : v) x = rng.normal() * 1e-3 + 0.1;
    v[0] = 1.0 / 3.0;
    v[1] = 1e-300;
    v[2] = -12345.678901234567;
    return LatticeField(s, v);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("text field round trip is bit exact") {
    TempDir tmp;
    const LatticeField f = awkward_field();
    write_field_text(f, tmp.file("f.txt"));
    const LatticeField g = read_field_text(tmp.file("f.txt"));
    CHECK(g.shape == f.shape);
    CHECK(g.values == f.values);
}

TEST_CASE("binary field round trip is bit exact") {
    TempDir tmp;
    const LatticeField f = awkward_field();
    write_field_binary(f, tmp.file("f.bin"));
    const LatticeField g = read_field_binary(tmp.file("f.bin"));
    CHECK(g.values == f.values);
    // Extension-based dispatch.
    CHECK(read_field(tmp.file("f.bin")).values == f.values);
    write_field_text(f, tmp.file("f.txt"));
    CHECK(read_field(tmp.file("f.txt")).values == f.values);
}

TEST_CASE("malformed field files raise parse errors") {
    TempDir tmp;
    CHECK_THROWS_AS(read_field_text(tmp.file("missing.txt")), parse_error);
    {
        std::ofstream out(tmp.file("bad.txt"));
        out << "2 4\n1 2 3\n";  // truncated
    }
    CHECK_THROWS_AS(read_field_text(tmp.file("bad.txt")), parse_error);
    {
        std::ofstream out(tmp.file("badhdr.txt"));
        out << "x y\n";
    }
    CHECK_THROWS_AS(read_field_text(tmp.file("badhdr.txt")), parse_error);
}

TEST_CASE("label maps round trip through fields") {
    const LatticeField theta = scenario_signal({4, 16});
    const RegionPartition p = induced_partition(theta);
    const LatticeField labels = label_map(p);
    const RegionPartition q = regions_from_label_map(labels);
    CHECK(p.regions == q.regions);
    RegionPartition broken{theta.shape, {{0}}};
    CHECK_THROWS_AS(label_map(broken), param_error);
}

TEST_CASE("fit json artifacts") {
    TempDir tmp;
    const LatticeShape s = LatticeShape::make(2, 4);
    const LatticeField y(s, std::vector<double>(16, 1.0));
    const FitResult fit = dcart_fit(y, 2.0);
    write_fit_json(fit, tmp.file("fit.json"), true);

    std::ifstream in(tmp.file("fit.json"));
    nlohmann::json j;
    in >> j;
    CHECK(j["lambda"].get<double>() == 2.0);
    CHECK(j["leaf_count"].get<std::int64_t>() == 1);
    CHECK(j["leaves"].size() == 1);
    CHECK(j["leaves"][0]["lo"] == nlohmann::json({1, 1}));
    CHECK(j["leaves"][0]["hi"] == nlohmann::json({4, 4}));
    CHECK(j["theta"].size() == 16);

    write_leaves_csv(fit.partition, tmp.file("leaves.csv"));
    CHECK(slurp(tmp.file("leaves.csv")) == "index,lo0,lo1,hi0,hi1\n0,1,1,4,4\n");
}

TEST_CASE("trace csv format") {
    TempDir tmp;
    MergeTrace trace;
    trace.pairs_tested.push_back({0, 1, 1.0, 0.5, true});
    trace.pairs_tested.push_back({0, 2, 2.5, 100.0, false});
    write_trace_csv(trace, tmp.file("trace.csv"));
    CHECK(slurp(tmp.file("trace.csv")) ==
          "i,j,distance,gain,merged\n0,1,1,0.5,1\n0,2,2.5,100,0\n");
}

TEST_CASE("bench artifacts are deterministic") {
    TempDir tmp;
    BenchConfig config;
    config.scenario = {1, 32};
    config.sigma = 0.5;
    config.reps = 4;
    config.seed_base = 5;
    config.estimator = EstimatorKind::naive_two_step;
    config.threads = 2;

    const BenchResult a = monte_carlo(config);
    const BenchResult b = monte_carlo(config);
    write_bench_csv(a, tmp.file("a.csv"));
    write_bench_csv(b, tmp.file("b.csv"));
    CHECK(slurp(tmp.file("a.csv")) == slurp(tmp.file("b.csv")));

    write_bench_timings_csv(a, tmp.file("t.csv"));
    CHECK(slurp(tmp.file("t.csv")).rfind("seed,runtime_ms\n", 0) == 0);

    write_bench_summary_json(a, tmp.file("s.json"));
    std::ifstream in(tmp.file("s.json"));
    nlohmann::json j;
    in >> j;
    CHECK(j["config"]["scenario"] == "S1");
    CHECK(j["config"]["reps"] == 4);
    CHECK(j["dist2"]["mean"].get<double>() == doctest::Approx(a.dist2.mean));
    CHECK(j["failed_reps"] == 0);
}

TEST_CASE("format mean sd matches the table style") {
    CHECK(format_mean_sd({35.82, 12.24}) == "35.8(12.2)");
    CHECK(format_mean_sd({0.0, 0.0}) == "0.0(0.0)");
    CHECK(format_mean_sd({0.04, 0.57}) == "0.0(0.6)");
}

TEST_CASE("bench config parsing") {
    TempDir tmp;
    {
        std::ofstream out(tmp.file("c.json"));
        out << R"({"scenario":"S3","n":64,"sigma":1.5,"reps":7,"seed":9,
                   "estimator":"two-step","tuning":{"lambda1":4,"lambda2":2,"eta":8,"gamma":8},
                   "policy":"nearest","threads":3})";
    }
    const BenchConfig c = read_bench_config(tmp.file("c.json"));
    CHECK(c.scenario.id == 3);
    CHECK(c.scenario.n == 64);
    CHECK(c.sigma == 1.5);
    CHECK(c.reps == 7);
    CHECK(c.seed_base == 9);
    CHECK(c.estimator == EstimatorKind::two_step);
    CHECK(!c.tuning.auto_tune);
    CHECK(c.tuning.lambda1 == 4.0);
    CHECK(c.tuning.lambda2 == 2.0);
    CHECK(c.tuning.policy == SmallSetPolicy::nearest);
    CHECK(c.threads == 3);

    {
        std::ofstream out(tmp.file("bad.json"));
        out << R"({"scenario":1,"frobnicate":1,"wibble":2})";
    }
    try {
        read_bench_config(tmp.file("bad.json"));
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("frobnicate") != std::string::npos);
        CHECK(msg.find("wibble") != std::string::npos);
    }

    {
        std::ofstream out(tmp.file("zero.json"));
        out << R"({"scenario":1,"reps":0})";
    }
    CHECK_THROWS_AS(read_bench_config(tmp.file("zero.json")), param_error);
}

TEST_CASE("image emission") {
    TempDir tmp;
    const LatticeShape s = LatticeShape::make(2, 4);

    std::vector<double> v(16, 0.0);
    for (int i = 8; i < 16; ++i) v[static_cast<std::size_t>(i)] = 1.0;
    write_field_pgm(LatticeField(s, v), tmp.file("two.pgm"));
    {
        std::ifstream in(tmp.file("two.pgm"));
        std::string magic;
        int w, h, maxval;
        in >> magic >> w >> h >> maxval;
        CHECK(magic == "P2");
        CHECK(w == 4);
        CHECK(h == 4);
        std::set<int> grays;
        for (int g; in >> g;) grays.insert(g);
        CHECK(grays == std::set<int>{0, 255});
    }

    write_field_pgm(LatticeField::constant(s, 3.0), tmp.file("const.pgm"));
    {
        std::ifstream in(tmp.file("const.pgm"));
        std::string magic;
        int w, h, maxval;
        in >> magic >> w >> h >> maxval;
        std::set<int> grays;
        for (int g; in >> g;) grays.insert(g);
        CHECK(grays.size() == 1);
    }

    write_labels_ppm(LatticeField(s, v), tmp.file("two.ppm"));
    CHECK(slurp(tmp.file("two.ppm")).rfind("P3\n", 0) == 0);

    CHECK_THROWS_AS(write_field_pgm(LatticeField::constant(LatticeShape::make(3, 4), 0.0),
                                    tmp.file("x.pgm")),
                    param_error);
}

TEST_CASE("points csv") {
    TempDir tmp;
    {
        std::ofstream out(tmp.file("p.csv"));
        out << "x,y,value\n0.25,0.25,1\n0.75,0.75,4.5\n";
    }
    const auto pts = read_points_csv(tmp.file("p.csv"), 2);
    REQUIRE(pts.size() == 2);
    CHECK(pts[0].x == std::vector<double>{0.25, 0.25});
    CHECK(pts[1].value == 4.5);

    {
        std::ofstream out(tmp.file("bad.csv"));
        out << "0.25,0.25,1\n0.75,oops,4.5\n";
    }
    CHECK_THROWS_AS(read_points_csv(tmp.file("bad.csv"), 2), parse_error);
}
