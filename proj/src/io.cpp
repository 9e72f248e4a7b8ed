#include "latpart/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace latpart {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt1(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

std::ofstream open_out(const std::string& path, bool binary = false) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw parse_error("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path, bool binary = false) {
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) throw parse_error("cannot open: " + path);
    return in;
}

LatticeShape read_header(std::istream& in, const std::string& what) {
    int d = 0;
    std::int64_t n = 0;
    if (!(in >> d >> n)) throw parse_error("malformed header in " + what);
    try {
        return LatticeShape::make(d, n);
    } catch (const shape_error& e) {
        throw parse_error(std::string("bad header in ") + what + ": " + e.what());
    }
}

}  // namespace

void write_field_text(const LatticeField& field, std::ostream& out) {
    out << field.shape.dim << ' ' << field.shape.side << '\n';
    const std::int64_t per_line = field.shape.dim >= 2 ? field.shape.side : field.shape.cell_count;
    for (std::int64_t i = 0; i < field.shape.cell_count; ++i) {
        out << fmt17(field[i]);
        out << (((i + 1) % per_line == 0) ? '\n' : ' ');
    }
}

void write_field_text(const LatticeField& field, const std::string& path) {
    auto out = open_out(path);
    write_field_text(field, out);
}

LatticeField read_field_text(std::istream& in) {
    const LatticeShape shape = read_header(in, "field file");
    std::vector<double> values(static_cast<std::size_t>(shape.cell_count));
    for (std::int64_t i = 0; i < shape.cell_count; ++i) {
        if (!(in >> values[static_cast<std::size_t>(i)]))
            throw parse_error("field file truncated at value " + std::to_string(i));
    }
    return LatticeField(shape, std::move(values));
}

LatticeField read_field_text(const std::string& path) {
    auto in = open_in(path);
    try {
        return read_field_text(in);
    } catch (const parse_error& e) {
        throw parse_error(path + ": " + e.what());
    }
}

void write_field_binary(const LatticeField& field, const std::string& path) {
    static_assert(std::endian::native == std::endian::little,
                  "binary field format assumes a little-endian host");
    auto out = open_out(path, true);
    out << field.shape.dim << ' ' << field.shape.side << '\n';
    out.write(reinterpret_cast<const char*>(field.values.data()),
              static_cast<std::streamsize>(field.values.size() * sizeof(double)));
}

LatticeField read_field_binary(const std::string& path) {
    auto in = open_in(path, true);
    const LatticeShape shape = read_header(in, path);
    in.get();  // newline after header
    std::vector<double> values(static_cast<std::size_t>(shape.cell_count));
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (!in) throw parse_error("binary field file truncated: " + path);
    return LatticeField(shape, std::move(values));
}

LatticeField read_field(const std::string& path) {
    if (path.size() > 4 && path.compare(path.size() - 4, 4, ".bin") == 0)
        return read_field_binary(path);
    return read_field_text(path);
}

LatticeField label_map(const RegionPartition& partition) {
    const ValidationReport report = validate_partition(partition);
    if (!report.ok) throw param_error("label_map: invalid partition: " + report.message);
    std::vector<double> values(static_cast<std::size_t>(partition.shape.cell_count), 0.0);
    for (std::size_t r = 0; r < partition.regions.size(); ++r)
        for (CellIndex c : partition.regions[r])
            values[static_cast<std::size_t>(c)] = static_cast<double>(r);
    return LatticeField(partition.shape, std::move(values));
}

RegionPartition regions_from_label_map(const LatticeField& labels) {
    std::map<double, CellSet> by_label;
    for (CellIndex i = 0; i < labels.shape.cell_count; ++i)
        by_label[labels[i]].push_back(i);
    RegionPartition out{labels.shape, {}};
    std::vector<std::pair<CellIndex, const CellSet*>> order;
    for (const auto& [label, cells] : by_label) order.emplace_back(cells.front(), &cells);
    std::sort(order.begin(), order.end());
    for (const auto& [first, cells] : order) out.regions.push_back(*cells);
    return out;
}

void write_fit_json(const FitResult& fit, const std::string& path, bool include_theta) {
    nlohmann::json j;
    j["lambda"] = fit.lambda;
    j["objective"] = fit.objective;
    j["leaf_count"] = fit.leaf_count;
    nlohmann::json leaves = nlohmann::json::array();
    for (const Rect& r : fit.partition.rects) {
        nlohmann::json leaf;
        leaf["lo"] = r.lo;
        leaf["hi"] = r.hi;
        leaves.push_back(std::move(leaf));
    }
    j["leaves"] = std::move(leaves);
    if (include_theta) j["theta"] = fit.theta.values;
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

void write_leaves_csv(const RectPartition& partition, const std::string& path) {
    auto out = open_out(path);
    out << "index";
    for (int i = 0; i < partition.shape.dim; ++i) out << ",lo" << i;
    for (int i = 0; i < partition.shape.dim; ++i) out << ",hi" << i;
    out << '\n';
    for (std::size_t r = 0; r < partition.rects.size(); ++r) {
        out << r;
        for (std::int64_t v : partition.rects[r].lo) out << ',' << v;
        for (std::int64_t v : partition.rects[r].hi) out << ',' << v;
        out << '\n';
    }
}

void write_trace_csv(const MergeTrace& trace, const std::string& path) {
    auto out = open_out(path);
    out << "i,j,distance,gain,merged\n";
    for (const PairRecord& p : trace.pairs_tested) {
        out << p.i << ',' << p.j << ',' << fmt17(p.distance) << ',' << fmt17(p.gain) << ','
            << (p.merged ? 1 : 0) << '\n';
    }
}

void write_bench_csv(const BenchResult& result, const std::string& path) {
    auto out = open_out(path);
    out << "scenario,sigma,seed,dist1,dist2,leaf_count_step1,region_count,status\n";
    for (const BenchRow& row : result.rows) {
        std::string status = row.failed ? row.error : "ok";
        std::replace(status.begin(), status.end(), ',', ';');
        std::replace(status.begin(), status.end(), '\n', ' ');
        out << 'S' << result.config.scenario.id << ',' << fmt17(result.config.sigma) << ','
            << row.seed << ',' << fmt17(row.dist1) << ',' << row.dist2 << ','
            << row.leaf_count_step1 << ',' << row.region_count << ',' << status << '\n';
    }
}

void write_bench_timings_csv(const BenchResult& result, const std::string& path) {
    auto out = open_out(path);
    out << "seed,runtime_ms\n";
    for (const BenchRow& row : result.rows)
        out << row.seed << ',' << fmt17(row.runtime_ms) << '\n';
}

std::string format_mean_sd(const Aggregate& a) {
    return fmt1(a.mean) + "(" + fmt1(a.sd) + ")";
}

void write_bench_summary_json(const BenchResult& result, const std::string& path) {
    nlohmann::json j;
    j["config"]["scenario"] = "S" + std::to_string(result.config.scenario.id);
    j["config"]["n"] = result.config.scenario.n;
    j["config"]["sigma"] = result.config.sigma;
    j["config"]["reps"] = result.config.reps;
    j["config"]["seed"] = result.config.seed_base;
    switch (result.config.estimator) {
        case EstimatorKind::dcart_raw: j["config"]["estimator"] = "dcart"; break;
        case EstimatorKind::two_step: j["config"]["estimator"] = "two-step"; break;
        case EstimatorKind::naive_two_step: j["config"]["estimator"] = "naive"; break;
    }
    const Tuning& t = result.config.tuning;
    if (t.auto_tune) {
        j["config"]["tuning"] = "auto";
    } else {
        j["config"]["tuning"] = {{"lambda1", t.lambda1},
                                 {"lambda2", t.lambda2},
                                 {"eta", t.eta},
                                 {"gamma", t.gamma}};
    }
    j["config"]["policy"] = t.policy == SmallSetPolicy::random ? "random" : "nearest";

    auto agg = [](const Aggregate& a) {
        return nlohmann::json{{"mean", a.mean}, {"sd", a.sd}, {"table", format_mean_sd(a)}};
    };
    j["dist1"] = agg(result.dist1);
    j["dist2"] = agg(result.dist2);
    j["runtime_ms"] = agg(result.runtime_ms);
    int failed = 0;
    for (const BenchRow& row : result.rows) failed += row.failed ? 1 : 0;
    j["failed_reps"] = failed;
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

BenchConfig read_bench_config(const std::string& path) {
    auto in = open_in(path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(path + ": " + e.what());
    }

    static const std::vector<std::string> allowed = {
        "scenario", "n", "sigma", "reps", "seed", "estimator",
        "tuning",   "policy", "grid", "threads"};
    std::string bad;
    for (const auto& [key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            bad += (bad.empty() ? "" : ", ") + key;
    }
    if (!bad.empty()) throw parse_error(path + ": unknown config keys: " + bad);

    BenchConfig config;
    try {
        if (j.contains("scenario")) {
            if (j["scenario"].is_string()) {
                std::string s = j["scenario"].get<std::string>();
                if (!s.empty() && (s[0] == 'S' || s[0] == 's')) s = s.substr(1);
                config.scenario.id = std::stoi(s);
            } else {
                config.scenario.id = j["scenario"].get<int>();
            }
        }
        if (j.contains("n")) config.scenario.n = j["n"].get<std::int64_t>();
        if (j.contains("sigma")) config.sigma = j["sigma"].get<double>();
        if (j.contains("reps")) config.reps = j["reps"].get<int>();
        if (j.contains("seed")) config.seed_base = j["seed"].get<std::uint64_t>();
        if (j.contains("estimator")) {
            const std::string e = j["estimator"].get<std::string>();
            if (e == "dcart") config.estimator = EstimatorKind::dcart_raw;
            else if (e == "two-step" || e == "two_step") config.estimator = EstimatorKind::two_step;
            else if (e == "naive") config.estimator = EstimatorKind::naive_two_step;
            else throw parse_error("unknown estimator: " + e);
        }
        if (j.contains("tuning")) {
            if (j["tuning"].is_string()) {
                if (j["tuning"].get<std::string>() != "auto")
                    throw parse_error("tuning must be \"auto\" or an object");
                config.tuning.auto_tune = true;
            } else {
                config.tuning.auto_tune = false;
                config.tuning.lambda1 = j["tuning"].at("lambda1").get<double>();
                config.tuning.lambda2 = j["tuning"].at("lambda2").get<double>();
                config.tuning.eta = j["tuning"].value("eta", 8.0);
                config.tuning.gamma = j["tuning"].value("gamma", 8.0);
            }
        }
        if (j.contains("policy")) {
            const std::string p = j["policy"].get<std::string>();
            if (p == "random") config.tuning.policy = SmallSetPolicy::random;
            else if (p == "nearest") config.tuning.policy = SmallSetPolicy::nearest;
            else throw parse_error("unknown policy: " + p);
        }
        if (j.contains("grid")) config.tuning.grid = j["grid"].get<std::vector<double>>();
        if (j.contains("threads")) config.threads = j["threads"].get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(path + ": " + e.what());
    }
    if (config.reps < 1) throw param_error("config: reps must be >= 1");
    return config;
}

void write_field_pgm(const LatticeField& field, const std::string& path) {
    if (field.shape.dim != 2) throw param_error("render supports d = 2 only");
    const auto [lo_it, hi_it] = std::minmax_element(field.values.begin(), field.values.end());
    const double lo = *lo_it, hi = *hi_it;
    const double span = hi > lo ? hi - lo : 1.0;
    auto out = open_out(path);
    out << "P2\n" << field.shape.side << ' ' << field.shape.side << "\n255\n";
    for (std::int64_t i = 0; i < field.shape.cell_count; ++i) {
        const int g = static_cast<int>(std::lround((field[i] - lo) / span * 255.0));
        out << g << (((i + 1) % field.shape.side == 0) ? '\n' : ' ');
    }
}

void write_labels_ppm(const LatticeField& labels, const std::string& path) {
    if (labels.shape.dim != 2) throw param_error("render supports d = 2 only");
    static const int palette[12][3] = {
        {31, 119, 180}, {255, 127, 14}, {44, 160, 44},  {214, 39, 40},
        {148, 103, 189}, {140, 86, 75}, {227, 119, 194}, {127, 127, 127},
        {188, 189, 34}, {23, 190, 207}, {255, 255, 255}, {0, 0, 0}};
    auto out = open_out(path);
    out << "P3\n" << labels.shape.side << ' ' << labels.shape.side << "\n255\n";
    for (std::int64_t i = 0; i < labels.shape.cell_count; ++i) {
        const auto label = static_cast<std::int64_t>(labels[i]);
        const int* c = palette[static_cast<std::size_t>(((label % 12) + 12) % 12)];
        out << c[0] << ' ' << c[1] << ' ' << c[2]
            << (((i + 1) % labels.shape.side == 0) ? '\n' : ' ');
    }
}

std::vector<SamplePoint> read_points_csv(const std::string& path, int d) {
    auto in = open_in(path);
    std::vector<SamplePoint> points;
    std::string line;
    std::int64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        SamplePoint p;
        p.x.resize(static_cast<std::size_t>(d));
        bool ok = true;
        for (int i = 0; i < d && ok; ++i) ok = static_cast<bool>(row >> p.x[static_cast<std::size_t>(i)]);
        ok = ok && static_cast<bool>(row >> p.value);
        if (!ok) {
            if (line_no == 1) continue;  // header row
            throw parse_error(path + ": malformed point at line " + std::to_string(line_no));
        }
        points.push_back(std::move(p));
    }
    return points;
}

}  // namespace latpart
