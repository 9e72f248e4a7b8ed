#pragma once

#include <iosfwd>
#include <string>

#include "latpart/estimators.hpp"
#include "latpart/lattice.hpp"
#include "latpart/merge.hpp"
#include "latpart/simulation.hpp"

namespace latpart {

// Field files: a header line "d n" followed by N row-major values, either
// whitespace-separated text or a little-endian float64 blob.

void write_field_text(const LatticeField& field, std::ostream& out);
void write_field_text(const LatticeField& field, const std::string& path);
LatticeField read_field_text(std::istream& in);
LatticeField read_field_text(const std::string& path);

void write_field_binary(const LatticeField& field, const std::string& path);
LatticeField read_field_binary(const std::string& path);

/// Auto-detects text vs binary by extension (".bin" = binary).
LatticeField read_field(const std::string& path);

/// Region labels as an integer-valued field (region index per cell).
LatticeField label_map(const RegionPartition& partition);

/// Group cells by label value, ordered by smallest member.
RegionPartition regions_from_label_map(const LatticeField& labels);

void write_fit_json(const FitResult& fit, const std::string& path, bool include_theta);
void write_leaves_csv(const RectPartition& partition, const std::string& path);
void write_trace_csv(const MergeTrace& trace, const std::string& path);

void write_bench_csv(const BenchResult& result, const std::string& path);
void write_bench_timings_csv(const BenchResult& result, const std::string& path);
void write_bench_summary_json(const BenchResult& result, const std::string& path);

BenchConfig read_bench_config(const std::string& path);

/// "mean(sd)" with one decimal, matching the benchmark tables.
std::string format_mean_sd(const Aggregate& a);

/// Deterministic grayscale image of a field (PGM, P2).
void write_field_pgm(const LatticeField& field, const std::string& path);

/// Deterministic palette image of a label map (PPM, P3).
void write_labels_ppm(const LatticeField& labels, const std::string& path);

std::vector<SamplePoint> read_points_csv(const std::string& path, int d);

}  // namespace latpart
