#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "latpart/errors.hpp"

namespace latpart {

using CellIndex = std::int64_t;
using Coord = std::vector<std::int64_t>;  // 1-based per-axis coordinates
using CellSet = std::vector<CellIndex>;   // sorted, unique

/// Square d-dimensional lattice {1,...,n}^d.  Cells are stored row-major
/// with axis 0 slowest.
struct LatticeShape {
    int dim = 0;
    std::int64_t side = 0;
    std::int64_t cell_count = 0;

    static LatticeShape make(int dim, std::int64_t side);

    bool side_is_pow2() const { return side > 0 && (side & (side - 1)) == 0; }
    void require_pow2() const;

    CellIndex index_of(const Coord& c) const;
    Coord coord_of(CellIndex idx) const;

    bool operator==(const LatticeShape& o) const {
        return dim == o.dim && side == o.side;
    }
    bool operator!=(const LatticeShape& o) const { return !(*this == o); }
};

/// Axis-aligned integer box, closed on both ends, 1-based.
struct Rect {
    Coord lo;
    Coord hi;

    Rect() = default;
    Rect(Coord lo_, Coord hi_);

    int dim() const { return static_cast<int>(lo.size()); }
    std::int64_t volume() const;
    bool contains(const Coord& c) const;
    bool intersects(const Rect& o) const;
    void check_within(const LatticeShape& shape) const;

    /// All cell indices inside the rect, sorted ascending.
    CellSet cells(const LatticeShape& shape) const;

    static Rect full(const LatticeShape& shape);

    bool operator==(const Rect& o) const { return lo == o.lo && hi == o.hi; }
};

/// Dense real-valued signal on a lattice.  Entries must be finite.
struct LatticeField {
    LatticeShape shape;
    std::vector<double> values;

    LatticeField() = default;  // empty placeholder, no valid shape
    LatticeField(LatticeShape shape_, std::vector<double> values_);

    double operator[](CellIndex i) const { return values[static_cast<std::size_t>(i)]; }
    double& operator[](CellIndex i) { return values[static_cast<std::size_t>(i)]; }

    static LatticeField constant(const LatticeShape& shape, double value);
};

struct RegionStats {
    double sum = 0;
    double sum_sq = 0;
    double mean = 0;
    double sse = 0;
};

/// Cumulative sums of values and squared values with one layer of zero
/// padding, giving O(2^d) rectangle sum queries.
class PrefixSumTable {
  public:
    explicit PrefixSumTable(const LatticeField& field);

    const LatticeShape& shape() const { return shape_; }
    RegionStats stats(const Rect& r) const;

  private:
    double box_sum(const std::vector<double>& cum, const Rect& r) const;

    LatticeShape shape_;
    std::vector<std::int64_t> pstride_;
    std::vector<double> cum_;
    std::vector<double> cum_sq_;
};

RegionStats region_stats(const PrefixSumTable& table, const Rect& r);

/// Direct statistics over an arbitrary cell set.
RegionStats region_stats(const LatticeField& field, const CellSet& cells);

struct RectPartition {
    LatticeShape shape;
    std::vector<Rect> rects;
};

struct RegionPartition {
    LatticeShape shape;
    std::vector<CellSet> regions;
};

struct ValidationReport {
    bool ok = true;
    CellIndex cell = -1;  // first offending cell if !ok
    std::string message;
};

ValidationReport validate_partition(const RectPartition& p);
ValidationReport validate_partition(const RegionPartition& p);

struct UndirectedGraph {
    std::int64_t node_count = 0;
    std::vector<std::pair<std::int64_t, std::int64_t>> edges;  // i < j, unique

    void add_edge(std::int64_t i, std::int64_t j);
};

/// Components sorted by smallest member; members sorted ascending.
std::vector<std::vector<std::int64_t>> connected_components(const UndirectedGraph& g);

class UnionFind {
  public:
    explicit UnionFind(std::int64_t n);
    std::int64_t find(std::int64_t x);
    void unite(std::int64_t a, std::int64_t b);

  private:
    std::vector<std::int64_t> parent_;
    std::vector<std::int64_t> rank_;
};

/// SSE increase from pooling two disjoint sets:
/// (|I||J|/(|I|+|J|)) * (mean_I - mean_J)^2.
double merge_gain(const PrefixSumTable& table, const Rect& a, const Rect& b);
double merge_gain(const LatticeField& field, const CellSet& a, const CellSet& b);

/// Euclidean min distance between two non-empty cell sets.
double min_distance(const LatticeShape& shape, const CellSet& a, const CellSet& b);

/// Closed-form min cell distance between two boxes.
double rect_distance(const Rect& a, const Rect& b);

/// Adjacency of two disjoint rectangles: they touch along some axis with
/// offset one and one cross-section contains the other.
bool rects_adjacent(const Rect& a, const Rect& b);

}  // namespace latpart
