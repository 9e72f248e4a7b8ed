#include "latpart/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace latpart {

namespace {

constexpr std::int64_t kIndexBudget = std::int64_t(1) << 40;
constexpr double kMaxAbsValue = 1e8;

}  // namespace

LatticeShape LatticeShape::make(int dim, std::int64_t side) {
    if (dim < 1) throw shape_error("lattice dimension must be >= 1");
    if (side < 1) throw shape_error("lattice side length must be >= 1");
    std::int64_t count = 1;
    for (int i = 0; i < dim; ++i) {
        if (count > kIndexBudget / side)
            throw shape_error("lattice cell count exceeds addressable-index budget");
        count *= side;
    }
    LatticeShape s;
    s.dim = dim;
    s.side = side;
    s.cell_count = count;
    return s;
}

void LatticeShape::require_pow2() const {
    if (!side_is_pow2())
        throw shape_error("side length must be a power of 2 for dyadic estimators");
}

CellIndex LatticeShape::index_of(const Coord& c) const {
    if (static_cast<int>(c.size()) != dim)
        throw bounds_error("coordinate dimension mismatch");
    CellIndex idx = 0;
    for (int i = 0; i < dim; ++i) {
        if (c[i] < 1 || c[i] > side) throw bounds_error("coordinate out of lattice bounds");
        idx = idx * side + (c[i] - 1);
    }
    return idx;
}

Coord LatticeShape::coord_of(CellIndex idx) const {
    if (idx < 0 || idx >= cell_count) throw bounds_error("cell index out of range");
    Coord c(dim);
    for (int i = dim - 1; i >= 0; --i) {
        c[i] = idx % side + 1;
        idx /= side;
    }
    return c;
}

Rect::Rect(Coord lo_, Coord hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
    if (lo.size() != hi.size()) throw param_error("rect lo/hi dimension mismatch");
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (lo[i] > hi[i]) throw param_error("rect has lo > hi");
}

std::int64_t Rect::volume() const {
    std::int64_t v = 1;
    for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i] + 1;
    return v;
}

bool Rect::contains(const Coord& c) const {
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (c[i] < lo[i] || c[i] > hi[i]) return false;
    return true;
}

bool Rect::intersects(const Rect& o) const {
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (hi[i] < o.lo[i] || o.hi[i] < lo[i]) return false;
    return true;
}

void Rect::check_within(const LatticeShape& shape) const {
    if (dim() != shape.dim) throw bounds_error("rect dimension mismatch");
    for (int i = 0; i < dim(); ++i)
        if (lo[i] < 1 || hi[i] > shape.side) throw bounds_error("rect outside lattice bounds");
}

CellSet Rect::cells(const LatticeShape& shape) const {
    check_within(shape);
    CellSet out;
    out.reserve(static_cast<std::size_t>(volume()));
    Coord c = lo;
    for (;;) {
        out.push_back(shape.index_of(c));
        int axis = dim() - 1;
        while (axis >= 0 && c[axis] == hi[axis]) {
            c[axis] = lo[axis];
            --axis;
        }
        if (axis < 0) break;
        ++c[axis];
    }
    std::sort(out.begin(), out.end());
    return out;
}

Rect Rect::full(const LatticeShape& shape) {
    return Rect(Coord(shape.dim, 1), Coord(shape.dim, shape.side));
}

LatticeField::LatticeField(LatticeShape shape_, std::vector<double> values_)
    : shape(shape_), values(std::move(values_)) {
    if (static_cast<std::int64_t>(values.size()) != shape.cell_count)
        throw param_error("field value count does not match lattice size");
    for (double v : values)
        if (!std::isfinite(v)) throw param_error("field values must be finite");
}

LatticeField LatticeField::constant(const LatticeShape& shape, double value) {
    return LatticeField(shape, std::vector<double>(static_cast<std::size_t>(shape.cell_count), value));
}

PrefixSumTable::PrefixSumTable(const LatticeField& field) : shape_(field.shape) {
    for (double v : field.values)
        if (std::abs(v) > kMaxAbsValue)
            throw param_error("|value| > 1e8 not supported by prefix tables");

    const int d = shape_.dim;
    const std::int64_t n = shape_.side;
    pstride_.assign(d, 1);
    for (int i = d - 2; i >= 0; --i) pstride_[i] = pstride_[i + 1] * (n + 1);
    const std::int64_t padded = pstride_[0] * (n + 1);
    cum_.assign(static_cast<std::size_t>(padded), 0.0);
    cum_sq_.assign(static_cast<std::size_t>(padded), 0.0);

    // Scatter values into the padded array (coordinate c maps to offset c).
    Coord c(d, 1);
    for (CellIndex idx = 0; idx < shape_.cell_count; ++idx) {
        std::int64_t p = 0;
        for (int i = 0; i < d; ++i) p += c[i] * pstride_[i];
        const double v = field.values[static_cast<std::size_t>(idx)];
        cum_[static_cast<std::size_t>(p)] = v;
        cum_sq_[static_cast<std::size_t>(p)] = v * v;
        int axis = d - 1;
        while (axis >= 0 && c[axis] == n) {
            c[axis] = 1;
            --axis;
        }
        if (axis >= 0) ++c[axis];
    }

    // Running sums along each axis in turn.
    for (int axis = 0; axis < d; ++axis) {
        const std::int64_t stride = pstride_[axis];
        for (std::int64_t base = 0; base < padded; ++base) {
            const std::int64_t pos = (base / stride) % (n + 1);
            if (pos == 0) continue;
            cum_[static_cast<std::size_t>(base)] += cum_[static_cast<std::size_t>(base - stride)];
            cum_sq_[static_cast<std::size_t>(base)] += cum_sq_[static_cast<std::size_t>(base - stride)];
        }
    }
}

double PrefixSumTable::box_sum(const std::vector<double>& cum, const Rect& r) const {
    const int d = shape_.dim;
    double total = 0;
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
        std::int64_t p = 0;
        int bits = 0;
        for (int i = 0; i < d; ++i) {
            const bool low = (mask >> i) & 1u;
            bits += low;
            p += (low ? r.lo[i] - 1 : r.hi[i]) * pstride_[i];
        }
        total += (bits % 2 == 0 ? 1.0 : -1.0) * cum[static_cast<std::size_t>(p)];
    }
    return total;
}

RegionStats PrefixSumTable::stats(const Rect& r) const {
    r.check_within(shape_);
    RegionStats s;
    s.sum = box_sum(cum_, r);
    s.sum_sq = box_sum(cum_sq_, r);
    const double vol = static_cast<double>(r.volume());
    s.mean = s.sum / vol;
    s.sse = s.sum_sq - s.sum * s.sum / vol;
    if (s.sse < 0) {
        if (s.sse < -1e-9 * vol * std::max(1.0, s.sum_sq))
            throw std::logic_error("prefix table SSE cancellation beyond tolerance");
        s.sse = 0;
    }
    return s;
}

RegionStats region_stats(const PrefixSumTable& table, const Rect& r) { return table.stats(r); }

RegionStats region_stats(const LatticeField& field, const CellSet& cells) {
    if (cells.empty()) throw param_error("region_stats: empty cell set");
    RegionStats s;
    for (CellIndex i : cells) {
        if (i < 0 || i >= field.shape.cell_count) throw bounds_error("cell index out of range");
        const double v = field[i];
        s.sum += v;
        s.sum_sq += v * v;
    }
    const double vol = static_cast<double>(cells.size());
    s.mean = s.sum / vol;
    s.sse = 0;
    for (CellIndex i : cells) {
        const double dv = field[i] - s.mean;
        s.sse += dv * dv;
    }
    return s;
}

namespace {

ValidationReport coverage_check(const LatticeShape& shape,
                                const std::vector<const CellSet*>& groups) {
    std::vector<std::uint8_t> count(static_cast<std::size_t>(shape.cell_count), 0);
    for (const CellSet* g : groups) {
        for (CellIndex i : *g) {
            if (i < 0 || i >= shape.cell_count)
                return {false, i, "cell index outside lattice"};
            if (count[static_cast<std::size_t>(i)]++ != 0)
                return {false, i, "cell covered more than once"};
        }
    }
    for (CellIndex i = 0; i < shape.cell_count; ++i)
        if (count[static_cast<std::size_t>(i)] == 0) return {false, i, "cell not covered"};
    return {true, -1, ""};
}

}  // namespace

ValidationReport validate_partition(const RectPartition& p) {
    std::vector<CellSet> sets;
    sets.reserve(p.rects.size());
    for (const Rect& r : p.rects) {
        if (r.dim() != p.shape.dim) return {false, -1, "rect dimension mismatch"};
        for (int i = 0; i < r.dim(); ++i)
            if (r.lo[i] < 1 || r.hi[i] > p.shape.side)
                return {false, -1, "rect outside lattice bounds"};
        sets.push_back(r.cells(p.shape));
    }
    std::vector<const CellSet*> groups;
    for (const CellSet& s : sets) groups.push_back(&s);
    return coverage_check(p.shape, groups);
}

ValidationReport validate_partition(const RegionPartition& p) {
    for (const CellSet& r : p.regions)
        if (r.empty()) return {false, -1, "empty region"};
    std::vector<const CellSet*> groups;
    for (const CellSet& s : p.regions) groups.push_back(&s);
    return coverage_check(p.shape, groups);
}

void UndirectedGraph::add_edge(std::int64_t i, std::int64_t j) {
    if (i == j) throw param_error("self-loop not allowed");
    if (i < 0 || j < 0 || i >= node_count || j >= node_count)
        throw param_error("edge endpoint out of range");
    if (i > j) std::swap(i, j);
    if (std::find(edges.begin(), edges.end(), std::make_pair(i, j)) == edges.end())
        edges.emplace_back(i, j);
}

UnionFind::UnionFind(std::int64_t n) : parent_(static_cast<std::size_t>(n)), rank_(static_cast<std::size_t>(n), 0) {
    for (std::int64_t i = 0; i < n; ++i) parent_[static_cast<std::size_t>(i)] = i;
}

std::int64_t UnionFind::find(std::int64_t x) {
    std::int64_t root = x;
    while (parent_[static_cast<std::size_t>(root)] != root) root = parent_[static_cast<std::size_t>(root)];
    while (parent_[static_cast<std::size_t>(x)] != root) {
        std::int64_t next = parent_[static_cast<std::size_t>(x)];
        parent_[static_cast<std::size_t>(x)] = root;
        x = next;
    }
    return root;
}

void UnionFind::unite(std::int64_t a, std::int64_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[static_cast<std::size_t>(a)] < rank_[static_cast<std::size_t>(b)]) std::swap(a, b);
    parent_[static_cast<std::size_t>(b)] = a;
    if (rank_[static_cast<std::size_t>(a)] == rank_[static_cast<std::size_t>(b)]) ++rank_[static_cast<std::size_t>(a)];
}

std::vector<std::vector<std::int64_t>> connected_components(const UndirectedGraph& g) {
    UnionFind uf(g.node_count);
    for (const auto& [i, j] : g.edges) uf.unite(i, j);
    std::vector<std::vector<std::int64_t>> comps;
    std::vector<std::int64_t> comp_of_root(static_cast<std::size_t>(g.node_count), -1);
    for (std::int64_t i = 0; i < g.node_count; ++i) {
        const std::int64_t root = uf.find(i);
        std::int64_t& slot = comp_of_root[static_cast<std::size_t>(root)];
        if (slot < 0) {
            slot = static_cast<std::int64_t>(comps.size());
            comps.emplace_back();
        }
        comps[static_cast<std::size_t>(slot)].push_back(i);
    }
    // Nodes are visited ascending, so components are already ordered by
    // smallest member and each member list is sorted.
    return comps;
}

namespace {

double gain_from_stats(double vol_a, double mean_a, double vol_b, double mean_b) {
    const double diff = mean_a - mean_b;
    return vol_a * vol_b / (vol_a + vol_b) * diff * diff;
}

}  // namespace

double merge_gain(const PrefixSumTable& table, const Rect& a, const Rect& b) {
    if (a.intersects(b)) throw param_error("merge_gain: rectangles must be disjoint");
    const RegionStats sa = table.stats(a);
    const RegionStats sb = table.stats(b);
    return gain_from_stats(static_cast<double>(a.volume()), sa.mean,
                           static_cast<double>(b.volume()), sb.mean);
}

double merge_gain(const LatticeField& field, const CellSet& a, const CellSet& b) {
    if (a.empty() || b.empty()) throw param_error("merge_gain: empty cell set");
    CellSet common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    if (!common.empty()) throw param_error("merge_gain: cell sets must be disjoint");
    const RegionStats sa = region_stats(field, a);
    const RegionStats sb = region_stats(field, b);
    return gain_from_stats(static_cast<double>(a.size()), sa.mean,
                           static_cast<double>(b.size()), sb.mean);
}

double min_distance(const LatticeShape& shape, const CellSet& a, const CellSet& b) {
    if (a.empty() || b.empty()) throw param_error("min_distance: empty cell set");
    std::vector<Coord> ca, cb;
    ca.reserve(a.size());
    cb.reserve(b.size());
    for (CellIndex i : a) ca.push_back(shape.coord_of(i));
    for (CellIndex i : b) cb.push_back(shape.coord_of(i));
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (const Coord& p : ca) {
        for (const Coord& q : cb) {
            std::int64_t d2 = 0;
            for (int i = 0; i < shape.dim; ++i) {
                const std::int64_t g = p[i] - q[i];
                d2 += g * g;
            }
            best = std::min(best, d2);
        }
    }
    return std::sqrt(static_cast<double>(best));
}

double rect_distance(const Rect& a, const Rect& b) {
    std::int64_t d2 = 0;
    for (int i = 0; i < a.dim(); ++i) {
        std::int64_t gap = 0;
        if (b.lo[i] > a.hi[i]) gap = b.lo[i] - a.hi[i];
        else if (a.lo[i] > b.hi[i]) gap = a.lo[i] - b.hi[i];
        d2 += gap * gap;
    }
    return std::sqrt(static_cast<double>(d2));
}

bool rects_adjacent(const Rect& a, const Rect& b) {
    if (a.dim() != b.dim()) throw param_error("rects_adjacent: dimension mismatch");
    if (a.intersects(b)) throw param_error("rects_adjacent: rectangles must be disjoint");
    const int d = a.dim();
    for (int axis = 0; axis < d; ++axis) {
        const bool touch = (b.lo[axis] - a.hi[axis] == 1) || (a.lo[axis] - b.hi[axis] == 1);
        if (!touch) continue;
        bool a_in_b = true, b_in_a = true;
        for (int i = 0; i < d; ++i) {
            if (i == axis) continue;
            if (!(b.lo[i] <= a.lo[i] && a.hi[i] <= b.hi[i])) a_in_b = false;
            if (!(a.lo[i] <= b.lo[i] && b.hi[i] <= a.hi[i])) b_in_a = false;
        }
        if (a_in_b || b_in_a) return true;
    }
    return false;
}

}  // namespace latpart
