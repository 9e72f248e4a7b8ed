#include "latpart/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace latpart {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::int64_t kMaxDpStates = 100'000'000;
constexpr std::int64_t kOracleMaxCells = 256;

// Dyadic intervals of [1, n] in heap order: id 0 is [1, n], children of id i
// are 2i+1 and 2i+2.  With n a power of 2 this is a complete tree of 2n-1
// nodes whose leaves are singletons.
struct IntervalTable {
    std::vector<std::int64_t> lo;
    std::vector<std::int64_t> hi;

    explicit IntervalTable(std::int64_t n) {
        const std::int64_t count = 2 * n - 1;
        lo.resize(static_cast<std::size_t>(count));
        hi.resize(static_cast<std::size_t>(count));
        lo[0] = 1;
        hi[0] = n;
        for (std::int64_t i = 0; i < count; ++i) {
            if (hi[i] == lo[i]) continue;
            const std::int64_t mid = (lo[i] + hi[i]) / 2;
            lo[2 * i + 1] = lo[i];
            hi[2 * i + 1] = mid;
            lo[2 * i + 2] = mid + 1;
            hi[2 * i + 2] = hi[i];
        }
    }

    std::int64_t length(std::int64_t id) const { return hi[id] - lo[id] + 1; }
};

class DyadicDp {
  public:
    DyadicDp(const LatticeField& y, double lambda, double eta)
        : y_(y), table_(y), lambda_(lambda), eta_(eta),
          dim_(y.shape.dim), radix_(2 * y.shape.side - 1), intervals_(y.shape.side) {
        std::int64_t states = 1;
        for (int i = 0; i < dim_; ++i) {
            if (states > kMaxDpStates / radix_)
                throw shape_error("dyadic DP state table exceeds memory budget");
            states *= radix_;
        }
        pow_.assign(static_cast<std::size_t>(dim_), 1);
        for (int i = 1; i < dim_; ++i) pow_[i] = pow_[i - 1] * radix_;
        cost_.assign(static_cast<std::size_t>(states), 0.0);
        choice_.assign(static_cast<std::size_t>(states), kUnvisited);
        scratch_.lo.assign(static_cast<std::size_t>(dim_), 1);
        scratch_.hi.assign(static_cast<std::size_t>(dim_), 1);
    }

    FitResult run() {
        const double root_cost = solve(0);
        if (!std::isfinite(root_cost))
            throw infeasible_error("no feasible dyadic partition under the size constraint");

        RectPartition partition{y_.shape, {}};
        collect(0, partition.rects);

        LatticeField theta = LatticeField::constant(y_.shape, 0.0);
        for (const Rect& r : partition.rects) {
            const double mean = table_.stats(r).mean;
            for (CellIndex c : r.cells(y_.shape)) theta[c] = mean;
        }
        FitResult out{std::move(theta), std::move(partition), root_cost,
                      static_cast<std::int64_t>(0), lambda_};
        out.leaf_count = static_cast<std::int64_t>(out.partition.rects.size());
        return out;
    }

  private:
    static constexpr std::int8_t kUnvisited = -3;
    static constexpr std::int8_t kLeaf = -1;

    void load_rect(std::int64_t state) {
        for (int i = 0; i < dim_; ++i) {
            const std::int64_t id = state % radix_;
            state /= radix_;
            scratch_.lo[static_cast<std::size_t>(i)] = intervals_.lo[id];
            scratch_.hi[static_cast<std::size_t>(i)] = intervals_.hi[id];
        }
    }

    double solve(std::int64_t state) {
        auto s = static_cast<std::size_t>(state);
        if (choice_[s] != kUnvisited) return cost_[s];

        load_rect(state);
        const RegionStats st = table_.stats(scratch_);
        const double vol = static_cast<double>(scratch_.volume());

        double best = vol >= eta_ ? 0.5 * st.sse + lambda_ : kInf;
        std::int8_t choice = kLeaf;
        std::int64_t ids = state;
        for (int axis = 0; axis < dim_; ++axis) {
            const std::int64_t id = ids % radix_;
            ids /= radix_;
            if (intervals_.length(id) <= 1) continue;
            const std::int64_t base = state - id * pow_[axis];
            const double c = solve(base + (2 * id + 1) * pow_[axis]) +
                             solve(base + (2 * id + 2) * pow_[axis]);
            if (c < best) {
                best = c;
                choice = static_cast<std::int8_t>(axis);
            }
        }
        cost_[s] = best;
        choice_[s] = choice;
        return best;
    }

    void collect(std::int64_t state, std::vector<Rect>& out) {
        const std::int8_t ch = choice_[static_cast<std::size_t>(state)];
        if (ch == kLeaf) {
            load_rect(state);
            out.emplace_back(scratch_.lo, scratch_.hi);
            return;
        }
        const int axis = ch;
        std::int64_t id = state;
        for (int i = 0; i < axis; ++i) id /= radix_;
        id %= radix_;
        const std::int64_t base = state - id * pow_[axis];
        collect(base + (2 * id + 1) * pow_[axis], out);
        collect(base + (2 * id + 2) * pow_[axis], out);
    }

    const LatticeField& y_;
    PrefixSumTable table_;
    double lambda_;
    double eta_;
    int dim_;
    std::int64_t radix_;
    IntervalTable intervals_;
    std::vector<std::int64_t> pow_;
    std::vector<double> cost_;
    std::vector<std::int8_t> choice_;
    Rect scratch_;
};

void check_fit_args(const LatticeField& y, double lambda) {
    y.shape.require_pow2();
    if (!(lambda > 0)) throw param_error("lambda must be > 0");
}

RegionStats direct_stats(const LatticeField& y, const Rect& r) {
    RegionStats s;
    for (CellIndex c : r.cells(y.shape)) {
        const double v = y[c];
        s.sum += v;
        s.sum_sq += v * v;
    }
    const double vol = static_cast<double>(r.volume());
    s.mean = s.sum / vol;
    s.sse = std::max(0.0, s.sum_sq - s.sum * s.sum / vol);
    return s;
}

Rect split_child(const Rect& r, int axis, bool upper) {
    Rect out = r;
    const std::int64_t mid = (r.lo[axis] + r.hi[axis]) / 2;
    if (upper) out.lo[axis] = mid + 1;
    else out.hi[axis] = mid;
    return out;
}

struct OracleOut {
    double cost = kInf;
    std::vector<Rect> rects;
};

OracleOut oracle_solve(const LatticeField& y, const Rect& r, double lambda, double eta) {
    const RegionStats st = direct_stats(y, r);
    OracleOut best;
    if (static_cast<double>(r.volume()) >= eta) {
        best.cost = 0.5 * st.sse + lambda;
        best.rects = {r};
    }
    for (int axis = 0; axis < r.dim(); ++axis) {
        if (r.hi[axis] == r.lo[axis]) continue;
        OracleOut left = oracle_solve(y, split_child(r, axis, false), lambda, eta);
        OracleOut right = oracle_solve(y, split_child(r, axis, true), lambda, eta);
        if (left.cost + right.cost < best.cost) {
            best.cost = left.cost + right.cost;
            best.rects = std::move(left.rects);
            best.rects.insert(best.rects.end(), right.rects.begin(), right.rects.end());
        }
    }
    return best;
}

FitResult result_from_leaves(const LatticeField& y, std::vector<Rect> leaves,
                             double cost, double lambda) {
    LatticeField theta = LatticeField::constant(y.shape, 0.0);
    for (const Rect& r : leaves) {
        const RegionStats st = direct_stats(y, r);
        for (CellIndex c : r.cells(y.shape)) theta[c] = st.mean;
    }
    RectPartition partition{y.shape, std::move(leaves)};
    FitResult out{std::move(theta), std::move(partition), cost, 0, lambda};
    out.leaf_count = static_cast<std::int64_t>(out.partition.rects.size());
    return out;
}

}  // namespace

FitResult dcart_fit(const LatticeField& y, double lambda) {
    check_fit_args(y, lambda);
    return DyadicDp(y, lambda, 1.0).run();
}

FitResult constrained_dcart_fit(const LatticeField& y, double lambda1, double eta) {
    check_fit_args(y, lambda1);
    if (!(eta >= 1)) throw param_error("eta must be >= 1");
    if (eta > static_cast<double>(y.shape.cell_count))
        throw infeasible_error("eta exceeds the lattice size");
    return DyadicDp(y, lambda1, eta).run();
}

std::int64_t k_dyad(const LatticeField& theta) {
    theta.shape.require_pow2();

    const std::int64_t n = theta.shape.side;
    const int d = theta.shape.dim;
    const std::int64_t radix = 2 * n - 1;
    std::int64_t states = 1;
    for (int i = 0; i < d; ++i) {
        if (states > kMaxDpStates / radix)
            throw shape_error("dyadic DP state table exceeds memory budget");
        states *= radix;
    }
    IntervalTable intervals(n);
    std::vector<std::int64_t> pow(static_cast<std::size_t>(d), 1);
    for (int i = 1; i < d; ++i) pow[i] = pow[i - 1] * radix;
    std::vector<std::int64_t> memo(static_cast<std::size_t>(states), -1);

    auto rect_of = [&](std::int64_t state) {
        Coord lo(d), hi(d);
        for (int i = 0; i < d; ++i) {
            const std::int64_t id = state % radix;
            state /= radix;
            lo[i] = intervals.lo[id];
            hi[i] = intervals.hi[id];
        }
        return Rect(std::move(lo), std::move(hi));
    };

    auto is_constant = [&](const Rect& r) {
        const CellSet cells = r.cells(theta.shape);
        const double first = theta[cells.front()];
        for (CellIndex c : cells)
            if (theta[c] != first) return false;
        return true;
    };

    auto solve = [&](auto&& self, std::int64_t state) -> std::int64_t {
        std::int64_t& m = memo[static_cast<std::size_t>(state)];
        if (m >= 0) return m;
        const Rect r = rect_of(state);
        if (is_constant(r)) return m = 1;
        std::int64_t best = std::numeric_limits<std::int64_t>::max();
        std::int64_t ids = state;
        for (int axis = 0; axis < d; ++axis) {
            const std::int64_t id = ids % radix;
            ids /= radix;
            if (intervals.length(id) <= 1) continue;
            const std::int64_t base = state - id * pow[axis];
            best = std::min(best, self(self, base + (2 * id + 1) * pow[axis]) +
                                      self(self, base + (2 * id + 2) * pow[axis]));
        }
        return m = best;
    };
    return solve(solve, 0);
}

FitResult exhaustive_dyadic_oracle(const LatticeField& y, double lambda, double eta) {
    check_fit_args(y, lambda);
    if (y.shape.cell_count > kOracleMaxCells)
        throw param_error("exhaustive_dyadic_oracle refuses lattices with N > 256");
    if (eta > static_cast<double>(y.shape.cell_count))
        throw infeasible_error("eta exceeds the lattice size");
    OracleOut best = oracle_solve(y, Rect::full(y.shape), lambda, eta);
    if (!std::isfinite(best.cost))
        throw infeasible_error("no feasible dyadic partition under the size constraint");
    return result_from_leaves(y, std::move(best.rects), best.cost, lambda);
}

FitResult exhaustive_rect_oracle(const LatticeField& y, double lambda) {
    if (!(lambda > 0)) throw param_error("lambda must be > 0");
    if (y.shape.dim != 2 || y.shape.side > 4)
        throw param_error("exhaustive_rect_oracle refuses instances beyond d=2, n<=4");

    const int n = static_cast<int>(y.shape.side);
    const int cells = n * n;
    const std::uint32_t full = cells == 32 ? 0xffffffffu : ((1u << cells) - 1);

    double best_cost = kInf;
    std::vector<Rect> best_rects;
    std::vector<Rect> current;

    auto rect_sse = [&](int r0, int c0, int r1, int c1, double& sse_out) {
        double sum = 0, sum_sq = 0;
        for (int r = r0; r <= r1; ++r)
            for (int c = c0; c <= c1; ++c) {
                const double v = y.values[static_cast<std::size_t>(r * n + c)];
                sum += v;
                sum_sq += v * v;
            }
        const double vol = static_cast<double>((r1 - r0 + 1) * (c1 - c0 + 1));
        sse_out = std::max(0.0, sum_sq - sum * sum / vol);
    };

    auto rec = [&](auto&& self, std::uint32_t mask, double cost) -> void {
        if (cost >= best_cost) return;
        if (mask == full) {
            best_cost = cost;
            best_rects = current;
            return;
        }
        int f = 0;
        while ((mask >> f) & 1u) ++f;
        const int r0 = f / n, c0 = f % n;
        for (int r1 = r0; r1 < n; ++r1) {
            // Widening rows: bail out once a column range is blocked.
            for (int c1 = c0; c1 < n; ++c1) {
                bool free = true;
                std::uint32_t add = 0;
                for (int r = r0; r <= r1 && free; ++r)
                    for (int c = c0; c <= c1; ++c) {
                        const std::uint32_t bit = 1u << (r * n + c);
                        if (mask & bit) {
                            free = false;
                            break;
                        }
                        add |= bit;
                    }
                if (!free) continue;
                double sse = 0;
                rect_sse(r0, c0, r1, c1, sse);
                current.push_back(Rect({r0 + 1, c0 + 1}, {r1 + 1, c1 + 1}));
                self(self, mask | add, cost + 0.5 * sse + lambda);
                current.pop_back();
            }
        }
    };
    rec(rec, 0u, 0.0);
    return result_from_leaves(y, std::move(best_rects), best_cost, lambda);
}

namespace {

std::vector<std::vector<Rect>> enum_rec(const Rect& r, std::int64_t* visited) {
    if (r.volume() == 1) return {{r}};
    std::vector<std::vector<Rect>> out;
    out.push_back({r});
    for (int axis = 0; axis < r.dim(); ++axis) {
        if (r.hi[axis] == r.lo[axis]) continue;
        const auto left = enum_rec(split_child(r, axis, false), visited);
        const auto right = enum_rec(split_child(r, axis, true), visited);
        for (const auto& l : left)
            for (const auto& rr : right) {
                std::vector<Rect> combined = l;
                combined.insert(combined.end(), rr.begin(), rr.end());
                out.push_back(std::move(combined));
            }
    }
    if (visited) *visited += static_cast<std::int64_t>(out.size());
    return out;
}

}  // namespace

std::vector<std::vector<Rect>> enumerate_dyadic_partitions(const LatticeShape& shape,
                                                           std::int64_t* visited) {
    shape.require_pow2();
    if (shape.cell_count > 16)
        throw param_error("enumerate_dyadic_partitions refuses lattices with N > 16");
    return enum_rec(Rect::full(shape), visited);
}

}  // namespace latpart
