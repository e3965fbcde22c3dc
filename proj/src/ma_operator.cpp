#include "mafd/ma_operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mafd/rng.hpp"

namespace mafd {

namespace {

// Per-grid evaluation context: admissible basis lists depend only on the
// clamped distances to the boundary, so a (W+1)^2 table covers every node.
struct OperatorContext {
    const Grid* grid;
    const OperatorConfig* cfg;
    int width;
    std::ptrdiff_t stride;  // node id stride of direction (p,q) = p*stride_i + q
    std::vector<double> len2h2;                // |a|^2 h^2 per basis direction pair
    std::vector<std::vector<int>> admissible;  // (W+1)^2 lists of basis indices

    OperatorContext(const Grid& g, const OperatorConfig& c) : grid(&g), cfg(&c) {
        if (!(c.epsilon >= 0.0)) {
            throw std::invalid_argument("operator: epsilon must be nonnegative");
        }
        width = c.stencil.width();
        stride = g.ny() + 1;
        const double h2 = g.h() * g.h();
        for (const OrthogonalBasis& b : c.stencil.bases()) {
            len2h2.push_back(b.a1.len2() * h2);
            len2h2.push_back(b.a2.len2() * h2);
        }
        admissible.resize(static_cast<std::size_t>(width + 1) * (width + 1));
        for (int di = 0; di <= width; ++di) {
            for (int dj = 0; dj <= width; ++dj) {
                auto& list = admissible[static_cast<std::size_t>(di) * (width + 1) + dj];
                const auto bases = c.stencil.bases();
                for (int k = 0; k < static_cast<int>(bases.size()); ++k) {
                    const OrthogonalBasis& b = bases[k];
                    if (std::abs(b.a1.p) <= di && std::abs(b.a1.q) <= dj &&
                        std::abs(b.a2.p) <= di && std::abs(b.a2.q) <= dj) {
                        list.push_back(k);
                    }
                }
            }
        }
    }

    const std::vector<int>& bases_at(GridIndex x) const {
        const int di = std::min({x.i, grid->nx() - x.i, width});
        const int dj = std::min({x.j, grid->ny() - x.j, width});
        return admissible[static_cast<std::size_t>(di) * (width + 1) + dj];
    }

    double value_at(const double* v, GridIndex x) const {
        const std::size_t id = grid->node_id(x);
        const double center2 = 2.0 * v[id];
        double best = std::numeric_limits<double>::infinity();
        const auto bases = cfg->stencil.bases();
        for (int k : bases_at(x)) {
            const OrthogonalBasis& b = bases[k];
            const std::ptrdiff_t s1 = b.a1.p * stride + b.a1.q;
            const double d1 = v[id + s1] - center2 + v[id - s1];
            const double f1 = std::max(d1 / len2h2[2 * k], 0.0);
            if (f1 == 0.0) {  // products are nonnegative, so the min is 0
                best = 0.0;
                break;
            }
            const std::ptrdiff_t s2 = b.a2.p * stride + b.a2.q;
            const double d2 = v[id + s2] - center2 + v[id - s2];
            const double f2 = std::max(d2 / len2h2[2 * k + 1], 0.0);
            best = std::min(best, f1 * f2);
            if (best == 0.0) break;
        }
        if (cfg->epsilon > 0.0) best += cfg->epsilon_sign * cfg->epsilon * v[id];
        return best;
    }
};

}  // namespace

double second_difference(const MeshFunction& v, GridIndex x, Direction a) {
    const Grid& grid = *v.grid();
    const GridIndex plus{x.i + a.p, x.j + a.q};
    const GridIndex minus{x.i - a.p, x.j - a.q};
    if (!grid.contains(plus) || !grid.contains(minus)) {
        throw std::out_of_range("second_difference: neighbor off the lattice");
    }
    return v[plus] - 2.0 * v[x] + v[minus];
}

double ma_apply(const MeshFunction& v, GridIndex x, const OperatorConfig& cfg) {
    if (!v.grid()->is_interior(x)) {
        throw std::invalid_argument("ma_apply: node is not interior");
    }
    OperatorContext ctx(*v.grid(), cfg);
    return ctx.value_at(v.values().data(), x);
}

MeshFunction ma_apply_field(const MeshFunction& v, const OperatorConfig& cfg) {
    OperatorContext ctx(*v.grid(), cfg);
    MeshFunction out(v.grid());
    const double* data = v.values().data();
    for (const GridIndex& x : v.grid()->interior()) out[x] = ctx.value_at(data, x);
    return out;
}

MeshFunction ma_residual(const MeshFunction& v, const MeshFunction& f, const OperatorConfig& cfg) {
    if (!v.same_grid(f)) throw std::invalid_argument("ma_residual: grid mismatch");
    OperatorContext ctx(*v.grid(), cfg);
    MeshFunction out(v.grid());
    const double* data = v.values().data();
    for (const GridIndex& x : v.grid()->interior()) out[x] = ctx.value_at(data, x) - f[x];
    return out;
}

MeshFunction ma_residual(const MeshFunction& v, const MeshFunction& f, const MeshFunction& g,
                         const OperatorConfig& cfg) {
    if (!v.same_grid(g)) throw std::invalid_argument("ma_residual: grid mismatch");
    MeshFunction out = ma_residual(v, f, cfg);
    for (const GridIndex& x : v.grid()->boundary()) out[x] = v[x] - g[x];
    return out;
}

namespace {

// Second differences of convex restrictions can round to a few ulps below
// zero along flat lattice directions; treat those as nonnegative.
bool nonnegative_up_to_rounding(const MeshFunction& v, GridIndex x, Direction a) {
    const GridIndex plus{x.i + a.p, x.j + a.q};
    const GridIndex minus{x.i - a.p, x.j - a.q};
    const double d2 = v[plus] - 2.0 * v[x] + v[minus];
    const double scale = std::abs(v[plus]) + 2.0 * std::abs(v[x]) + std::abs(v[minus]);
    return d2 >= -16.0 * std::numeric_limits<double>::epsilon() * scale;
}

}  // namespace

bool is_discrete_convex(const MeshFunction& v, const StencilSet& stencil) {
    const Grid& grid = *v.grid();
    for (const GridIndex& x : grid.interior()) {
        for (const Direction& a : stencil.directions()) {
            if (!grid.contains({x.i + a.p, x.j + a.q}) || !grid.contains({x.i - a.p, x.j - a.q}))
                continue;
            if (!nonnegative_up_to_rounding(v, x, a)) return false;
        }
    }
    return true;
}

bool is_discrete_convex_all_directions(const MeshFunction& v) {
    const Grid& grid = *v.grid();
    for (const GridIndex& x : grid.interior()) {
        const int pmax = std::min(x.i, grid.nx() - x.i);
        const int qmax = std::min(x.j, grid.ny() - x.j);
        for (int p = -pmax; p <= pmax; ++p) {
            for (int q = p > 0 ? 0 : 1; q <= qmax; ++q) {  // one representative per +-e pair
                if (!nonnegative_up_to_rounding(v, x, {p, q})) return false;
            }
        }
    }
    return true;
}

double discrete_ma_measure(const MeshFunction& v, const BorelBox& box, const OperatorConfig& cfg) {
    if (box.x0 > box.x1 || box.y0 > box.y1) {
        throw std::invalid_argument("discrete_ma_measure: malformed box");
    }
    const Grid& grid = *v.grid();
    OperatorContext ctx(grid, cfg);
    const double* data = v.values().data();
    double sum = 0.0;
    for (const GridIndex& x : grid.interior()) {
        if (box.contains(grid.position(x))) sum += ctx.value_at(data, x);
    }
    return grid.h() * grid.h() * sum;
}

double c0_bound(const Grid& grid) {
    return grid.h() * grid.h() * static_cast<double>(grid.interior().size());
}

double lipschitz_estimate(const OperatorConfig& cfg, const GridPtr& grid, int trials,
                          std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("lipschitz_estimate: trials must be >= 1");
    Rng rng(seed);
    double best = 0.0;
    MeshFunction v(grid), w(grid);
    for (int t = 0; t < trials; ++t) {
        for (double& x : v.values()) x = rng.next_symmetric();
        for (double& x : w.values()) x = rng.next_symmetric();
        const double den = max_norm_diff(v, w, Region::All);
        if (den == 0.0) continue;
        const double num =
            max_norm_diff(ma_apply_field(v, cfg), ma_apply_field(w, cfg), Region::Interior);
        best = std::max(best, num / den);
    }
    return best;
}

}  // namespace mafd
