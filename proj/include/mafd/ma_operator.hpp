#pragma once

#include <cstdint>

#include "mafd/grid.hpp"
#include "mafd/stencil.hpp"

namespace mafd {

/// Wide-stencil Monge-Ampere operator configuration. epsilon adds the
/// properness term epsilon_sign * epsilon * v(x); the +1 sign follows the
/// written formula, -1 is the strictly-proper variant.
struct OperatorConfig {
    StencilSet stencil = enumerate_bases(2);
    double epsilon = 1e-14;
    double epsilon_sign = +1.0;
};

/// Closed axis-aligned box used for discrete Borel measures.
struct BorelBox {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;

    bool contains(Point p) const {
        return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
    }
};

/// Undivided centered second difference v(x+a) - 2 v(x) + v(x-a).
/// Throws std::out_of_range if a neighbor falls off the lattice.
double second_difference(const MeshFunction& v, GridIndex x, Direction a);

/// M_h[v](x): min over admissible bases of the product of
/// max(second_difference / (|a|^2 h^2), 0), plus the properness term.
double ma_apply(const MeshFunction& v, GridIndex x, const OperatorConfig& cfg);

/// M_h[v] on every interior node (0 on the boundary).
MeshFunction ma_apply_field(const MeshFunction& v, const OperatorConfig& cfg);

/// Interior: ma_apply(v) - f. Boundary: 0 in the two-argument form, v - g in
/// the three-argument form (g supplies Dirichlet values on boundary nodes).
MeshFunction ma_residual(const MeshFunction& v, const MeshFunction& f, const OperatorConfig& cfg);
MeshFunction ma_residual(const MeshFunction& v, const MeshFunction& f, const MeshFunction& g,
                         const OperatorConfig& cfg);

/// Nonnegativity of second differences along every stencil direction
/// admissible at every interior node. Magnitudes within a few ulps of zero
/// count as nonnegative so that restrictions of convex functions with flat
/// lattice directions are not rejected by rounding noise.
bool is_discrete_convex(const MeshFunction& v, const StencilSet& stencil);

/// Full quantifier over all integer directions for which the second
/// difference is defined; O(N^2) per node, intended for small grids.
bool is_discrete_convex_all_directions(const MeshFunction& v);

/// h^2 * sum of ma_apply over interior nodes inside the closed box.
double discrete_ma_measure(const MeshFunction& v, const BorelBox& box, const OperatorConfig& cfg);

/// h^2 * |interior|: the constant C_0 bounding discrete measure differences.
double c0_bound(const Grid& grid);

/// Empirical Lipschitz lower bound: max over `trials` sampled pairs (v, w)
/// with node values uniform in [-1,1] of
///   max_norm(M_h[v] - M_h[w], interior) / max_norm(v - w, all).
double lipschitz_estimate(const OperatorConfig& cfg, const GridPtr& grid, int trials,
                          std::uint64_t seed);

}  // namespace mafd
