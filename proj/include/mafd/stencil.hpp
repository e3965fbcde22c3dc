#pragma once

#include <span>
#include <vector>

#include "mafd/grid.hpp"

namespace mafd {

/// Primitive integer lattice direction (p,q), gcd(|p|,|q|) = 1.
struct Direction {
    int p = 0;
    int q = 0;
    int len2() const { return p * p + q * q; }
    bool operator==(const Direction&) const = default;
};

/// Pair of exactly orthogonal integer directions; the counter-clockwise
/// perpendicular of a1 = (p,q) is a2 = (-q,p).
struct OrthogonalBasis {
    Direction a1;
    Direction a2;
    bool operator==(const OrthogonalBasis&) const = default;
};

/// All canonical orthogonal bases of primitive directions with components
/// bounded by the stencil width, plus the deduplicated offset set.
/// Width 2 yields the 17-point stencil (4 bases, 16 offsets + center).
class StencilSet {
public:
    StencilSet(int width, std::vector<OrthogonalBasis> bases);

    int width() const { return width_; }
    std::span<const OrthogonalBasis> bases() const { return bases_; }
    /// +-a over all bases, deduplicated; |offsets| + 1 = stencil point count.
    std::span<const Direction> offsets() const { return offsets_; }
    /// One representative per +-a pair (the one with p > 0, or p == 0 and q > 0).
    std::span<const Direction> directions() const { return directions_; }

private:
    int width_;
    std::vector<OrthogonalBasis> bases_;
    std::vector<Direction> offsets_;
    std::vector<Direction> directions_;
};

/// Enumerates all canonical bases with max component <= width. The canonical
/// representative of each sign/order class has a1 in the cone {p > 0, q >= 0}
/// and a2 its counter-clockwise perpendicular. Throws for width < 1.
StencilSet enumerate_bases(int width);

/// Bases whose four neighbors x +- a1, x +- a2 stay on the closed lattice
/// (boundary nodes allowed; their values come from the Dirichlet data).
/// x must be interior; the result always contains the axis basis.
std::vector<OrthogonalBasis> admissible_bases(const Grid& grid, GridIndex x,
                                              const StencilSet& stencil);

}  // namespace mafd
