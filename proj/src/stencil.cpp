#include "mafd/stencil.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>
#include <stdexcept>

namespace mafd {

namespace {

bool direction_less(const Direction& a, const Direction& b) {
    if (a.len2() != b.len2()) return a.len2() < b.len2();
    if (a.p != b.p) return a.p < b.p;
    return a.q < b.q;
}

}  // namespace

StencilSet::StencilSet(int width, std::vector<OrthogonalBasis> bases)
    : width_(width), bases_(std::move(bases)) {
    for (const OrthogonalBasis& b : bases_) {
        for (const Direction& a : {b.a1, b.a2}) {
            offsets_.push_back(a);
            offsets_.push_back({-a.p, -a.q});
            directions_.push_back(a.p > 0 || (a.p == 0 && a.q > 0) ? a
                                                                   : Direction{-a.p, -a.q});
        }
    }
    std::sort(offsets_.begin(), offsets_.end(), direction_less);
    offsets_.erase(std::unique(offsets_.begin(), offsets_.end()), offsets_.end());
    std::sort(directions_.begin(), directions_.end(), direction_less);
    directions_.erase(std::unique(directions_.begin(), directions_.end()), directions_.end());
}

StencilSet enumerate_bases(int width) {
    if (width < 1) throw std::invalid_argument("stencil: width must be >= 1");
    // One canonical basis per primitive direction in the cone {p > 0, q >= 0};
    // its counter-clockwise perpendicular (-q, p) stays within the width bound.
    std::vector<OrthogonalBasis> bases;
    for (int p = 1; p <= width; ++p) {
        for (int q = 0; q <= width; ++q) {
            if (std::gcd(p, q) != 1) continue;
            bases.push_back({{p, q}, {-q, p}});
        }
    }
    std::sort(bases.begin(), bases.end(),
              [](const OrthogonalBasis& a, const OrthogonalBasis& b) {
                  return direction_less(a.a1, b.a1);
              });
    return StencilSet(width, std::move(bases));
}

std::vector<OrthogonalBasis> admissible_bases(const Grid& grid, GridIndex x,
                                              const StencilSet& stencil) {
    if (!grid.is_interior(x)) {
        throw std::invalid_argument("admissible_bases: node is not interior");
    }
    const int di = std::min(x.i, grid.nx() - x.i);
    const int dj = std::min(x.j, grid.ny() - x.j);
    std::vector<OrthogonalBasis> out;
    out.reserve(stencil.bases().size());
    for (const OrthogonalBasis& b : stencil.bases()) {
        const bool ok = std::abs(b.a1.p) <= di && std::abs(b.a1.q) <= dj &&
                        std::abs(b.a2.p) <= di && std::abs(b.a2.q) <= dj;
        if (ok) out.push_back(b);
    }
    // The axis basis fits at every interior node of a rectangle.
    assert(!out.empty());
    return out;
}

}  // namespace mafd
