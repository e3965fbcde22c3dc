#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace mafd {

/// Axis-aligned rectangle [ax,bx] x [ay,by].
struct Rect {
    double ax = 0.0;
    double ay = 0.0;
    double bx = 1.0;
    double by = 1.0;

    double width() const { return bx - ax; }
    double height() const { return by - ay; }
    bool operator==(const Rect&) const = default;
};

/// A rectangular domain together with a mesh length h.
/// h must divide both side lengths (so boundary lattice nodes lie exactly
/// on the boundary of the rectangle).
struct GridSpec {
    Rect domain;
    double h = 0.0;
    bool operator==(const GridSpec&) const = default;
};

/// Integer lattice coordinates of a node; position = (ax + i*h, ay + j*h).
struct GridIndex {
    int i = 0;
    int j = 0;
    bool operator==(const GridIndex&) const = default;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

enum class Region { Interior, Boundary, All };

/// Lattice of a rectangular domain split into interior and boundary nodes.
/// Node ordering is row-major by (i,j) with i outermost; this ordering is
/// used everywhere (value storage, CSV dumps, tie-breaking).
class Grid {
public:
    Grid(const GridSpec& spec, int nx, int ny);

    const GridSpec& spec() const { return spec_; }
    double h() const { return spec_.h; }
    /// Divisions per axis; the lattice is (nx+1) x (ny+1) nodes.
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    std::size_t num_nodes() const { return static_cast<std::size_t>(nx_ + 1) * (ny_ + 1); }

    std::span<const GridIndex> interior() const { return interior_; }
    std::span<const GridIndex> boundary() const { return boundary_; }

    bool contains(GridIndex x) const {
        return x.i >= 0 && x.i <= nx_ && x.j >= 0 && x.j <= ny_;
    }
    bool is_interior(GridIndex x) const {
        return x.i > 0 && x.i < nx_ && x.j > 0 && x.j < ny_;
    }
    bool is_boundary(GridIndex x) const { return contains(x) && !is_interior(x); }

    /// Row-major node id, i outermost.
    std::size_t node_id(GridIndex x) const {
        return static_cast<std::size_t>(x.i) * (ny_ + 1) + x.j;
    }

    /// Physical position; end nodes are snapped to the domain boundary so
    /// that boundary data is sampled exactly on the rectangle.
    Point position(GridIndex x) const;

private:
    GridSpec spec_;
    int nx_;
    int ny_;
    std::vector<GridIndex> interior_;
    std::vector<GridIndex> boundary_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Builds the lattice for a spec. Throws std::invalid_argument if h does not
/// divide a domain side (message contains "h must divide domain side") or the
/// spec is otherwise malformed.
GridPtr build_grid(const GridSpec& spec);

/// Real values on every node (interior and boundary) of a grid.
class MeshFunction {
public:
    explicit MeshFunction(GridPtr grid, double fill = 0.0);

    const GridPtr& grid() const { return grid_; }

    double operator[](GridIndex x) const { return values_[grid_->node_id(x)]; }
    double& operator[](GridIndex x) { return values_[grid_->node_id(x)]; }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    /// True when both functions live on the same grid (same object or an
    /// identical spec).
    bool same_grid(const MeshFunction& other) const;

private:
    GridPtr grid_;
    std::vector<double> values_;
};

/// Pointwise restriction r_h(f): samples f at every node position.
MeshFunction restrict_to_grid(const std::function<double(double, double)>& f, const GridPtr& grid);

/// max over the region of |v|; 0 on an empty region.
double max_norm(const MeshFunction& v, Region region);

/// max over the region of |v - w|. Throws std::invalid_argument on grid mismatch.
double max_norm_diff(const MeshFunction& v, const MeshFunction& w, Region region);

/// Solution dump: CSV "i,j,x,y,value", row-major, 17 significant digits.
void write_solution_csv(std::ostream& os, const MeshFunction& v);

/// Reads a solution CSV back onto the given grid. Throws std::invalid_argument
/// if the file does not cover exactly the grid's nodes.
MeshFunction read_solution_csv(std::istream& is, const GridPtr& grid);

}  // namespace mafd
