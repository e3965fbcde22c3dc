#include "mafd/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace mafd {

namespace {

// Number of divisions of length L by h; -1 when h does not divide L.
int division_count(double length, double h) {
    const double ratio = length / h;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) return -1;
    return static_cast<int>(rounded);
}

}  // namespace

Grid::Grid(const GridSpec& spec, int nx, int ny) : spec_(spec), nx_(nx), ny_(ny) {
    interior_.reserve(static_cast<std::size_t>(std::max(nx - 1, 0)) * std::max(ny - 1, 0));
    boundary_.reserve(2 * static_cast<std::size_t>(nx + ny));
    for (int i = 0; i <= nx_; ++i) {
        for (int j = 0; j <= ny_; ++j) {
            const GridIndex x{i, j};
            (is_interior(x) ? interior_ : boundary_).push_back(x);
        }
    }
}

Point Grid::position(GridIndex x) const {
    const Rect& d = spec_.domain;
    const double px = x.i == nx_ ? d.bx : d.ax + x.i * spec_.h;
    const double py = x.j == ny_ ? d.by : d.ay + x.j * spec_.h;
    return {px, py};
}

GridPtr build_grid(const GridSpec& spec) {
    const Rect& d = spec.domain;
    if (!(d.bx > d.ax) || !(d.by > d.ay)) {
        throw std::invalid_argument("grid: domain sides must have positive length");
    }
    if (!(spec.h > 0.0) || !std::isfinite(spec.h)) {
        throw std::invalid_argument("grid: h must be positive and finite");
    }
    const int nx = division_count(d.width(), spec.h);
    const int ny = division_count(d.height(), spec.h);
    if (nx < 0 || ny < 0) {
        throw std::invalid_argument("grid: h must divide domain side lengths (h = " +
                                    std::to_string(spec.h) + ")");
    }
    return std::make_shared<Grid>(spec, nx, ny);
}

MeshFunction::MeshFunction(GridPtr grid, double fill)
    : grid_(std::move(grid)), values_(grid_->num_nodes(), fill) {}

bool MeshFunction::same_grid(const MeshFunction& other) const {
    return grid_ == other.grid_ || grid_->spec() == other.grid_->spec();
}

MeshFunction restrict_to_grid(const std::function<double(double, double)>& f,
                              const GridPtr& grid) {
    MeshFunction out(grid);
    for (int i = 0; i <= grid->nx(); ++i) {
        for (int j = 0; j <= grid->ny(); ++j) {
            const GridIndex x{i, j};
            const Point p = grid->position(x);
            out[x] = f(p.x, p.y);
        }
    }
    return out;
}

namespace {

template <typename NodeFn>
void for_region(const Grid& grid, Region region, NodeFn&& fn) {
    if (region == Region::Interior || region == Region::All) {
        for (const GridIndex& x : grid.interior()) fn(x);
    }
    if (region == Region::Boundary || region == Region::All) {
        for (const GridIndex& x : grid.boundary()) fn(x);
    }
}

}  // namespace

double max_norm(const MeshFunction& v, Region region) {
    double best = 0.0;
    for_region(*v.grid(), region, [&](GridIndex x) { best = std::max(best, std::abs(v[x])); });
    return best;
}

double max_norm_diff(const MeshFunction& v, const MeshFunction& w, Region region) {
    if (!v.same_grid(w)) {
        throw std::invalid_argument("max_norm_diff: mesh functions live on different grids");
    }
    double best = 0.0;
    for_region(*v.grid(), region,
               [&](GridIndex x) { best = std::max(best, std::abs(v[x] - w[x])); });
    return best;
}

void write_solution_csv(std::ostream& os, const MeshFunction& v) {
    const Grid& grid = *v.grid();
    os << "i,j,x,y,value\n";
    char buf[128];
    for (int i = 0; i <= grid.nx(); ++i) {
        for (int j = 0; j <= grid.ny(); ++j) {
            const GridIndex x{i, j};
            const Point p = grid.position(x);
            std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g,%.17g\n", i, j, p.x, p.y, v[x]);
            os << buf;
        }
    }
}

MeshFunction read_solution_csv(std::istream& is, const GridPtr& grid) {
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("solution csv: empty input");
    MeshFunction out(grid);
    std::vector<bool> seen(grid->num_nodes(), false);
    std::size_t rows = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        int i = 0, j = 0;
        double x = 0.0, y = 0.0, value = 0.0;
        if (!(ss >> i >> j >> x >> y >> value)) {
            throw std::invalid_argument("solution csv: malformed row: " + line);
        }
        const GridIndex idx{i, j};
        if (!grid->contains(idx)) {
            throw std::invalid_argument("solution csv: node off the grid: " + line);
        }
        const std::size_t id = grid->node_id(idx);
        if (seen[id]) throw std::invalid_argument("solution csv: duplicate node: " + line);
        seen[id] = true;
        out[idx] = value;
        ++rows;
    }
    if (rows != grid->num_nodes()) {
        throw std::invalid_argument("solution csv: expected " + std::to_string(grid->num_nodes()) +
                                    " rows, got " + std::to_string(rows));
    }
    return out;
}

}  // namespace mafd
