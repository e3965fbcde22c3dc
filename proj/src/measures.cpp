#include "mafd/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mafd/quadrature.hpp"
#include "json.hpp"

namespace mafd {

namespace {

void validate_measure(const MeasureSpec& measure, const Rect& domain) {
    for (const MeasureSpec::Atom& a : measure.atoms) {
        if (!(a.w > 0.0)) throw std::invalid_argument("measure: atom weights must be positive");
        if (!(a.x > domain.ax && a.x < domain.bx && a.y > domain.ay && a.y < domain.by)) {
            throw std::invalid_argument("measure: atom positions must lie strictly inside");
        }
    }
}

// Nearest interior node; ties break to the smallest row-major id, which the
// interior scan order delivers via strict improvement.
GridIndex nearest_interior_node(const Grid& grid, double px, double py) {
    GridIndex best{-1, -1};
    double best_d2 = std::numeric_limits<double>::infinity();
    for (const GridIndex& x : grid.interior()) {
        const Point p = grid.position(x);
        const double d2 = (p.x - px) * (p.x - px) + (p.y - py) * (p.y - py);
        if (d2 < best_d2) {
            best_d2 = d2;
            best = x;
        }
    }
    const double h = grid.h();
    if (best.i < 0 || best_d2 > 2.0 * h * h * (1.0 + 1e-12)) {
        throw std::invalid_argument("measure: no interior node within h*sqrt(2) of atom");
    }
    return best;
}

void add_atom_nearest(MeshFunction& f, const Grid& grid, const MeasureSpec::Atom& atom) {
    const GridIndex node = nearest_interior_node(grid, atom.x, atom.y);
    f[node] += atom.w / (grid.h() * grid.h());
}

void add_atom_bilinear(MeshFunction& f, const Grid& grid, const MeasureSpec::Atom& atom) {
    const Rect& d = grid.spec().domain;
    const double h = grid.h();
    int ci = static_cast<int>(std::floor((atom.x - d.ax) / h));
    int cj = static_cast<int>(std::floor((atom.y - d.ay) / h));
    ci = std::clamp(ci, 0, grid.nx() - 1);
    cj = std::clamp(cj, 0, grid.ny() - 1);
    const double s = (atom.x - (d.ax + ci * h)) / h;
    const double t = (atom.y - (d.ay + cj * h)) / h;
    const GridIndex corners[4] = {{ci, cj}, {ci + 1, cj}, {ci, cj + 1}, {ci + 1, cj + 1}};
    const double weights[4] = {(1.0 - s) * (1.0 - t), s * (1.0 - t), (1.0 - s) * t, s * t};
    // Weight reaching boundary corners is redistributed over the interior
    // ones so that the discrete mass stays w.
    double interior_weight = 0.0;
    for (int k = 0; k < 4; ++k) {
        if (grid.is_interior(corners[k])) interior_weight += weights[k];
    }
    if (interior_weight <= 0.0) {
        add_atom_nearest(f, grid, atom);
        return;
    }
    const double load = atom.w / (grid.h() * grid.h());
    for (int k = 0; k < 4; ++k) {
        if (grid.is_interior(corners[k])) f[corners[k]] += load * weights[k] / interior_weight;
    }
}

}  // namespace

MeshFunction build_rhs(const MeasureSpec& measure, const GridPtr& grid, DiracSpread spread) {
    validate_measure(measure, grid->spec().domain);
    MeshFunction f(grid);
    if (measure.density) {
        for (const GridIndex& x : grid->interior()) {
            const Point p = grid->position(x);
            f[x] = measure.density(p.x, p.y);
        }
    }
    for (const MeasureSpec::Atom& atom : measure.atoms) {
        if (spread == DiracSpread::Nearest) {
            add_atom_nearest(f, *grid, atom);
        } else {
            add_atom_bilinear(f, *grid, atom);
        }
    }
    return f;
}

double measure_of_box(const MeshFunction& f, const BorelBox& box) {
    if (box.x0 > box.x1 || box.y0 > box.y1) {
        throw std::invalid_argument("measure_of_box: malformed box");
    }
    const Grid& grid = *f.grid();
    double sum = 0.0;
    for (const GridIndex& x : grid.interior()) {
        if (box.contains(grid.position(x))) sum += f[x];
    }
    return grid.h() * grid.h() * sum;
}

double reference_measure(const MeasureSpec& measure, const BorelBox& box) {
    if (box.x0 > box.x1 || box.y0 > box.y1) {
        throw std::invalid_argument("reference_measure: malformed box");
    }
    double total = 0.0;
    for (const MeasureSpec::Atom& a : measure.atoms) {
        const bool inside = a.x > box.x0 && a.x < box.x1 && a.y > box.y0 && a.y < box.y1;
        const bool outside = a.x < box.x0 || a.x > box.x1 || a.y < box.y0 || a.y > box.y1;
        if (inside) {
            total += a.w;
        } else if (!outside) {
            throw std::invalid_argument(
                "reference_measure: atom on the box boundary; pick a different test box");
        }
    }
    if (measure.density) {
        total += adaptive_integrate_2d(measure.density, box.x0, box.x1, box.y0, box.y1, 1e-8);
    }
    return total;
}

std::string measure_to_json(const MeasureSpec& measure) {
    nlohmann::json j;
    j["atoms"] = nlohmann::json::array();
    for (const MeasureSpec::Atom& a : measure.atoms) {
        j["atoms"].push_back({{"x", a.x}, {"y", a.y}, {"w", a.w}});
    }
    if (measure.density) {
        j["density"] = measure.density_name;
    } else {
        j["density"] = nullptr;
    }
    return j.dump();
}

MeasureSpec measure_from_json(const std::string& json_text, const DensityRegistry& registry) {
    const nlohmann::json j = nlohmann::json::parse(json_text);
    MeasureSpec out;
    for (const auto& a : j.at("atoms")) {
        out.atoms.push_back({a.at("x").get<double>(), a.at("y").get<double>(),
                             a.at("w").get<double>()});
    }
    const auto& density = j.at("density");
    if (!density.is_null()) {
        const std::string name = density.get<std::string>();
        const auto it = registry.find(name);
        if (it == registry.end()) {
            throw std::invalid_argument("measure: unknown density name: " + name);
        }
        out.density = it->second;
        out.density_name = name;
    }
    return out;
}

}  // namespace mafd
