#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mafd/grid.hpp"
#include "mafd/ma_operator.hpp"

namespace mafd {

/// Finite Borel measure: weighted Dirac atoms plus an optional continuous
/// density on the closed domain.
struct MeasureSpec {
    struct Atom {
        double x = 0.0;
        double y = 0.0;
        double w = 0.0;  // > 0
    };
    std::vector<Atom> atoms;
    std::function<double(double, double)> density;  // empty: pure atoms
    std::string density_name;                       // registry key for serialization
};

enum class DiracSpread {
    Nearest,   // full weight w/h^2 at the nearest interior node
    Bilinear,  // w/h^2 split bilinearly over the cell corners
};

/// Builds f_h >= 0 (interior support) whose discrete measures converge weakly
/// to the target. Ties between equidistant nodes break to the smallest
/// row-major id. Throws std::invalid_argument when an atom has no interior
/// node within h*sqrt(2) (degenerate grid).
MeshFunction build_rhs(const MeasureSpec& measure, const GridPtr& grid,
                       DiracSpread spread = DiracSpread::Nearest);

/// h^2 * sum of f over interior nodes inside the closed box.
double measure_of_box(const MeshFunction& f, const BorelBox& box);

/// nu(B): atom weights strictly inside B plus adaptive quadrature of the
/// density over B (relative error <= 1e-8). Throws std::invalid_argument if
/// an atom sits exactly on the box boundary.
double reference_measure(const MeasureSpec& measure, const BorelBox& box);

using DensityRegistry = std::map<std::string, std::function<double(double, double)>>;

/// JSON form: {"atoms":[{"x":..,"y":..,"w":..}],"density":"name-or-null"}.
std::string measure_to_json(const MeasureSpec& measure);
MeasureSpec measure_from_json(const std::string& json_text, const DensityRegistry& registry);

}  // namespace mafd
