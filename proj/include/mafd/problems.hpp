#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mafd/measures.hpp"
#include "mafd/solvers.hpp"

namespace mafd {

/// A benchmark: domain, target measure, Dirichlet data, and (when known) the
/// exact solution used for error columns.
struct Problem {
    std::string name;
    Rect domain;
    MeasureSpec measure;
    std::function<double(double, double)> boundary_g;  // continuous on the closure
    std::function<double(double, double)> exact;       // empty when unknown

    bool has_exact() const { return static_cast<bool>(exact); }
};

/// Unit square, nu = (pi/2) delta_(1/4,1/2) + (pi/2) delta_(3/4,1/2);
/// exact solution |y-1/2| in the middle strip, min of the two cone
/// distances outside.
Problem two_dirac_problem();

/// Unit square, density 1, exact (x^2+y^2)/2. Its restriction is an exact
/// discrete solution at every h, which pins the solver fixed point.
Problem quadratic_problem();

/// Unit square, exact exp((x^2+y^2)/2), density (1+x^2+y^2) exp(x^2+y^2).
Problem smooth_radial_problem();

/// Unit square, exact dist to the center, nu = pi * delta_(1/2,1/2)
/// (the subgradient image of the apex is the unit disk).
Problem single_cone_problem();

const std::vector<std::string>& problem_names();
Problem problem_by_name(const std::string& name);  // throws std::invalid_argument

/// Densities referenced by name in MeasureSpec JSON.
const DensityRegistry& builtin_densities();

/// Samples exact vs boundary_g on the domain boundary; throws if they differ
/// by more than 1e-12 anywhere sampled.
void validate_problem(const Problem& problem);

struct ErrorTableRow {
    double h = 0.0;
    long iterations = 0;
    bool converged = false;
    std::optional<double> max_error;  // interior max-norm vs exact, when known
    double residual = 0.0;
    double wall_ms = 0.0;
};

struct ErrorTable {
    std::vector<ErrorTableRow> rows;
};

/// Solves at each h in order; a per-row solver failure (divergence) is
/// recorded as converged = false and the study continues. threads > 1 runs
/// rows concurrently.
ErrorTable run_convergence_study(const Problem& problem, std::span<const double> h_list,
                                 const SolverConfig& cfg, const OperatorConfig& opcfg,
                                 const PoissonConfig& pcfg = {},
                                 DiracSpread spread = DiracSpread::Nearest, int threads = 1);

/// CSV: h,iterations,converged,max_error,residual,wall_time_ms.
void write_error_table_csv(std::ostream& os, const ErrorTable& table);

/// Aligned plain-text table: h across the top, errors in a row beneath
/// (residuals when no exact solution), then one detail line per h.
void write_error_table_text(std::ostream& os, const ErrorTable& table);

}  // namespace mafd
