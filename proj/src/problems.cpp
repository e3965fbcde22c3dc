#include "mafd/problems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace mafd {

namespace {

const Rect kUnitSquare{0.0, 0.0, 1.0, 1.0};

double two_dirac_exact(double x, double y) {
    if (x > 0.25 && x < 0.75) return std::abs(y - 0.5);
    return std::min(std::hypot(x - 0.25, y - 0.5), std::hypot(x - 0.75, y - 0.5));
}

double quadratic_exact(double x, double y) { return 0.5 * (x * x + y * y); }

double radial_exact(double x, double y) { return std::exp(0.5 * (x * x + y * y)); }

double radial_density(double x, double y) {
    return (1.0 + x * x + y * y) * std::exp(x * x + y * y);
}

double cone_exact(double x, double y) { return std::hypot(x - 0.5, y - 0.5); }

}  // namespace

Problem two_dirac_problem() {
    Problem p;
    p.name = "two_dirac";
    p.domain = kUnitSquare;
    p.measure.atoms = {{0.25, 0.5, 0.5 * std::numbers::pi}, {0.75, 0.5, 0.5 * std::numbers::pi}};
    p.boundary_g = two_dirac_exact;
    p.exact = two_dirac_exact;
    return p;
}

Problem quadratic_problem() {
    Problem p;
    p.name = "quadratic";
    p.domain = kUnitSquare;
    p.measure.density = [](double, double) { return 1.0; };
    p.measure.density_name = "unit";
    p.boundary_g = quadratic_exact;
    p.exact = quadratic_exact;
    return p;
}

Problem smooth_radial_problem() {
    Problem p;
    p.name = "smooth_radial";
    p.domain = kUnitSquare;
    p.measure.density = radial_density;
    p.measure.density_name = "radial_exp";
    p.boundary_g = radial_exact;
    p.exact = radial_exact;
    return p;
}

Problem single_cone_problem() {
    Problem p;
    p.name = "single_cone";
    p.domain = kUnitSquare;
    // The subgradient image of the cone apex is the unit disk, so the apex
    // carries mass pi.
    p.measure.atoms = {{0.5, 0.5, std::numbers::pi}};
    p.boundary_g = cone_exact;
    p.exact = cone_exact;
    return p;
}

const std::vector<std::string>& problem_names() {
    static const std::vector<std::string> names = {"two_dirac", "quadratic", "smooth_radial",
                                                   "single_cone"};
    return names;
}

Problem problem_by_name(const std::string& name) {
    if (name == "two_dirac") return two_dirac_problem();
    if (name == "quadratic") return quadratic_problem();
    if (name == "smooth_radial") return smooth_radial_problem();
    if (name == "single_cone") return single_cone_problem();
    throw std::invalid_argument("unknown problem: " + name);
}

const DensityRegistry& builtin_densities() {
    static const DensityRegistry registry = {
        {"unit", [](double, double) { return 1.0; }},
        {"radial_exp", radial_density},
    };
    return registry;
}

void validate_problem(const Problem& problem) {
    if (!problem.has_exact()) return;
    const Rect& d = problem.domain;
    const int samples = 257;
    for (int k = 0; k < samples; ++k) {
        const double sx = d.ax + d.width() * k / (samples - 1);
        const double sy = d.ay + d.height() * k / (samples - 1);
        const Point pts[4] = {{sx, d.ay}, {sx, d.by}, {d.ax, sy}, {d.bx, sy}};
        for (const Point& p : pts) {
            if (std::abs(problem.exact(p.x, p.y) - problem.boundary_g(p.x, p.y)) > 1e-12) {
                throw std::logic_error("problem '" + problem.name +
                                       "': exact and boundary data disagree on the boundary");
            }
        }
    }
}

ErrorTable run_convergence_study(const Problem& problem, std::span<const double> h_list,
                                 const SolverConfig& cfg, const OperatorConfig& opcfg,
                                 const PoissonConfig& pcfg, DiracSpread spread, int threads) {
    if (h_list.empty()) throw std::invalid_argument("study: empty h list");

    const auto run_row = [&](double h) {
        ErrorTableRow row;
        row.h = h;
        try {
            SolveResult res = solve(problem, h, cfg, opcfg, pcfg, spread);
            row.iterations = res.iterations;
            row.converged = res.converged;
            row.residual = res.final_residual;
            row.wall_ms = res.wall_ms;
            if (problem.has_exact()) {
                const MeshFunction exact = restrict_to_grid(problem.exact, res.solution.grid());
                row.max_error = max_norm_diff(res.solution, exact, Region::Interior);
            }
        } catch (const DivergenceError& e) {
            row.iterations = e.iterations();
            row.converged = false;
            row.residual = e.last_residual();
        }
        return row;
    };

    ErrorTable table;
    table.rows.resize(h_list.size());
    if (threads <= 1 || h_list.size() == 1) {
        for (std::size_t k = 0; k < h_list.size(); ++k) table.rows[k] = run_row(h_list[k]);
        return table;
    }
    for (std::size_t base = 0; base < h_list.size(); base += threads) {
        const std::size_t end = std::min(base + threads, h_list.size());
        std::vector<std::future<ErrorTableRow>> futures;
        futures.reserve(end - base);
        for (std::size_t k = base; k < end; ++k) {
            futures.push_back(std::async(std::launch::async, run_row, h_list[k]));
        }
        for (std::size_t k = base; k < end; ++k) table.rows[k] = futures[k - base].get();
    }
    return table;
}

namespace {

std::string format_h(double h) {
    // Prefer the 1/n form when h is a unit fraction.
    const double inv = 1.0 / h;
    const double rounded = std::round(inv);
    char buf[64];
    if (std::abs(inv - rounded) < 1e-9 * inv && rounded >= 1.0) {
        std::snprintf(buf, sizeof(buf), "1/%.0f", rounded);
    } else {
        std::snprintf(buf, sizeof(buf), "%.6g", h);
    }
    return buf;
}

std::string format_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_short(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

void write_error_table_csv(std::ostream& os, const ErrorTable& table) {
    os << "h,iterations,converged,max_error,residual,wall_time_ms\n";
    for (const ErrorTableRow& row : table.rows) {
        os << format_full(row.h) << ',' << row.iterations << ','
           << (row.converged ? "true" : "false") << ','
           << (row.max_error ? format_full(*row.max_error) : std::string()) << ','
           << format_full(row.residual) << ',';
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.3f", row.wall_ms);
        os << buf << '\n';
    }
}

void write_error_table_text(std::ostream& os, const ErrorTable& table) {
    const bool has_error =
        std::any_of(table.rows.begin(), table.rows.end(),
                    [](const ErrorTableRow& r) { return r.max_error.has_value(); });
    // Transposed summary: h across the top, errors (or residuals) beneath.
    constexpr int w = 13;
    os << "  h     ";
    for (const ErrorTableRow& row : table.rows) {
        os.width(w);
        os << format_h(row.h);
    }
    os << "\n  " << (has_error ? "error " : "resid ");
    for (const ErrorTableRow& row : table.rows) {
        os.width(w);
        if (has_error) {
            os << (row.max_error ? format_short(*row.max_error) : std::string("-"));
        } else {
            os << format_short(row.residual);
        }
    }
    os << "\n\n";
    os << "  h          iterations  converged  max_error      residual       wall_ms\n";
    for (const ErrorTableRow& row : table.rows) {
        char buf[256];
        std::snprintf(buf, sizeof(buf), "  %-10s %-11ld %-10s %-14s %-14s %.3f\n",
                      format_h(row.h).c_str(), row.iterations, row.converged ? "yes" : "no",
                      row.max_error ? format_short(*row.max_error).c_str() : "-",
                      format_short(row.residual).c_str(), row.wall_ms);
        os << buf;
    }
}

}  // namespace mafd
