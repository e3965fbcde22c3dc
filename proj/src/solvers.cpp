#include "mafd/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "mafd/problems.hpp"
#include "mafd/rng.hpp"

namespace mafd {

namespace {

void check_boundary_match(const MeshFunction& u, const MeshFunction& f) {
    if (!u.same_grid(f)) throw std::invalid_argument("solver step: grid mismatch");
}

// Transfinite (Coons) interpolation of the boundary data; matches g on the
// whole boundary when g is corner-consistent.
MeshFunction boundary_extension(const std::function<double(double, double)>& g,
                                const GridPtr& grid) {
    const Rect& d = grid->spec().domain;
    MeshFunction out(grid);
    for (int i = 0; i <= grid->nx(); ++i) {
        for (int j = 0; j <= grid->ny(); ++j) {
            const GridIndex x{i, j};
            const Point p = grid->position(x);
            const double s = (p.x - d.ax) / d.width();
            const double t = (p.y - d.ay) / d.height();
            out[x] = (1.0 - t) * g(p.x, d.ay) + t * g(p.x, d.by) + (1.0 - s) * g(d.ax, p.y) +
                     s * g(d.bx, p.y) -
                     ((1.0 - s) * (1.0 - t) * g(d.ax, d.ay) + s * (1.0 - t) * g(d.bx, d.ay) +
                      (1.0 - s) * t * g(d.ax, d.by) + s * t * g(d.bx, d.by));
        }
    }
    return out;
}

MeshFunction initial_guess(const Problem& problem, const GridPtr& grid, const SolverConfig& cfg) {
    InitialGuess init = cfg.init;
    if (init == InitialGuess::Auto) {
        init = problem.has_exact() ? InitialGuess::ExactRestriction
                                   : InitialGuess::BoundaryExtension;
    }
    switch (init) {
        case InitialGuess::Auto:  // resolved above
        case InitialGuess::ExactRestriction:
            if (!problem.has_exact()) {
                throw std::invalid_argument("solve: problem '" + problem.name +
                                            "' has no exact solution for the exact-restriction "
                                            "initial guess");
            }
            return restrict_to_grid(problem.exact, grid);
        case InitialGuess::BoundaryExtension:
            return boundary_extension(problem.boundary_g, grid);
        case InitialGuess::Custom: {
            if (!cfg.custom_init.has_value()) {
                throw std::invalid_argument("solve: custom initial guess not provided");
            }
            MeshFunction u = *cfg.custom_init;
            if (u.grid()->spec() == grid->spec()) {
                // Boundary entries always come from the problem's data.
                MeshFunction rebased(grid);
                std::copy(u.values().begin(), u.values().end(), rebased.values().begin());
                return rebased;
            }
            throw std::invalid_argument("solve: custom initial guess grid mismatch");
        }
    }
    throw std::logic_error("solve: unknown initial guess kind");
}

}  // namespace

MeshFunction basic_step(const MeshFunction& u, const MeshFunction& f, const SolverConfig& cfg,
                        const OperatorConfig& opcfg) {
    check_boundary_match(u, f);
    const MeshFunction r = ma_residual(u, f, opcfg);
    MeshFunction out = u;
    for (const GridIndex& x : u.grid()->interior()) out[x] += r[x] / cfg.mu;
    return out;
}

MeshFunction preconditioned_step(const MeshFunction& u, const MeshFunction& f,
                                 const SolverConfig& cfg, const OperatorConfig& opcfg,
                                 const PoissonSolver& poisson) {
    check_boundary_match(u, f);
    const MeshFunction z = poisson.solve(ma_residual(u, f, opcfg));
    MeshFunction out = u;
    for (const GridIndex& x : u.grid()->interior()) out[x] -= z[x] / cfg.mu;
    return out;
}

MeshFunction preconditioned_step(const MeshFunction& u, const MeshFunction& f,
                                 const SolverConfig& cfg, const OperatorConfig& opcfg,
                                 const PoissonConfig& pcfg) {
    return preconditioned_step(u, f, cfg, opcfg, PoissonSolver(u.grid(), pcfg));
}

SolveResult solve(const Problem& problem, double h, const SolverConfig& cfg,
                  const OperatorConfig& opcfg, const PoissonConfig& pcfg, DiracSpread spread) {
    if (!(cfg.mu > 0.0)) throw std::invalid_argument("solve: mu must be positive");
    if (!(cfg.tol > 0.0)) throw std::invalid_argument("solve: tol must be positive");
    if (cfg.max_iter < 1) throw std::invalid_argument("solve: max_iter must be >= 1");

    const auto t0 = std::chrono::steady_clock::now();
    const GridPtr grid = build_grid({problem.domain, h});
    const MeshFunction f = build_rhs(problem.measure, grid, spread);
    MeshFunction u = initial_guess(problem, grid, cfg);
    for (const GridIndex& x : grid->boundary()) {
        const Point p = grid->position(x);
        u[x] = problem.boundary_g(p.x, p.y);
    }

    std::optional<PoissonSolver> poisson;
    if (cfg.method == SolveMethod::Preconditioned) poisson.emplace(grid, pcfg);

    const auto elapsed_ms = [&t0] {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    };

    SolveResult result{MeshFunction(grid), 0, {}, false, 0.0, 0.0};
    MeshFunction r = ma_residual(u, f, opcfg);
    double res_norm = max_norm(r, Region::Interior);
    result.final_residual = res_norm;
    if (!std::isfinite(res_norm)) {
        throw DivergenceError("solve: non-finite residual at the initial guess", 0, res_norm);
    }
    if (!cfg.increment_rule && res_norm <= cfg.tol) {
        result.solution = std::move(u);
        result.converged = true;
        result.wall_ms = elapsed_ms();
        return result;
    }

    for (long k = 1; k <= cfg.max_iter; ++k) {
        double increment = 0.0;
        if (cfg.method == SolveMethod::Basic) {
            for (const GridIndex& x : grid->interior()) {
                const double step = r[x] / cfg.mu;
                u[x] += step;
                increment = std::max(increment, std::abs(step));
            }
        } else {
            const MeshFunction z = poisson->solve(r);
            for (const GridIndex& x : grid->interior()) {
                const double step = z[x] / cfg.mu;
                u[x] -= step;
                increment = std::max(increment, std::abs(step));
            }
        }
        r = ma_residual(u, f, opcfg);
        res_norm = max_norm(r, Region::Interior);
        result.residual_history.push_back(res_norm);
        result.final_residual = res_norm;
        result.iterations = k;
        if (!std::isfinite(res_norm) || !std::isfinite(increment)) {
            throw DivergenceError("solve: iterate became non-finite at iteration " +
                                      std::to_string(k),
                                  k, res_norm);
        }
        if (cfg.increment_rule ? increment <= cfg.tol : res_norm <= cfg.tol) {
            result.converged = true;
            break;
        }
    }
    result.solution = std::move(u);
    result.wall_ms = elapsed_ms();
    return result;
}

double contraction_ratio(SolveMethod method, double mu, const GridPtr& grid,
                         const OperatorConfig& opcfg, int trials, std::uint64_t seed,
                         const PoissonConfig& pcfg) {
    if (trials < 1) throw std::invalid_argument("contraction_ratio: trials must be >= 1");
    if (!(mu > 0.0)) throw std::invalid_argument("contraction_ratio: mu must be positive");

    SolverConfig cfg;
    cfg.mu = mu;
    std::optional<PoissonSolver> poisson;
    if (method == SolveMethod::Preconditioned) poisson.emplace(grid, pcfg);

    Rng rng(seed);
    const MeshFunction zero(grid);
    MeshFunction v(grid), w(grid);
    double best = 0.0;
    for (int t = 0; t < trials; ++t) {
        // Shared random boundary; independent random interiors.
        for (const GridIndex& x : grid->boundary()) {
            const double b = rng.next_symmetric();
            v[x] = b;
            w[x] = b;
        }
        for (const GridIndex& x : grid->interior()) v[x] = rng.next_symmetric();
        for (const GridIndex& x : grid->interior()) w[x] = rng.next_symmetric();
        const double den = max_norm_diff(v, w, Region::Interior);
        if (den == 0.0) continue;  // 0/0 pair: skipped
        MeshFunction tv = method == SolveMethod::Basic
                              ? basic_step(v, zero, cfg, opcfg)
                              : preconditioned_step(v, zero, cfg, opcfg, *poisson);
        MeshFunction tw = method == SolveMethod::Basic
                              ? basic_step(w, zero, cfg, opcfg)
                              : preconditioned_step(w, zero, cfg, opcfg, *poisson);
        best = std::max(best, max_norm_diff(tv, tw, Region::Interior) / den);
    }
    return best;
}

}  // namespace mafd
