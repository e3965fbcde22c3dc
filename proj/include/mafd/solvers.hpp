#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mafd/grid.hpp"
#include "mafd/ma_operator.hpp"
#include "mafd/measures.hpp"
#include "mafd/poisson.hpp"

namespace mafd {

struct Problem;  // problems.hpp

enum class SolveMethod { Basic, Preconditioned };

enum class InitialGuess {
    Auto,               // exact restriction when available, else boundary extension
    ExactRestriction,   // r_h of the problem's exact solution
    BoundaryExtension,  // transfinite (Coons) interpolation of the boundary data
    Custom,             // SolverConfig::custom_init
};

struct SolverConfig {
    SolveMethod method = SolveMethod::Preconditioned;
    double mu = 50.0;  // damping: steps scale by 1/mu
    double tol = 1e-8;
    long max_iter = 1000000;
    InitialGuess init = InitialGuess::Auto;
    std::optional<MeshFunction> custom_init;
    /// Stop on max|u' - u| instead of the interior residual norm. The
    /// residual rule is the authoritative one.
    bool increment_rule = false;
};

struct SolveResult {
    MeshFunction solution;
    long iterations = 0;
    std::vector<double> residual_history;  // interior max-norm after each step
    bool converged = false;
    double wall_ms = 0.0;
    /// Residual of the returned iterate; equals residual_history.back() after
    /// at least one step, and the initial guess's residual otherwise.
    double final_residual = 0.0;
};

/// Thrown when an iterate stops being finite; carries how far the run got.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, long iterations, double last_residual)
        : std::runtime_error(what), iterations_(iterations), last_residual_(last_residual) {}
    long iterations() const { return iterations_; }
    double last_residual() const { return last_residual_; }

private:
    long iterations_;
    double last_residual_;
};

/// One damped explicit step: u + (1/mu) * (M_h[u] - f) on the interior,
/// boundary unchanged.
MeshFunction basic_step(const MeshFunction& u, const MeshFunction& f, const SolverConfig& cfg,
                        const OperatorConfig& opcfg);

/// One preconditioned step: u - (1/mu) * Lap_h^{-1} (M_h[u] - f) on the
/// interior, boundary unchanged. Equivalent to
///   -Lap_h u' = -Lap_h u + (1/mu)(M_h[u] - f)
/// with matching boundary values.
MeshFunction preconditioned_step(const MeshFunction& u, const MeshFunction& f,
                                 const SolverConfig& cfg, const OperatorConfig& opcfg,
                                 const PoissonSolver& poisson);
MeshFunction preconditioned_step(const MeshFunction& u, const MeshFunction& f,
                                 const SolverConfig& cfg, const OperatorConfig& opcfg,
                                 const PoissonConfig& pcfg = {});

/// Builds the grid at mesh length h, discretizes the problem's measure, and
/// iterates the selected step from the configured initial guess until the
/// interior max-norm residual meets tol or max_iter is reached.
/// Non-convergence returns converged = false; non-finite iterates throw
/// DivergenceError.
SolveResult solve(const Problem& problem, double h, const SolverConfig& cfg,
                  const OperatorConfig& opcfg, const PoissonConfig& pcfg = {},
                  DiracSpread spread = DiracSpread::Nearest);

/// Empirical contraction factor of the selected step map with f = 0: max over
/// sampled pairs (v, w) sharing boundary values of
///   max_norm(T[v]-T[w], interior) / max_norm(v-w, interior).
/// Pairs with zero denominator are skipped. Node values are uniform in [-1,1],
/// deterministic for a given seed.
double contraction_ratio(SolveMethod method, double mu, const GridPtr& grid,
                         const OperatorConfig& opcfg, int trials, std::uint64_t seed,
                         const PoissonConfig& pcfg = {});

}  // namespace mafd
