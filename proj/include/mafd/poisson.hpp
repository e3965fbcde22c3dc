#pragma once

#include <memory>
#include <stdexcept>

#include "mafd/grid.hpp"

namespace mafd {

enum class PoissonMethod { FastDiagonalization, Iterative };

struct PoissonConfig {
    PoissonMethod method = PoissonMethod::FastDiagonalization;
    double rel_tol = 1e-12;  // iterative backend target, max-norm relative residual
    int max_iter = 100000;
};

/// Thrown when the iterative backend fails to reach rel_tol within max_iter;
/// carries the residual that was achieved.
class PoissonError : public std::runtime_error {
public:
    PoissonError(const std::string& what, double achieved_residual)
        : std::runtime_error(what), achieved_residual_(achieved_residual) {}
    double achieved_residual() const { return achieved_residual_; }

private:
    double achieved_residual_;
};

/// 5-point Laplacian at an interior node. Throws std::out_of_range otherwise.
double laplacian_apply(const MeshFunction& v, GridIndex x);

/// 5-point Laplacian on every interior node (0 on the boundary).
MeshFunction laplacian_field(const MeshFunction& v);

/// Solves Lap_h z = rhs on the interior with z = 0 on the boundary.
/// The fast backend diagonalizes in the discrete sine basis (DST-I via FFTW)
/// and is exact to rounding; the iterative backend is matrix-free conjugate
/// gradients stopped on the relative max-norm residual.
class PoissonSolver {
public:
    PoissonSolver(GridPtr grid, PoissonConfig cfg = {});
    ~PoissonSolver();
    PoissonSolver(PoissonSolver&&) noexcept;
    PoissonSolver& operator=(PoissonSolver&&) noexcept;
    PoissonSolver(const PoissonSolver&) = delete;
    PoissonSolver& operator=(const PoissonSolver&) = delete;

    const GridPtr& grid() const;
    /// rhs is read on the interior only; boundary entries are ignored.
    MeshFunction solve(const MeshFunction& rhs) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// One-shot convenience wrapper around PoissonSolver.
MeshFunction poisson_solve(const MeshFunction& rhs, const PoissonConfig& cfg = {});

/// ||Lap_h^{-1}||_inf, computed exactly as the max-norm of the solution of
/// Lap_h z = -1 with zero boundary data (-Lap_h has a nonnegative inverse, so
/// the row-sum maximum is attained at the all-ones input).
double inv_norm_estimate(const GridPtr& grid, const PoissonConfig& cfg = {});

}  // namespace mafd
