#include "mafd/poisson.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <vector>

namespace mafd {

namespace {

// FFTW plan creation/destruction is not thread-safe; execution on distinct
// arrays is.
std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

struct FftwBuffer {
    double* data = nullptr;
    explicit FftwBuffer(std::size_t n) : data(fftw_alloc_real(n)) {}
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
};

}  // namespace

double laplacian_apply(const MeshFunction& v, GridIndex x) {
    const Grid& grid = *v.grid();
    if (!grid.is_interior(x)) throw std::out_of_range("laplacian_apply: node is not interior");
    const double h2 = grid.h() * grid.h();
    return (v[{x.i + 1, x.j}] + v[{x.i - 1, x.j}] + v[{x.i, x.j + 1}] + v[{x.i, x.j - 1}] -
            4.0 * v[x]) /
           h2;
}

MeshFunction laplacian_field(const MeshFunction& v) {
    MeshFunction out(v.grid());
    for (const GridIndex& x : v.grid()->interior()) out[x] = laplacian_apply(v, x);
    return out;
}

struct PoissonSolver::Impl {
    GridPtr grid;
    PoissonConfig cfg;
    int mx = 0;  // interior nodes per axis
    int my = 0;
    // Fast-diagonalization state.
    fftw_plan plan = nullptr;
    FftwBuffer plan_buffer;
    std::vector<double> eig_x;  // 1D Dirichlet Laplacian eigenvalues
    std::vector<double> eig_y;

    Impl(GridPtr g, PoissonConfig c)
        : grid(std::move(g)),
          cfg(c),
          mx(grid->nx() - 1),
          my(grid->ny() - 1),
          plan_buffer(static_cast<std::size_t>(std::max(mx, 1)) * std::max(my, 1)) {
        if (mx < 1 || my < 1) {
            throw std::invalid_argument("poisson: grid has no interior nodes");
        }
        if (!(cfg.rel_tol > 0.0 && cfg.rel_tol < 1.0)) {
            throw std::invalid_argument("poisson: rel_tol must lie in (0, 1)");
        }
        if (cfg.max_iter < 1) throw std::invalid_argument("poisson: max_iter must be >= 1");
        if (cfg.method == PoissonMethod::FastDiagonalization) {
            const double h2 = grid->h() * grid->h();
            eig_x.resize(mx);
            eig_y.resize(my);
            for (int k = 1; k <= mx; ++k) {
                const double s = std::sin(0.5 * std::numbers::pi * k / grid->nx());
                eig_x[k - 1] = -4.0 * s * s / h2;
            }
            for (int k = 1; k <= my; ++k) {
                const double s = std::sin(0.5 * std::numbers::pi * k / grid->ny());
                eig_y[k - 1] = -4.0 * s * s / h2;
            }
            std::lock_guard<std::mutex> lock(fftw_mutex());
            plan = fftw_plan_r2r_2d(mx, my, plan_buffer.data, plan_buffer.data, FFTW_RODFT00,
                                    FFTW_RODFT00, FFTW_ESTIMATE);
        }
    }

    ~Impl() {
        if (plan) {
            std::lock_guard<std::mutex> lock(fftw_mutex());
            fftw_destroy_plan(plan);
        }
    }

    void gather_interior(const MeshFunction& rhs, double* out) const {
        for (int i = 1; i <= mx; ++i) {
            for (int j = 1; j <= my; ++j) {
                out[static_cast<std::size_t>(i - 1) * my + (j - 1)] = rhs[{i, j}];
            }
        }
    }

    MeshFunction scatter_interior(const double* in) const {
        MeshFunction z(grid);
        for (int i = 1; i <= mx; ++i) {
            for (int j = 1; j <= my; ++j) {
                z[{i, j}] = in[static_cast<std::size_t>(i - 1) * my + (j - 1)];
            }
        }
        return z;
    }

    MeshFunction solve_fast(const MeshFunction& rhs) const {
        const std::size_t n = static_cast<std::size_t>(mx) * my;
        FftwBuffer buf(n);
        gather_interior(rhs, buf.data);
        fftw_execute_r2r(plan, buf.data, buf.data);
        // DST-I applied twice scales by 2*nx per axis.
        const double norm = 1.0 / (4.0 * static_cast<double>(grid->nx()) * grid->ny());
        for (int k = 0; k < mx; ++k) {
            for (int l = 0; l < my; ++l) {
                buf.data[static_cast<std::size_t>(k) * my + l] *=
                    norm / (eig_x[k] + eig_y[l]);
            }
        }
        fftw_execute_r2r(plan, buf.data, buf.data);
        return scatter_interior(buf.data);
    }

    // Matrix-free CG on -Lap_h (SPD with zero Dirichlet data), stopped on the
    // relative max-norm of the recursion residual.
    MeshFunction solve_iterative(const MeshFunction& rhs) const {
        const std::size_t n = static_cast<std::size_t>(mx) * my;
        std::vector<double> b(n), z(n, 0.0), r(n), p(n), ap(n);
        gather_interior(rhs, b.data());
        for (std::size_t k = 0; k < n; ++k) b[k] = -b[k];  // -Lap z = -rhs

        const auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
            const double inv_h2 = 1.0 / (grid->h() * grid->h());
            for (int i = 0; i < mx; ++i) {
                for (int j = 0; j < my; ++j) {
                    const std::size_t id = static_cast<std::size_t>(i) * my + j;
                    double acc = 4.0 * x[id];
                    if (i > 0) acc -= x[id - my];
                    if (i + 1 < mx) acc -= x[id + my];
                    if (j > 0) acc -= x[id - 1];
                    if (j + 1 < my) acc -= x[id + 1];
                    y[id] = acc * inv_h2;
                }
            }
        };
        const auto max_abs = [](const std::vector<double>& x) {
            double m = 0.0;
            for (double v : x) m = std::max(m, std::abs(v));
            return m;
        };
        const double b_norm = max_abs(b);
        if (b_norm == 0.0) return MeshFunction(grid);

        r = b;
        p = r;
        double rr = 0.0;
        for (double v : r) rr += v * v;
        double achieved = max_abs(r) / b_norm;
        for (int it = 0; it < cfg.max_iter; ++it) {
            if (achieved <= cfg.rel_tol) return scatter_interior(z.data());
            apply(p, ap);
            double pap = 0.0;
            for (std::size_t k = 0; k < n; ++k) pap += p[k] * ap[k];
            const double alpha = rr / pap;
            for (std::size_t k = 0; k < n; ++k) {
                z[k] += alpha * p[k];
                r[k] -= alpha * ap[k];
            }
            double rr_new = 0.0;
            for (double v : r) rr_new += v * v;
            const double beta = rr_new / rr;
            rr = rr_new;
            for (std::size_t k = 0; k < n; ++k) p[k] = r[k] + beta * p[k];
            achieved = max_abs(r) / b_norm;
        }
        if (achieved <= cfg.rel_tol) return scatter_interior(z.data());
        throw PoissonError("poisson: conjugate gradients did not reach rel_tol " +
                               std::to_string(cfg.rel_tol) + " within " +
                               std::to_string(cfg.max_iter) +
                               " iterations (achieved residual " + std::to_string(achieved) + ")",
                           achieved);
    }
};

PoissonSolver::PoissonSolver(GridPtr grid, PoissonConfig cfg)
    : impl_(std::make_unique<Impl>(std::move(grid), cfg)) {}

PoissonSolver::~PoissonSolver() = default;
PoissonSolver::PoissonSolver(PoissonSolver&&) noexcept = default;
PoissonSolver& PoissonSolver::operator=(PoissonSolver&&) noexcept = default;

const GridPtr& PoissonSolver::grid() const { return impl_->grid; }

MeshFunction PoissonSolver::solve(const MeshFunction& rhs) const {
    if (rhs.grid() != impl_->grid && !(rhs.grid()->spec() == impl_->grid->spec())) {
        throw std::invalid_argument("poisson: rhs grid mismatch");
    }
    return impl_->cfg.method == PoissonMethod::FastDiagonalization ? impl_->solve_fast(rhs)
                                                                   : impl_->solve_iterative(rhs);
}

MeshFunction poisson_solve(const MeshFunction& rhs, const PoissonConfig& cfg) {
    return PoissonSolver(rhs.grid(), cfg).solve(rhs);
}

double inv_norm_estimate(const GridPtr& grid, const PoissonConfig& cfg) {
    MeshFunction rhs(grid);
    for (const GridIndex& x : grid->interior()) rhs[x] = -1.0;
    return max_norm(poisson_solve(rhs, cfg), Region::Interior);
}

}  // namespace mafd
