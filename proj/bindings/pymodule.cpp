#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mafd/grid.hpp"
#include "mafd/ma_operator.hpp"
#include "mafd/measures.hpp"
#include "mafd/poisson.hpp"
#include "mafd/problems.hpp"
#include "mafd/solvers.hpp"
#include "mafd/stencil.hpp"

namespace py = pybind11;
using namespace mafd;

namespace {

// pybind11 holders must be non-const smart pointers; wrap the const handle.
struct PyGrid {
    GridPtr grid;
};

py::array_t<double> to_array(const MeshFunction& v) {
    const Grid& grid = *v.grid();
    py::array_t<double> out({grid.nx() + 1, grid.ny() + 1});
    auto buf = out.mutable_unchecked<2>();
    for (int i = 0; i <= grid.nx(); ++i) {
        for (int j = 0; j <= grid.ny(); ++j) buf(i, j) = v[{i, j}];
    }
    return out;
}

MeshFunction from_array(const GridPtr& grid, const py::array_t<double>& a) {
    const auto buf = a.unchecked<2>();
    if (buf.shape(0) != grid->nx() + 1 || buf.shape(1) != grid->ny() + 1) {
        throw std::invalid_argument("array shape does not match the grid");
    }
    MeshFunction v(grid);
    for (int i = 0; i <= grid->nx(); ++i) {
        for (int j = 0; j <= grid->ny(); ++j) v[{i, j}] = buf(i, j);
    }
    return v;
}

OperatorConfig make_opcfg(int stencil_width, double epsilon, double epsilon_sign) {
    OperatorConfig cfg;
    cfg.stencil = enumerate_bases(stencil_width);
    cfg.epsilon = epsilon;
    cfg.epsilon_sign = epsilon_sign;
    return cfg;
}

SolveMethod method_of(const std::string& name) {
    if (name == "basic") return SolveMethod::Basic;
    if (name == "precond") return SolveMethod::Preconditioned;
    throw std::invalid_argument("method must be 'basic' or 'precond'");
}

PoissonConfig poisson_of(const std::string& name, double rel_tol) {
    PoissonConfig cfg;
    if (name == "fast") {
        cfg.method = PoissonMethod::FastDiagonalization;
    } else if (name == "iterative") {
        cfg.method = PoissonMethod::Iterative;
    } else {
        throw std::invalid_argument("poisson must be 'fast' or 'iterative'");
    }
    cfg.rel_tol = rel_tol;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Wide-stencil finite-difference solver for the Dirichlet Monge-Ampere equation";

    py::class_<PyGrid>(m, "Grid")
        .def_property_readonly("nx", [](const PyGrid& g) { return g.grid->nx(); })
        .def_property_readonly("ny", [](const PyGrid& g) { return g.grid->ny(); })
        .def_property_readonly("h", [](const PyGrid& g) { return g.grid->h(); })
        .def_property_readonly("num_interior",
                               [](const PyGrid& g) { return g.grid->interior().size(); })
        .def_property_readonly("num_boundary",
                               [](const PyGrid& g) { return g.grid->boundary().size(); });

    m.def(
        "build_grid",
        [](double ax, double ay, double bx, double by, double h) {
            return PyGrid{build_grid({{ax, ay, bx, by}, h})};
        },
        py::arg("ax"), py::arg("ay"), py::arg("bx"), py::arg("by"), py::arg("h"),
        "Builds the lattice of [ax,bx] x [ay,by] with mesh length h");
    m.def(
        "unit_square_grid",
        [](double h) { return PyGrid{build_grid({{0.0, 0.0, 1.0, 1.0}, h})}; }, py::arg("h"));

    m.def(
        "restrict",
        [](const std::function<double(double, double)>& f, const PyGrid& g) {
            return to_array(restrict_to_grid(f, g.grid));
        },
        py::arg("f"), py::arg("grid"), "Samples f at every node; returns an (nx+1, ny+1) array");

    m.def(
        "stencil_bases",
        [](int width) {
            const StencilSet stencil = enumerate_bases(width);
            std::vector<std::pair<std::pair<int, int>, std::pair<int, int>>> out;
            for (const OrthogonalBasis& b : stencil.bases()) {
                out.push_back({{b.a1.p, b.a1.q}, {b.a2.p, b.a2.q}});
            }
            return out;
        },
        py::arg("width") = 2, "Canonical orthogonal bases with components bounded by width");

    m.def(
        "ma_apply",
        [](const PyGrid& g, const py::array_t<double>& v, int stencil_width, double epsilon,
           double epsilon_sign) {
            return to_array(ma_apply_field(from_array(g.grid, v),
                                           make_opcfg(stencil_width, epsilon, epsilon_sign)));
        },
        py::arg("grid"), py::arg("v"), py::arg("stencil_width") = 2, py::arg("epsilon") = 1e-14,
        py::arg("epsilon_sign") = 1.0, "Wide-stencil operator on every interior node");

    m.def(
        "is_discrete_convex",
        [](const PyGrid& g, const py::array_t<double>& v, int stencil_width) {
            return is_discrete_convex(from_array(g.grid, v), enumerate_bases(stencil_width));
        },
        py::arg("grid"), py::arg("v"), py::arg("stencil_width") = 2);

    m.def(
        "discrete_ma_measure",
        [](const PyGrid& g, const py::array_t<double>& v, double x0, double y0, double x1,
           double y1, int stencil_width, double epsilon) {
            return discrete_ma_measure(from_array(g.grid, v), BorelBox{x0, y0, x1, y1},
                                       make_opcfg(stencil_width, epsilon, 1.0));
        },
        py::arg("grid"), py::arg("v"), py::arg("x0"), py::arg("y0"), py::arg("x1"), py::arg("y1"),
        py::arg("stencil_width") = 2, py::arg("epsilon") = 0.0);

    m.def(
        "c0_bound", [](const PyGrid& g) { return c0_bound(*g.grid); }, py::arg("grid"));

    m.def(
        "lipschitz_estimate",
        [](const PyGrid& g, int trials, std::uint64_t seed, int stencil_width) {
            return lipschitz_estimate(make_opcfg(stencil_width, 0.0, 1.0), g.grid, trials, seed);
        },
        py::arg("grid"), py::arg("trials"), py::arg("seed") = 0, py::arg("stencil_width") = 2);

    m.def(
        "poisson_solve",
        [](const PyGrid& g, const py::array_t<double>& rhs, const std::string& method,
           double rel_tol) {
            return to_array(poisson_solve(from_array(g.grid, rhs), poisson_of(method, rel_tol)));
        },
        py::arg("grid"), py::arg("rhs"), py::arg("method") = "fast", py::arg("rel_tol") = 1e-12,
        "Solves Lap_h z = rhs with zero boundary data");

    m.def(
        "inv_norm_estimate",
        [](const PyGrid& g, const std::string& method) {
            return inv_norm_estimate(g.grid, poisson_of(method, 1e-12));
        },
        py::arg("grid"), py::arg("method") = "fast");

    m.def("problem_names", [] { return problem_names(); });

    py::class_<SolveResult>(m, "SolveResult")
        .def_property_readonly("solution",
                               [](const SolveResult& r) { return to_array(r.solution); })
        .def_property_readonly("grid",
                               [](const SolveResult& r) { return PyGrid{r.solution.grid()}; })
        .def_readonly("iterations", &SolveResult::iterations)
        .def_readonly("residual_history", &SolveResult::residual_history)
        .def_readonly("converged", &SolveResult::converged)
        .def_readonly("wall_ms", &SolveResult::wall_ms);

    m.def(
        "solve",
        [](const std::string& problem, double h, const std::string& method, double mu, double tol,
           long max_iter, const std::string& init, int stencil_width, double epsilon,
           const std::string& poisson, const std::string& dirac_spread) {
            SolverConfig cfg;
            cfg.method = method_of(method);
            cfg.mu = mu;
            cfg.tol = tol;
            cfg.max_iter = max_iter;
            if (init == "auto") {
                cfg.init = InitialGuess::Auto;
            } else if (init == "exact") {
                cfg.init = InitialGuess::ExactRestriction;
            } else if (init == "extension") {
                cfg.init = InitialGuess::BoundaryExtension;
            } else {
                throw std::invalid_argument("init must be 'auto', 'exact', or 'extension'");
            }
            return solve(problem_by_name(problem), h, cfg,
                         make_opcfg(stencil_width, epsilon, 1.0), poisson_of(poisson, 1e-12),
                         dirac_spread == "bilinear" ? DiracSpread::Bilinear
                                                    : DiracSpread::Nearest);
        },
        py::arg("problem"), py::arg("h"), py::arg("method") = "precond", py::arg("mu") = 50.0,
        py::arg("tol") = 1e-8, py::arg("max_iter") = 1000000, py::arg("init") = "auto",
        py::arg("stencil_width") = 2, py::arg("epsilon") = 1e-14, py::arg("poisson") = "fast",
        py::arg("dirac_spread") = "nearest");

    m.def(
        "max_error_vs_exact",
        [](const std::string& problem, const SolveResult& result) {
            const Problem p = problem_by_name(problem);
            if (!p.has_exact()) throw std::invalid_argument("problem has no exact solution");
            const MeshFunction exact = restrict_to_grid(p.exact, result.solution.grid());
            return max_norm_diff(result.solution, exact, Region::Interior);
        },
        py::arg("problem"), py::arg("result"));

    m.def(
        "contraction_ratio",
        [](const std::string& method, double mu, double h, int trials, std::uint64_t seed,
           int stencil_width) {
            const GridPtr grid = build_grid({{0.0, 0.0, 1.0, 1.0}, h});
            return contraction_ratio(method_of(method), mu, grid,
                                     make_opcfg(stencil_width, 1e-14, 1.0), trials, seed);
        },
        py::arg("method"), py::arg("mu"), py::arg("h"), py::arg("trials") = 100,
        py::arg("seed") = 0, py::arg("stencil_width") = 2);

    m.def(
        "build_rhs",
        [](const std::string& problem, const PyGrid& g, const std::string& spread) {
            return to_array(build_rhs(problem_by_name(problem).measure, g.grid,
                                      spread == "bilinear" ? DiracSpread::Bilinear
                                                           : DiracSpread::Nearest));
        },
        py::arg("problem"), py::arg("grid"), py::arg("spread") = "nearest");

    m.def(
        "reference_measure",
        [](const std::string& problem, double x0, double y0, double x1, double y1) {
            return reference_measure(problem_by_name(problem).measure, BorelBox{x0, y0, x1, y1});
        },
        py::arg("problem"), py::arg("x0"), py::arg("y0"), py::arg("x1"), py::arg("y1"));

    m.def(
        "exact_solution",
        [](const std::string& problem, double x, double y) {
            const Problem p = problem_by_name(problem);
            if (!p.has_exact()) throw std::invalid_argument("problem has no exact solution");
            return p.exact(x, y);
        },
        py::arg("problem"), py::arg("x"), py::arg("y"));

#ifdef VERSION_INFO
    m.attr("__version__") = VERSION_INFO;
#else
    m.attr("__version__") = "dev";
#endif
}
