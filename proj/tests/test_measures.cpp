#include <cmath>
#include <numbers>

#include "doctest.h"
#include "mafd/grid.hpp"
#include "mafd/measures.hpp"
#include "mafd/rng.hpp"

using namespace mafd;

namespace {

const Rect kUnit{0.0, 0.0, 1.0, 1.0};
const double kPi = std::numbers::pi;

MeasureSpec two_dirac_measure() {
    MeasureSpec m;
    m.atoms = {{0.25, 0.5, 0.5 * kPi}, {0.75, 0.5, 0.5 * kPi}};
    return m;
}

}  // namespace

TEST_CASE("build_rhs: single atom lands at the node with weight w/h^2") {
    const GridPtr grid = build_grid({kUnit, 0.25});
    MeasureSpec m;
    m.atoms = {{0.25, 0.5, 0.5 * kPi}};
    const MeshFunction f = build_rhs(m, grid);
    for (const GridIndex& x : grid->interior()) {
        if (x == GridIndex{1, 2}) {
            CHECK(f[x] == doctest::Approx(8.0 * kPi).epsilon(1e-14));
        } else {
            CHECK(f[x] == 0.0);
        }
    }
    for (const GridIndex& x : grid->boundary()) CHECK(f[x] == 0.0);
}

TEST_CASE("build_rhs: densities sample pointwise on the interior") {
    const GridPtr grid = build_grid({kUnit, 0.25});
    MeasureSpec m;
    m.density = [](double, double) { return 1.0; };
    const MeshFunction f = build_rhs(m, grid);
    for (const GridIndex& x : grid->interior()) CHECK(f[x] == 1.0);
    for (const GridIndex& x : grid->boundary()) CHECK(f[x] == 0.0);
}

TEST_CASE("build_rhs: two-Dirac discrete mass is exactly pi") {
    for (double h : {0.25, 0.125, 1.0 / 32.0}) {
        const GridPtr grid = build_grid({kUnit, h});
        const MeshFunction f = build_rhs(two_dirac_measure(), grid);
        CHECK(measure_of_box(f, {0.0, 0.0, 1.0, 1.0}) == doctest::Approx(kPi).epsilon(1e-13));
    }
}

TEST_CASE("build_rhs: atoms off nodes keep their mass, ties break row-major") {
    const GridPtr grid = build_grid({kUnit, 0.25});
    MeasureSpec m;
    m.atoms = {{0.37, 0.52, 2.0}};
    const MeshFunction f = build_rhs(m, grid);
    CHECK(measure_of_box(f, {0.0, 0.0, 1.0, 1.0}) == doctest::Approx(2.0).epsilon(1e-13));

    // Equidistant from four nodes: the smallest row-major interior node wins.
    MeasureSpec tie;
    tie.atoms = {{0.375, 0.375, 1.0}};
    const MeshFunction g = build_rhs(tie, grid);
    CHECK(g[{1, 1}] == doctest::Approx(16.0).epsilon(1e-14));
    CHECK(g[{2, 1}] == 0.0);
    CHECK(g[{1, 2}] == 0.0);
    CHECK(g[{2, 2}] == 0.0);
}

TEST_CASE("build_rhs: bilinear spreading conserves mass and degenerates to lumping on nodes") {
    const GridPtr grid = build_grid({kUnit, 0.25});
    MeasureSpec off;
    off.atoms = {{0.3, 0.6, 1.5}};
    const MeshFunction f = build_rhs(off, grid, DiracSpread::Bilinear);
    CHECK(measure_of_box(f, {0.0, 0.0, 1.0, 1.0}) == doctest::Approx(1.5).epsilon(1e-13));
    int support = 0;
    for (const GridIndex& x : grid->interior()) support += f[x] != 0.0;
    CHECK(support == 4);

    MeasureSpec on;
    on.atoms = {{0.25, 0.5, 1.5}};
    const MeshFunction lumped = build_rhs(on, grid, DiracSpread::Nearest);
    const MeshFunction spread = build_rhs(on, grid, DiracSpread::Bilinear);
    CHECK(max_norm_diff(lumped, spread, Region::All) <= 1e-12 * 16.0 * 1.5);
}

TEST_CASE("build_rhs validation") {
    const GridPtr grid = build_grid({kUnit, 0.25});
    MeasureSpec bad_weight;
    bad_weight.atoms = {{0.5, 0.5, 0.0}};
    CHECK_THROWS_AS(build_rhs(bad_weight, grid), std::invalid_argument);

    MeasureSpec outside;
    outside.atoms = {{1.0, 0.5, 1.0}};
    CHECK_THROWS_AS(build_rhs(outside, grid), std::invalid_argument);

    // A strip grid with no interior node at all: degenerate for atom loads.
    const GridPtr strip = build_grid({{0.0, 0.0, 1.0, 2.0}, 1.0});
    MeasureSpec m;
    m.atoms = {{0.5, 1.0, 1.0}};
    CHECK_THROWS_AS(build_rhs(m, strip), std::invalid_argument);
}

TEST_CASE("measure_of_box on the two-Dirac load") {
    const GridPtr grid = build_grid({kUnit, 1.0 / 16.0});
    const MeshFunction f = build_rhs(two_dirac_measure(), grid);
    CHECK(measure_of_box(f, {0.0, 0.0, 1.0, 1.0}) == doctest::Approx(kPi).epsilon(1e-13));
    CHECK(measure_of_box(f, {0.05, 0.3, 0.45, 0.7}) ==
          doctest::Approx(0.5 * kPi).epsilon(1e-13));
    CHECK(measure_of_box(f, {0.3, 0.1, 0.7, 0.2}) == 0.0);
}

TEST_CASE("reference_measure: atoms, densities, degenerate boxes") {
    CHECK(reference_measure(two_dirac_measure(), {0.05, 0.3, 0.45, 0.7}) ==
          doctest::Approx(0.5 * kPi).epsilon(1e-14));
    CHECK(reference_measure(two_dirac_measure(), {0.0, 0.0, 1.0, 1.0}) ==
          doctest::Approx(kPi).epsilon(1e-14));

    MeasureSpec unit;
    unit.density = [](double, double) { return 1.0; };
    CHECK(reference_measure(unit, {0.25, 0.25, 0.75, 0.75}) ==
          doctest::Approx(0.25).epsilon(1e-10));

    MeasureSpec empty;
    CHECK(reference_measure(empty, {0.4, 0.4, 0.4, 0.4}) == 0.0);

    // Atom exactly on the box boundary is rejected.
    CHECK_THROWS_AS(reference_measure(two_dirac_measure(), {0.25, 0.3, 0.45, 0.7}),
                    std::invalid_argument);
}

TEST_CASE("weak convergence of density loads on a fixed off-lattice box") {
    MeasureSpec m;
    m.density = [](double x, double y) { return 1.0 + x + y * y; };
    const BorelBox box{0.21, 0.13, 0.79, 0.67};
    const double ref = reference_measure(m, box);
    // The box-clipping error is O(h) with a lattice-alignment-dependent
    // constant, so widely separated h values are compared.
    double coarse = 0.0, fine = 0.0;
    {
        const GridPtr grid = build_grid({kUnit, 1.0 / 16.0});
        coarse = std::abs(measure_of_box(build_rhs(m, grid), box) - ref);
    }
    {
        const GridPtr grid = build_grid({kUnit, 1.0 / 256.0});
        fine = std::abs(measure_of_box(build_rhs(m, grid), box) - ref);
    }
    CHECK(fine < coarse);
    CHECK(fine <= 0.005 * ref);
}

TEST_CASE("measure JSON round-trip") {
    DensityRegistry registry;
    registry["unit"] = [](double, double) { return 1.0; };

    MeasureSpec m = two_dirac_measure();
    m.density = registry["unit"];
    m.density_name = "unit";
    const std::string text = measure_to_json(m);
    const MeasureSpec back = measure_from_json(text, registry);
    REQUIRE(back.atoms.size() == 2);
    CHECK(back.atoms[0].x == 0.25);
    CHECK(back.atoms[1].w == doctest::Approx(0.5 * kPi).epsilon(1e-16));
    CHECK(back.density_name == "unit");
    CHECK(back.density(0.3, 0.9) == 1.0);

    MeasureSpec atoms_only = two_dirac_measure();
    const MeasureSpec back2 = measure_from_json(measure_to_json(atoms_only), registry);
    CHECK(!back2.density);

    CHECK_THROWS_AS(measure_from_json(R"({"atoms":[],"density":"missing"})", registry),
                    std::invalid_argument);
}
