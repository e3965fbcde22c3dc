#include <cmath>
#include <sstream>

#include "doctest.h"
#include "mafd/grid.hpp"
#include "mafd/rng.hpp"

using namespace mafd;

namespace {
const Rect kUnit{0.0, 0.0, 1.0, 1.0};
}

TEST_CASE("build_grid classifies interior and boundary counts") {
    const GridPtr quarter = build_grid({kUnit, 0.25});
    CHECK(quarter->interior().size() == 9);
    CHECK(quarter->boundary().size() == 16);

    const GridPtr half = build_grid({kUnit, 0.5});
    CHECK(half->interior().size() == 1);
    CHECK(half->boundary().size() == 8);

    const GridPtr fine = build_grid({kUnit, 1.0 / 256.0});
    CHECK(fine->interior().size() == 255 * 255);
}

TEST_CASE("build_grid rejects mesh lengths that do not divide the sides") {
    CHECK_THROWS_WITH_AS(build_grid({kUnit, 0.3}),
                         doctest::Contains("h must divide domain side"), std::invalid_argument);
    CHECK_THROWS_AS(build_grid({kUnit, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(build_grid({kUnit, -0.25}), std::invalid_argument);
    CHECK_THROWS_AS(build_grid({{0.0, 0.0, 0.0, 1.0}, 0.25}), std::invalid_argument);
    // 1/3 divides the unit side three times and is admissible.
    CHECK(build_grid({kUnit, 1.0 / 3.0})->nx() == 3);
}

TEST_CASE("node positions land exactly on the far boundary") {
    const GridPtr grid = build_grid({kUnit, 1.0 / 3.0});
    CHECK(grid->position({3, 1}).x == 1.0);
    CHECK(grid->position({1, 3}).y == 1.0);
}

TEST_CASE("partition: every node is exactly one of interior or boundary") {
    for (double h : {0.5, 0.25, 0.125, 1.0 / 3.0, 0.1}) {
        const GridPtr grid = build_grid({{0.0, -1.0, 2.0, 1.0}, h});
        CHECK(grid->interior().size() + grid->boundary().size() == grid->num_nodes());
        for (const GridIndex& x : grid->interior()) {
            CHECK(grid->is_interior(x));
            CHECK(!grid->is_boundary(x));
        }
        for (const GridIndex& x : grid->boundary()) {
            CHECK(grid->is_boundary(x));
            CHECK(!grid->is_interior(x));
        }
    }
}

TEST_CASE("restrict samples node positions") {
    const GridPtr grid = build_grid({kUnit, 0.5});
    const MeshFunction ones = restrict_to_grid([](double, double) { return 1.0; }, grid);
    for (double v : ones.values()) CHECK(v == 1.0);

    const MeshFunction xs = restrict_to_grid([](double x, double) { return x; }, grid);
    CHECK(xs[{0, 1}] == 0.0);
    CHECK(xs[{1, 1}] == 0.5);
    CHECK(xs[{2, 1}] == 1.0);
}

TEST_CASE("restrict is linear nodewise") {
    const GridPtr grid = build_grid({kUnit, 0.125});
    const auto f = [](double x, double y) { return std::sin(3.0 * x) + y * y; };
    const auto g = [](double x, double y) { return std::exp(x - y); };
    const double alpha = 0.7, beta = -2.25;
    const MeshFunction combo = restrict_to_grid(
        [&](double x, double y) { return alpha * f(x, y) + beta * g(x, y); }, grid);
    const MeshFunction rf = restrict_to_grid(f, grid);
    const MeshFunction rg = restrict_to_grid(g, grid);
    for (int i = 0; i <= grid->nx(); ++i) {
        for (int j = 0; j <= grid->ny(); ++j) {
            const GridIndex x{i, j};
            CHECK(combo[x] == doctest::Approx(alpha * rf[x] + beta * rg[x]).epsilon(1e-14));
        }
    }
}

TEST_CASE("max_norm over an empty region is zero") {
    // A 1 x 2 strip of cells has no interior node at all.
    const GridPtr strip = build_grid({{0.0, 0.0, 1.0, 2.0}, 1.0});
    CHECK(strip->interior().empty());
    MeshFunction v(strip, 5.0);
    CHECK(max_norm(v, Region::Interior) == 0.0);
    CHECK(max_norm(v, Region::Boundary) == 5.0);
}

TEST_CASE("max_norm over regions") {
    const GridPtr grid = build_grid({kUnit, 0.25});
    MeshFunction v(grid, -3.0);
    CHECK(max_norm(v, Region::All) == 3.0);

    const MeshFunction xy = restrict_to_grid([](double x, double y) { return x * y; }, grid);
    CHECK(max_norm(xy, Region::All) == 1.0);             // corner (1,1)
    CHECK(max_norm(xy, Region::Interior) == 9.0 / 16.0); // (3/4, 3/4)
}

TEST_CASE("max_norm_diff") {
    const GridPtr grid = build_grid({kUnit, 0.25});
    const MeshFunction v = restrict_to_grid([](double x, double y) { return x + y; }, grid);
    MeshFunction w = v;
    CHECK(max_norm_diff(v, w, Region::All) == 0.0);
    for (double& x : w.values()) x += 0.375;
    CHECK(max_norm_diff(v, w, Region::All) == 0.375);

    const GridPtr other = build_grid({kUnit, 0.5});
    CHECK_THROWS_AS(max_norm_diff(v, MeshFunction(other), Region::All), std::invalid_argument);
}

TEST_CASE("max_norm is a norm on random samples") {
    const GridPtr grid = build_grid({kUnit, 0.25});
    Rng rng(41);
    for (int t = 0; t < 25; ++t) {
        MeshFunction v(grid), w(grid);
        for (double& x : v.values()) x = rng.next_symmetric();
        for (double& x : w.values()) x = rng.next_symmetric();
        const double a = 2.0 * rng.next_symmetric();
        MeshFunction av = v, sum = v;
        for (double& x : av.values()) x *= a;
        for (std::size_t k = 0; k < sum.values().size(); ++k) sum.values()[k] += w.values()[k];
        CHECK(max_norm(av, Region::All) ==
              doctest::Approx(std::abs(a) * max_norm(v, Region::All)).epsilon(1e-14));
        CHECK(max_norm(sum, Region::All) <=
              max_norm(v, Region::All) + max_norm(w, Region::All) + 1e-14);
    }
}

TEST_CASE("two-Dirac exact solution restricts to zero at the strip midpoint") {
    const auto exact = [](double x, double y) {
        if (x > 0.25 && x < 0.75) return std::abs(y - 0.5);
        return std::min(std::hypot(x - 0.25, y - 0.5), std::hypot(x - 0.75, y - 0.5));
    };
    for (double h : {0.25, 0.125, 1.0 / 16.0}) {
        const GridPtr grid = build_grid({kUnit, h});
        const MeshFunction u = restrict_to_grid(exact, grid);
        const int mid = grid->nx() / 2;
        CHECK(u[{mid, mid}] == 0.0);
    }
}

TEST_CASE("solution CSV round-trips and validates") {
    const GridPtr grid = build_grid({kUnit, 0.25});
    MeshFunction v(grid);
    Rng rng(7);
    for (double& x : v.values()) x = rng.next_symmetric() * 1e-3;
    std::stringstream ss;
    write_solution_csv(ss, v);

    const std::string text = ss.str();
    CHECK(text.rfind("i,j,x,y,value\n", 0) == 0);

    std::stringstream in(text);
    const MeshFunction back = read_solution_csv(in, grid);
    CHECK(max_norm_diff(v, back, Region::All) == 0.0);

    std::stringstream truncated("i,j,x,y,value\n0,0,0,0,1.5\n");
    CHECK_THROWS_AS(read_solution_csv(truncated, grid), std::invalid_argument);
}
