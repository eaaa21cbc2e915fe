#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "tbar/degrees.hpp"
#include "tbar/error.hpp"
#include "tbar/fixtures.hpp"

using namespace tbar;

namespace {

constexpr double kPi = std::numbers::pi;

/// Winding around a plaquette summed directly from the four corner angles.
int brute_winding(const GridMap& u, int x, int y) {
    const TorusGrid& g = u.grid;
    const Index c[4] = {{x, y, 0}, {x + 1, y, 0}, {x + 1, y + 1, 0}, {x, y + 1, 0}};
    double s = 0.0;
    for (int i = 0; i < 4; ++i)
        s += wrap_diff(u.angle(g.vertex_index(g.wrap(c[(i + 1) % 4]))) - u.angle(g.vertex_index(g.wrap(c[i]))));
    return static_cast<int>(std::lround(s / (2 * kPi)));
}

} // namespace

TEST_CASE("degrees of smooth maps vanish") {
    for (int d : cell_degrees(constant_circle_map(make_grid(2, 8), 0.4))) CHECK(d == 0);
    for (int q = 1; q <= 3; ++q)
        for (int d : cell_degrees(linear_phase_map(make_grid(2, 16), q, q - 1))) REQUIRE(d == 0);
}

TEST_CASE("vortex plaquettes carry their degree") {
    const TorusGrid g = make_grid(2, 16);
    const Point a = plaquette_center(g, 0.3, 0.4), b = plaquette_center(g, 0.7, 0.6);
    const GridMap u = vortex_map(g, {{a[0], a[1], 1}, {b[0], b[1], -1}});
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x) {
            const int w = plaquette_winding(u, {x, y, 0});
            REQUIRE(w == brute_winding(u, x, y));
            int expected = 0;
            if (std::abs((x + 0.5) / 16 - a[0]) < 1e-9 && std::abs((y + 0.5) / 16 - a[1]) < 1e-9) expected = 1;
            if (std::abs((x + 0.5) / 16 - b[0]) < 1e-9 && std::abs((y + 0.5) / 16 - b[1]) < 1e-9) expected = -1;
            REQUIRE(w == expected);
        }
}

TEST_CASE("half-turn edges are flagged") {
    GridMap u = constant_circle_map(make_grid(2, 4), 0.0);
    u.values[1] = kPi;
    CHECK_THROWS_AS(cell_degrees(u), Error);
    try {
        cell_degrees(u);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonInteger);
    }
}

TEST_CASE("property: plaquette degrees sum to zero and are rotation invariant") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const GridMap u = random_circle_map(make_grid(2, 12), seed);
        const std::vector<int> d = cell_degrees(u);
        long total = 0;
        for (int x : d) total += x;
        REQUIRE(total == 0);
        GridMap r = u;
        const double rot = 0.37 * static_cast<double>(seed);
        for (double& a : r.values) a = wrap_angle(a + rot);
        REQUIRE(cell_degrees(r) == d);
    }
}

TEST_CASE("property: degrees are refinement invariant for vortex fixtures") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.05, 0.95);
    for (int trial = 0; trial < 10; ++trial) {
        const TorusGrid g = make_grid(2, 8);
        const Point a = plaquette_center(g, U(rng), U(rng));
        Point b = plaquette_center(g, U(rng), U(rng));
        // Adjacent opposite vortices are not resolved by the coarse grid.
        while (std::max(std::abs(a[0] - b[0]), std::abs(a[1] - b[1])) < 2.5 * g.h()) b = plaquette_center(g, U(rng), U(rng));
        const std::vector<Vortex> vs{{a[0], a[1], 1}, {b[0], b[1], -1}};
        const GridMap coarse = vortex_map(g, vs, trial % 2, 0);
        const GridMap fine = vortex_map(g.refined(3), vs, trial % 2, 0);
        const std::vector<int> dc = cell_degrees(coarse), df = cell_degrees(fine);
        std::vector<int> summed(dc.size(), 0);
        for (std::int64_t v = 0; v < fine.size(); ++v) {
            const Index fb = fine.grid.vertex_base(v);
            summed[static_cast<std::size_t>(g.vertex_index({fb[0] / 3, fb[1] / 3, 0}))] += df[static_cast<std::size_t>(v)];
        }
        CAPTURE(trial);
        REQUIRE(summed == dc);
    }
}

TEST_CASE("sphere degrees of the sine field") {
    const GridMap u = sine_sphere_map(make_grid(3, 6), {0.13, 0.29, 0.41});
    const std::vector<int> d = cell_degrees(u);
    int plus = 0, minus = 0, total = 0;
    for (int x : d) {
        total += x;
        plus += x == 1;
        minus += x == -1;
        REQUIRE(std::abs(x) <= 1);
    }
    CHECK(total == 0);
    CHECK(plus == 4);
    CHECK(minus == 4);
}

TEST_CASE("constants") {
    CHECK(lambda_const(2) == doctest::Approx(1.0));
    CHECK(lambda_const(3) == doctest::Approx(0.5));
    CHECK(sphere_volume(2) == doctest::Approx(2 * kPi));
    CHECK(sphere_volume(3) == doctest::Approx(4 * kPi));
    CHECK(degree_constants(2, 1.5).c_p == doctest::Approx(2 * kPi));
    CHECK(F_p_eval(0.0, 2, 1.5) == 0.0);
    CHECK(F_p_eval(1.0, 2, 1.5) == doctest::Approx(4 * kPi));
    CHECK(F_p_eval(0.3, 2, 1.9) + F_p_eval(0.7, 2, 1.9) >= F_p_eval(1.0, 2, 1.9));
    CHECK_THROWS_AS(F_p_eval(1.0, 2, 2.0), Error);
}

TEST_CASE("property: F_p(s)/s is strictly decreasing") {
    for (int k : {2, 3})
        for (double frac : {0.1, 0.5, 0.9, 0.99}) {
            const double p = k - 1 + frac;
            double prev = std::numeric_limits<double>::infinity();
            for (int i = 0; i <= 120; ++i) {
                const double s = std::pow(10.0, -3.0 + 6.0 * i / 120.0);
                const double r = F_p_eval(s, k, p) / s;
                REQUIRE(r < prev);
                prev = r;
            }
        }
}

TEST_CASE("radial vortex attains the annulus bound") {
    const Point c256 = plaquette_center(make_grid(2, 256), 0.5, 0.5);
    const GridMap u = radial_vortex_map(make_grid(2, 256), c256[0], c256[1]);
    const DegreeBoundReport rep = verify_annulus_bound(u, c256[0], c256[1], 0.1, 0.4, 1.5);
    const double closed = 2 * kPi * (std::sqrt(0.4) - std::sqrt(0.1)) / 0.5;
    CHECK(closed == doctest::Approx(3.974).epsilon(1e-3));
    CHECK(rep.d == 1);
    CHECK(std::abs(rep.energy - closed) <= 0.02 * closed);
    CHECK(std::abs(rep.energy - rep.bound) <= 0.03 * rep.bound);
}

TEST_CASE("degree zero data gives a zero bound") {
    const DegreeBoundReport rep = verify_annulus_bound(linear_phase_map(make_grid(2, 64), 1, 0), 0.5, 0.5, 0.1, 0.4, 1.5);
    CHECK(rep.d == 0);
    CHECK(rep.bound == 0.0);
    CHECK(rep.satisfied);
}

TEST_CASE("property: perturbed vortices exceed the annulus bound") {
    const Point c = plaquette_center(make_grid(2, 128), 0.5, 0.5);
    const GridMap base = radial_vortex_map(make_grid(2, 128), c[0], c[1]);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const GridMap u = perturb_circle_map(base, 0.6, seed);
        const DegreeBoundReport rep = verify_annulus_bound(u, c[0], c[1], 0.1, 0.4, 1.8);
        REQUIRE(rep.d == 1);
        CHECK(rep.satisfied);
        CHECK(rep.slack > 1.0);
    }
}

TEST_CASE("square variant reports the implied constant") {
    const Point c = plaquette_center(make_grid(2, 64), 0.5, 0.5);
    const GridMap u = radial_vortex_map(make_grid(2, 64), c[0], c[1]);
    const DegreeBoundReport rep = verify_cube_bound(u, {16, 16, 0}, 32, 0.1, 1.8);
    CHECK(rep.d == 1);
    CHECK(rep.implied_constant >= 0.0);
    CHECK(rep.satisfied == (rep.implied_constant <= 1.0));
}

TEST_CASE("cone completion matches the stencil away from vortices") {
    const GridMap lin = linear_phase_map(make_grid(2, 16), 1, 1);
    CHECK(cone_completed_energy(lin, 1.7) == doctest::Approx(p_energy(lin, 1.7)).epsilon(1e-12));
    const TorusGrid g = make_grid(2, 16);
    const Point a = plaquette_center(g, 0.25, 0.5), b = plaquette_center(g, 0.75, 0.5);
    const GridMap pair = vortex_map(g, {{a[0], a[1], 1}, {b[0], b[1], -1}});
    const double lo = cone_completed_energy(pair, 1.9), hi = cone_completed_energy(pair, 1.99);
    CHECK(lo > p_energy(pair, 1.9) * 0.5);
    CHECK(hi > lo);
}
