#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "tbar/balls.hpp"
#include "tbar/degrees.hpp"
#include "tbar/error.hpp"
#include "tbar/fixtures.hpp"

using namespace tbar;

namespace {

constexpr double kPi = std::numbers::pi;

/// Random admissible configuration: up to 8 singularities of degree +-1 or +-2 whose
/// initial balls are disjoint, away from the chart boundary.
std::vector<Singularity> random_config(std::mt19937_64& rng, double sigma0) {
    std::uniform_int_distribution<int> count(1, 8), deg(1, 2), sign(0, 1);
    std::uniform_real_distribution<double> pos(0.2, 0.8);
    const int k = count(rng);
    std::vector<Singularity> out;
    while (static_cast<int>(out.size()) < k) {
        Singularity s{{pos(rng), pos(rng), 0.0}, deg(rng) * (sign(rng) ? 1 : -1)};
        bool ok = true;
        for (const auto& t : out) {
            const double d = std::hypot(s.position[0] - t.position[0], s.position[1] - t.position[1]);
            ok = ok && d > 2 * 3.0 * sigma0 + 1e-6;
        }
        if (ok) out.push_back(s);
    }
    return out;
}

/// Cone-completed energy of plaquettes whose centers lie within radius r of c.
double energy_in_ball(const GridMap& u, const Point& c, double r, double p) {
    const TorusGrid& g = u.grid;
    return cone_completed_energy_cells(u, p, [&](std::int64_t v) {
        const Point x = g.vertex_position(g.vertex_base(v));
        double d2 = 0.0;
        for (int a = 0; a < 2; ++a) {
            double d = x[a] + 0.5 * g.h() - c[a];
            d -= std::round(d);
            d2 += d * d;
        }
        return std::sqrt(d2) < r;
    });
}

} // namespace

TEST_CASE("initial balls") {
    const BallCollection one = initial_balls({{{0.3, 0.3, 0.0}, 1}}, 0.05);
    REQUIRE(one.balls.size() == 1);
    CHECK(one.balls[0].radius == doctest::Approx(0.05));
    CHECK(initial_balls({}, 0.05).balls.empty());
    const BallCollection two = initial_balls({{{0.25, 0.5, 0.0}, 1}, {{0.75, 0.5, 0.0}, 1}}, 0.1);
    REQUIRE(two.balls.size() == 2);
    CHECK(two.balls[0].radius == doctest::Approx(0.1));
    CHECK(two.balls[1].radius == doctest::Approx(0.1));
    CHECK(check_ball_invariants(two).empty());
    // Enlarged initial balls of radius 2 sigma0 would overlap at distance 0.1.
    CHECK_THROWS_AS(initial_balls({{{0.45, 0.5, 0.0}, 1}, {{0.55, 0.5, 0.0}, -1}}, 0.04), Error);
}

TEST_CASE("growth without merges keeps r/sigma") {
    const BallCollection c = grow_to_scale(initial_balls({{{0.5, 0.5, 0.0}, 1}}, 0.05), 0.2);
    REQUIRE(c.balls.size() == 1);
    CHECK(c.balls[0].radius == doctest::Approx(0.2));
    CHECK(c.events.empty());
}

TEST_CASE("opposite pair merges into a frozen ball") {
    const BallCollection c = grow_to_scale(initial_balls({{{0.45, 0.5, 0.0}, 1}, {{0.55, 0.5, 0.0}, -1}}, 0.02), 0.2);
    REQUIRE(c.balls.size() == 1);
    CHECK(c.balls[0].aggregate == 0);
    CHECK(c.balls[0].frozen);
    REQUIRE(c.events.size() == 1);
    // Tangency at 2 sigma = 0.1; the merged radius stays at 0.1 afterwards.
    CHECK(c.events[0].sigma == doctest::Approx(0.05));
    CHECK(c.balls[0].radius == doctest::Approx(0.1));
    CHECK(check_ball_invariants(c).empty());
}

TEST_CASE("like pair merges with doubled degree") {
    const BallCollection c = grow_to_scale(initial_balls({{{0.45, 0.5, 0.0}, 1}, {{0.55, 0.5, 0.0}, 1}}, 0.02), 0.2);
    REQUIRE(c.balls.size() == 1);
    CHECK(c.balls[0].aggregate == 2);
    CHECK(c.balls[0].radius >= 0.4 - 1e-12);
    CHECK(c.balls[0].radius >= 0.2 * 2 - 1e-12);
}

TEST_CASE("lower bound values") {
    CHECK(lower_bound_energy({{{0.3, 0.3, 0.0}, 1}, {{0.6, 0.3, 0.0}, -1}}, 0.4, 1.5, 2) == 0.0);
    CHECK(lower_bound_energy({{{0.3, 0.3, 0.0}, 1}}, 0.4, 1.5, 2) == doctest::Approx(4 * kPi * std::sqrt(0.2)));
    CHECK(lower_bound_energy({{{0.3, 0.3, 0.0}, 1}}, 0.4, 1.5, 2) == doctest::Approx(5.620).epsilon(1e-3));
    const double f = 2 * kPi / 0.1 * std::pow(0.1, 0.1);
    CHECK(lower_bound_energy({{{0.3, 0.3, 0.0}, 1}, {{0.6, 0.3, 0.0}, 1}}, 0.4, 1.9, 2) == doctest::Approx(2 * f));
}

TEST_CASE("property: invariants and monotone total radius over random configurations") {
    std::mt19937_64 rng(2024);
    const double sigma0 = 0.01;
    for (int trial = 0; trial < 100; ++trial) {
        const auto sings = random_config(rng, sigma0);
        BallCollection c = initial_balls(sings, sigma0);
        REQUIRE(check_ball_invariants(c).empty());
        double prev = total_radius(c);
        for (double s = 0.015; s <= 0.3; s *= 1.25) {
            c = grow_to_scale(c, s);
            CAPTURE(trial);
            CAPTURE(s);
            REQUIRE(check_ball_invariants(c) == "");
            const double tr = total_radius(c);
            REQUIRE(tr >= prev - 1e-12);
            prev = tr;
            for (const Ball& b : c.balls) {
                if (b.aggregate > 0 && !c.clamped) REQUIRE(b.radius >= s * b.aggregate - 1e-12);
                int sum = 0;
                for (int j : b.members) sum += sings[static_cast<std::size_t>(j)].degree;
                REQUIRE(sum == b.degree_sum);
            }
        }
    }
}

TEST_CASE("vortex energy inside a ball exceeds the radial profile") {
    const TorusGrid g = make_grid(2, 128);
    const Point a = plaquette_center(g, 0.25, 0.5), b = plaquette_center(g, 0.75, 0.5);
    const GridMap u = vortex_map(g, {{a[0], a[1], 1}, {b[0], b[1], -1}});
    for (double p : {1.5, 1.8, 1.95}) {
        for (double sigma : {0.05, 0.1, 0.15}) {
            const double e = energy_in_ball(u, a, sigma, p);
            CAPTURE(p);
            CAPTURE(sigma);
            CHECK(e >= F_p_eval(sigma, 2, p) * 0.9);
            CHECK(lower_bound_energy({{a, 1}}, sigma, p, 2) <= e);
        }
    }
}
