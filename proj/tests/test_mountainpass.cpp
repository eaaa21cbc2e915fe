#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "tbar/error.hpp"
#include "tbar/fixtures.hpp"
#include "tbar/mountainpass.hpp"
#include "tbar/paths.hpp"

using namespace tbar;

namespace {

constexpr double kPi = std::numbers::pi;

GridMap random_ambient(const TorusGrid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.2, 1.2);
    return make_ambient_map(g, 2, [&](const Point&) { return Value{U(rng), U(rng), 0.0}; });
}

/// Largest component error of the analytic gradient against central differences,
/// relative to the largest gradient component.
double gradient_error(const GridMap& w, const GLConfig& cfg) {
    const GridMap g = gl_gradient(w, cfg);
    double worst = 0.0, scale = 0.0;
    for (double x : g.values) scale = std::max(scale, std::abs(x));
    for (std::size_t i = 0; i < w.values.size(); ++i) {
        const double step = 1e-6;
        GridMap a = w, b = w;
        a.values[i] += step;
        b.values[i] -= step;
        const double fd = (gl_energy(a, cfg) - gl_energy(b, cfg)) / (2 * step);
        worst = std::max(worst, std::abs(fd - g.values[i]));
    }
    return worst / scale;
}

} // namespace

TEST_CASE("Ginzburg-Landau energy cases") {
    const TorusGrid g = make_grid(2, 16);
    CHECK(gl_energy(to_ambient(constant_circle_map(g, 1.3)), GLConfig{1.9, 0.1}) == doctest::Approx(0.0).scale(1e-12));
    const GridMap origin = make_ambient_map(g, 2, [](const Point&) { return Value{0.0, 0.0, 0.0}; });
    for (double eps : {0.2, 0.05}) {
        const GLConfig cfg{1.9, eps};
        CHECK(gl_energy(origin, cfg) == doctest::Approx(std::pow(eps, -1.9) / 4));
    }
    CHECK(gl_potential({0.0, 0.0, 0.0}, 2) == doctest::Approx(0.25));
    CHECK(gl_potential({0.6, 0.8, 0.0}, 2) == doctest::Approx(0.0).scale(1e-15));
}

TEST_CASE("target-valued maps: chordal energy is close to geodesic and independent of eps") {
    const GridMap u = make_circle_map(make_grid(2, 64), [](const Point& x) {
        return 2 * kPi * x[0] + 0.5 * std::sin(2 * kPi * x[1]);
    });
    const GridMap w = to_ambient(u);
    for (double p : {1.5, 1.9}) {
        const double a = gl_energy(w, {p, 0.2}), b = gl_energy(w, {p, 0.01});
        CHECK(a == doctest::Approx(b).epsilon(1e-10));
        CHECK(std::abs(a - p_energy(u, p)) <= 0.05 * p_energy(u, p));
    }
}

TEST_CASE("gradient of a constant target-valued map vanishes") {
    const GridMap w = to_ambient(constant_circle_map(make_grid(2, 8), 0.7));
    const GridMap g = gl_gradient(w, {1.99, 0.05});
    double norm = 0.0;
    for (double x : g.values) norm += x * x;
    CHECK(std::sqrt(norm) < 1e-6);
}

TEST_CASE("property: gradient matches central differences") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const GridMap w = random_ambient(make_grid(2, 8), seed);
        const GLConfig cfg{1.5 + 0.1 * static_cast<double>(seed), 0.3};
        CAPTURE(seed);
        CHECK(gradient_error(w, cfg) < 1e-5);
    }
}

TEST_CASE("gradient descent lowers the energy and the gradient") {
    GridMap w = random_ambient(make_grid(2, 8), 42);
    const GLConfig cfg{1.9, 0.3};
    double e = gl_energy(w, cfg);
    double gnorm0 = 0.0;
    for (double x : gl_gradient(w, cfg).values) gnorm0 += x * x;
    double step = 1e-3;
    for (int it = 0; it < 3000; ++it) {
        const GridMap g = gl_gradient(w, cfg);
        GridMap next = w;
        for (std::size_t i = 0; i < w.values.size(); ++i) next.values[i] -= step * g.values[i];
        const double en = gl_energy(next, cfg);
        if (en < e) {
            w = next;
            e = en;
            step *= 1.1;
        } else {
            step *= 0.5;
        }
    }
    double gnorm = 0.0;
    for (double x : gl_gradient(w, cfg).values) gnorm += x * x;
    CHECK(gnorm < 1e-2 * gnorm0);
}

TEST_CASE("projection onto the target") {
    const GridMap w = to_ambient(linear_phase_map(make_grid(2, 8), 1, 0));
    const ProjectionResult same = project_to_target(w);
    CHECK(same.max_distance == doctest::Approx(0.0).scale(1e-12));
    GridMap big = w;
    for (double& x : big.values) x *= 1.2;
    const ProjectionResult r = project_to_target(big);
    CHECK(r.max_distance == doctest::Approx(0.2));
    for (std::int64_t v = 0; v < w.size(); ++v)
        CHECK(std::abs(wrap_diff(r.map.angle(v) - linear_phase_map(make_grid(2, 8), 1, 0).angle(v))) < 1e-12);
    GridMap hole = w;
    hole.values[6] = hole.values[7] = 0.0;
    try {
        project_to_target(hole);
        FAIL("expected an unsafe projection");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ProjectionUnsafe);
    }
}

TEST_CASE("string method with equal endpoints") {
    const GridMap u = linear_phase_map(make_grid(2, 8), 1, 0);
    const StringResult r = string_method(u, u, {1.9, 0.1});
    CHECK(r.gamma_hat == doctest::Approx(p_energy(u, 1.9)).epsilon(0.05));
    CHECK(r.gamma_hat == doctest::Approx(gl_energy(to_ambient(u), {1.9, 0.1})));
}

TEST_CASE("string method between homotopic constants") {
    const GridMap u = constant_circle_map(make_grid(2, 8), 0.0), v = constant_circle_map(make_grid(2, 8), 1.5);
    StringOptions opts;
    opts.beads = 8;
    opts.iters = 400;
    const StringResult r = string_method(u, v, {1.9, 0.1}, opts);
    CHECK(r.gamma_hat < 1e-6);
}

TEST_CASE("string method max energy never increases") {
    const GridMap u = constant_circle_map(make_grid(2, 8), 0.0), v = linear_phase_map(make_grid(2, 8), 0, 1);
    StringOptions opts;
    opts.beads = 8;
    opts.iters = 150;
    opts.noise = 1e-3;
    opts.seed = 3;
    const StringResult r = string_method(u, v, {1.95, 0.2}, opts);
    REQUIRE(!r.max_history.empty());
    for (std::size_t i = 1; i < r.max_history.size(); ++i) REQUIRE(r.max_history[i] <= r.max_history[i - 1] * (1 + 1e-12));
    CHECK(r.gamma_hat >= gl_energy(to_ambient(v), {1.95, 0.2}) - 1e-9);
    CHECK(std::isfinite(r.saddle_gradient));
    // Deterministic given the seed.
    CHECK(string_method(u, v, {1.95, 0.2}, opts).gamma_hat == r.gamma_hat);
}

TEST_CASE("sandwich report cases") {
    const TorusGrid g = make_grid(2, 8);
    SandwichOptions opts;
    opts.string.beads = 8;
    opts.string.iters = 200;
    const SandwichReport zero = sandwich_report(constant_circle_map(g, 0.0), constant_circle_map(g, 1.0), 1.95, {0.2, 0.1}, opts);
    CHECK(zero.hl_sup < 1e-9);
    for (const auto& row : zero.rows) CHECK(row.gamma_gl < 1e-6);

    const GridMap u = constant_circle_map(g, 0.0);
    const SandwichReport one = sandwich_report(u, linear_phase_map(g, 0, 1), 1.95, {0.2, 0.1}, opts);
    const SandwichReport two = sandwich_report(u, linear_phase_map(g, 0, 2), 1.95, {0.2, 0.1}, opts);
    REQUIRE(one.rows.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(one.rows[i].below_hl);
        CHECK(two.rows[i].gamma_gl > one.rows[i].gamma_gl);
    }
    CHECK(std::isnan(one.sequence_barrier));
}

TEST_CASE("ambient L2 distance") {
    const GridMap a = to_ambient(constant_circle_map(make_grid(2, 4), 0.0));
    const GridMap b = to_ambient(constant_circle_map(make_grid(2, 4), kPi));
    CHECK(ambient_l2(a, b) == doctest::Approx(2.0));
    CHECK(ambient_l2(a, a) == 0.0);
}
