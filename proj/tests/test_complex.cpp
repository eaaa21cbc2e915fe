#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "tbar/complex.hpp"
#include "tbar/error.hpp"

using namespace tbar;

namespace {

/// Torus distance between two points, coordinate-wise minimum image.
double torus_dist(const Point& a, const Point& b, int n) {
    double d2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double d = a[i] - b[i];
        d -= std::round(d);
        d2 += d * d;
    }
    return std::sqrt(d2);
}

/// Number of coordinates of x that lie on a grid hyperplane.
int on_grid_lines(const TorusGrid& g, const Point& x) {
    int count = 0;
    for (int i = 0; i < g.n; ++i) {
        const double t = (x[i] - g.offset[i]) * g.m;
        if (std::abs(t - std::round(t)) < 1e-9) ++count;
    }
    return count;
}

} // namespace

TEST_CASE("cell counts on periodic grids") {
    const CubicalComplex c2 = build_torus_complex(2, 4);
    CHECK(c2.num_cells(0) == 16);
    CHECK(c2.num_cells(1) == 32);
    CHECK(c2.num_cells(2) == 16);
    const CubicalComplex c3 = build_torus_complex(3, 3);
    CHECK(c3.num_cells(0) == 27);
    CHECK(c3.num_cells(1) == 81);
    CHECK(c3.num_cells(2) == 81);
    CHECK(c3.num_cells(3) == 27);
}

TEST_CASE("grid validation rejects bad parameters") {
    CHECK_THROWS_AS(make_grid(4, 8), Error);
    CHECK_THROWS_AS(make_grid(2, 2), Error);
    CHECK_THROWS_AS(make_grid(2, 4, {0.3, 0.0, 0.0}), Error);
}

TEST_CASE("cell index round trip") {
    for (int n : {2, 3}) {
        const CubicalComplex c = build_torus_complex(n, 4);
        for (int d = 0; d <= n; ++d)
            for (std::int64_t i = 0; i < c.num_cells(d); ++i) REQUIRE(c.cell_index(c.cell(d, i)) == i);
    }
}

TEST_CASE("boundary of boundary vanishes exhaustively for m <= 6") {
    for (int n : {2, 3})
        for (int m = 3; m <= 6; ++m) {
            const CubicalComplex c = build_torus_complex(n, m);
            for (int d = 2; d <= n; ++d)
                for (std::int64_t i = 0; i < c.num_cells(d); ++i) {
                    std::map<std::int64_t, int> acc;
                    for (const auto& f : c.boundary(d, i))
                        for (const auto& g : c.boundary(d - 1, f.index)) acc[g.index] += f.sign * g.sign;
                    for (const auto& [idx, v] : acc) REQUIRE(v == 0);
                }
        }
}

TEST_CASE("coboundary is the transpose of boundary") {
    const CubicalComplex c = build_torus_complex(3, 3);
    for (int d = 0; d < 3; ++d)
        for (std::int64_t i = 0; i < c.num_cells(d); ++i)
            for (const auto& co : c.coboundary(c.cell(d, i))) {
                int found = 0;
                for (const auto& f : c.boundary(d + 1, co.index))
                    if (f.index == i) found += f.sign;
                REQUIRE(found == co.sign);
            }
}

TEST_CASE("dual of a square in the plane is its center") {
    const CubicalComplex c = build_torus_complex(2, 4);
    const Cell sq = c.cell(2, 5);
    const DualCell d = dual_cell(c, sq);
    CHECK(d.cell.dim == 0);
    CHECK(d.measure == doctest::Approx(1.0));
    const Point ctr = c.center(sq);
    CHECK(torus_dist(d.center, ctr, 2) < 1e-12);
    CHECK(torus_dist(d.grid.vertex_position(d.cell.base), ctr, 2) < 1e-12);
}

TEST_CASE("dual of a square in space joins the adjacent cube centers") {
    const CubicalComplex c = build_torus_complex(3, 3);
    for (std::int64_t i = 0; i < c.num_cells(2); ++i) {
        const Cell sq = c.cell(2, i);
        const DualCell d = dual_cell(c, sq);
        REQUIRE(d.cell.dim == 1);
        std::vector<Point> centers;
        for (const auto& co : c.coboundary(sq)) centers.push_back(c.center(c.cell(3, co.index)));
        REQUIRE(centers.size() == 2);
        const Point a = d.grid.vertex_position(d.cell.base);
        Index tip = d.cell.base;
        for (int ax : axes_list(d.cell.axes)) tip[ax] += 1;
        const Point b = d.grid.vertex_position(d.grid.wrap(tip));
        const bool match = (torus_dist(a, centers[0], 3) < 1e-12 && torus_dist(b, centers[1], 3) < 1e-12) ||
                           (torus_dist(a, centers[1], 3) < 1e-12 && torus_dist(b, centers[0], 3) < 1e-12);
        REQUIRE(match);
    }
}

TEST_CASE("distinct dual cells of the same dimension are distinct cells") {
    for (int n : {2, 3}) {
        const CubicalComplex c = build_torus_complex(n, 4);
        for (int k = 0; k <= n; ++k) {
            std::map<std::int64_t, int> seen;
            const CubicalComplex dual(dual_grid(c.grid()));
            for (std::int64_t i = 0; i < c.num_cells(k); ++i) {
                const DualCell d = dual_cell(c, c.cell(k, i));
                REQUIRE(++seen[dual.cell_index(d.cell)] == 1);
            }
        }
    }
}

TEST_CASE("dual cell measure agrees with a sampled retraction preimage") {
    // Stratified sampling over the complementary plane through the cell center,
    // counting points whose retraction onto the k-skeleton lands on that center.
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int n : {2, 3}) {
        const CubicalComplex c = build_torus_complex(n, 4, n == 2 ? Point{0.05, 0.1, 0.0} : Point{0.0, 0.0, 0.0});
        const double h = c.grid().h();
        for (int k = 0; k < n; ++k) {
            const Cell sigma = c.cell(k, c.num_cells(k) / 2 + 1);
            const DualCell d = dual_cell(c, sigma);
            const std::vector<int> comp = axes_list(d.cell.axes);
            const int q = static_cast<int>(comp.size());
            const int side = q == 3 ? 24 : (q == 2 ? 60 : 400);
            std::int64_t hits = 0, total = 0;
            std::array<int, 3> it{0, 0, 0};
            const std::int64_t cells = static_cast<std::int64_t>(std::pow(side, q));
            for (std::int64_t s = 0; s < cells; ++s) {
                std::int64_t r = s;
                for (int a = 0; a < q; ++a) {
                    it[a] = static_cast<int>(r % side);
                    r /= side;
                }
                Point x = d.center;
                for (int a = 0; a < q; ++a) x[comp[a]] += (-1.0 + 2.0 * (it[a] + U(rng)) / side) * h;
                for (int i = 0; i < n; ++i) x[i] -= std::floor(x[i]);
                const SkeletonPoint y = Phi_retraction(c, k + 1, x);
                ++total;
                if (!y.singular && torus_dist(y.point, d.center, n) < 1e-9) ++hits;
            }
            const double estimate = std::pow(2.0 * h, q) * static_cast<double>(hits) / static_cast<double>(total);
            CAPTURE(n);
            CAPTURE(k);
            CHECK(std::abs(estimate - d.measure) <= 0.02 * d.measure);
        }
    }
}

TEST_CASE("phi retraction formula cases") {
    const double delta = 0.125;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const std::array<double, 3> x{U(rng) * delta, U(rng) * delta, 0.0};
        const PhiResult id = phi_retraction(2, delta, delta, x);
        REQUIRE(!id.singular);
        CHECK(id.y[0] == doctest::Approx(x[0]).epsilon(1e-14));
        CHECK(id.y[1] == doctest::Approx(x[1]).epsilon(1e-14));
        // Points on the cell boundary are fixed for every s.
        const std::array<double, 3> bnd{delta, U(rng) * delta, 0.0};
        const PhiResult fixed = phi_retraction(2, std::abs(U(rng)) * delta, delta, bnd);
        CHECK(fixed.y[0] == doctest::Approx(bnd[0]));
        CHECK(fixed.y[1] == doctest::Approx(bnd[1]));
    }
    const PhiResult half = phi_retraction(2, 0.0, delta, {delta / 2, -delta / 4, 0.0});
    CHECK(half.y[0] == doctest::Approx(delta));
    CHECK(half.y[1] == doctest::Approx(-delta / 2));
    CHECK(phi_retraction(2, 0.0, delta, {0.0, 0.0, 0.0}).singular);
    CHECK_THROWS_AS(phi_retraction(2, 2 * delta, delta, {0.0, 0.0, 0.0}), Error);
}

TEST_CASE("composite retraction cases") {
    const CubicalComplex c = build_torus_complex(2, 4);
    const double h = c.grid().h(), delta = h / 2;
    const Cell sq = c.cell(2, 6);
    const Point ctr = c.center(sq);
    CHECK(Phi_retraction(c, 2, ctr).singular);
    // Diagonal point at |x|_inf = delta/3 goes to 3x.
    const Point x{ctr[0] + delta / 3, ctr[1] + delta / 3, 0.0};
    const SkeletonPoint y = Phi_retraction(c, 2, x);
    REQUIRE(!y.singular);
    CHECK(torus_dist(y.point, {ctr[0] + delta, ctr[1] + delta, 0.0}, 2) < 1e-12);
    const Point off{ctr[0] + delta / 3, ctr[1] - delta / 6, 0.0};
    CHECK(torus_dist(Phi_retraction(c, 2, off).point, {ctr[0] + delta, ctr[1] - delta / 2, 0.0}, 2) < 1e-12);
    // Skeleton points are fixed.
    const Point e{0.25, 0.6, 0.0};
    CHECK(torus_dist(Phi_retraction(c, 2, e).point, e, 2) < 1e-12);
}

TEST_CASE("property: retraction images lie on the lower skeleton") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int n : {2, 3}) {
        const CubicalComplex c = build_torus_complex(n, 5, {0.03, 0.07, 0.01});
        for (int j = 1; j <= n; ++j)
            for (int trial = 0; trial < 300; ++trial) {
                const Point x{U(rng), U(rng), n == 3 ? U(rng) : 0.0};
                const SkeletonPoint y = Phi_retraction(c, j, x);
                if (y.singular) continue;
                REQUIRE(on_grid_lines(c.grid(), y.point) >= n - j + 1);
                // Retracting again onto the same skeleton changes nothing.
                const SkeletonPoint z = Phi_retraction(c, j, y.point);
                REQUIRE(!z.singular);
                REQUIRE(torus_dist(z.point, y.point, n) < 1e-12 * c.grid().h() + 1e-15);
            }
    }
}
