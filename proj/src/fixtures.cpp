#include "tbar/fixtures.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "tbar/error.hpp"

namespace tbar {

namespace {

constexpr double kPi = std::numbers::pi;

// theta_1(w; q) = 2 sum_{n>=0} (-1)^n q^{(n+1/2)^2} sin((2n+1) w), nome q = e^{-pi}.
std::complex<double> theta1(std::complex<double> w) {
    const double q = std::exp(-kPi);
    std::complex<double> s = 0.0;
    for (int n = 0; n < 8; ++n) {
        const double e = (n + 0.5) * (n + 0.5);
        s += ((n % 2 == 0) ? 1.0 : -1.0) * std::pow(q, e) * std::sin(static_cast<double>(2 * n + 1) * w);
    }
    return 2.0 * s;
}

} // namespace

double vortex_phase(const Point& x, const std::vector<Vortex>& vortices, int q1, int q2) {
    // Shifting x by 1 multiplies each theta_1 factor by -1; shifting y by 1 rotates it by
    // pi - 2 pi (x - a_x). With zero total degree the only leftover is 2 pi sum d_j a_{j,x},
    // which the linear y term cancels.
    double phase = 2.0 * kPi * (q1 * x[0] + q2 * x[1]);
    double weighted_x = 0.0;
    for (const Vortex& v : vortices) {
        const std::complex<double> w(kPi * (x[0] - v.x), kPi * (x[1] - v.y));
        phase += v.degree * std::arg(theta1(w));
        weighted_x += v.degree * v.x;
    }
    return phase - 2.0 * kPi * weighted_x * x[1];
}

GridMap vortex_map(const TorusGrid& g, const std::vector<Vortex>& vortices, int q1, int q2) {
    int total = 0;
    for (const Vortex& v : vortices) total += v.degree;
    if (total != 0) throw Error(ErrorCode::InvalidArgument, "vortex degrees must sum to zero on the torus");
    return make_circle_map(g, [&](const Point& x) { return vortex_phase(x, vortices, q1, q2); });
}

GridMap linear_phase_map(const TorusGrid& g, int q1, int q2, int q3) {
    return make_circle_map(g, [=](const Point& x) { return 2.0 * kPi * (q1 * x[0] + q2 * x[1] + q3 * x[2]); });
}

GridMap radial_vortex_map(const TorusGrid& g, double cx, double cy, int d) {
    return make_circle_map(g, [=](const Point& x) { return d * std::atan2(x[1] - cy, x[0] - cx); });
}

GridMap random_circle_map(const TorusGrid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 2.0 * kPi);
    GridMap u{g, Target::Circle, 2, {}};
    u.values.resize(static_cast<std::size_t>(g.num_vertices()));
    for (auto& a : u.values) a = unif(rng);
    return u;
}

GridMap perturb_circle_map(const GridMap& u, double amplitude, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    struct Mode {
        int kx, ky;
        double a, phase;
    };
    std::vector<Mode> modes;
    for (int kx = 0; kx <= 2; ++kx)
        for (int ky = 0; ky <= 2; ++ky) {
            if (kx == 0 && ky == 0) continue;
            modes.push_back({kx, ky, unif(rng), kPi * unif(rng)});
        }
    GridMap out = u;
    const TorusGrid& g = u.grid;
    for (std::int64_t v = 0; v < g.num_vertices(); ++v) {
        const Point x = g.vertex_position(g.vertex_base(v));
        double s = 0.0;
        for (const Mode& md : modes) s += md.a * std::sin(2.0 * kPi * (md.kx * x[0] + md.ky * x[1]) + md.phase);
        out.values[static_cast<std::size_t>(v)] = wrap_angle(u.angle(v) + amplitude * s / modes.size());
    }
    return out;
}

GridMap sine_sphere_map(const TorusGrid& g, const Point& c) {
    if (g.n != 3) throw Error(ErrorCode::DimensionMismatch, "sine_sphere_map needs a 3-torus grid");
    return make_sphere_map(g, [=](const Point& x) -> Value {
        return {std::sin(2.0 * kPi * (x[0] - c[0])), std::sin(2.0 * kPi * (x[1] - c[1])),
                std::sin(2.0 * kPi * (x[2] - c[2]))};
    });
}

Point plaquette_center(const TorusGrid& g, double x, double y) {
    const double h = g.h();
    auto snap = [&](double t, double off) {
        double k = std::floor((t - off) / h);
        double c = off + (k + 0.5) * h;
        c -= std::floor(c);
        return c;
    };
    return {snap(x, g.offset[0]), snap(y, g.offset[1]), 0.0};
}

} // namespace tbar
