#include "tbar/degrees.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "tbar/error.hpp"

namespace tbar {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfTurnTol = 1e-9;

double checked_diff(double from, double to) {
    const double d = wrap_diff(to - from);
    if (std::abs(std::abs(d) - kPi) < kHalfTurnTol)
        throw Error(ErrorCode::NonInteger, "edge angle gap equals pi; degree undefined");
    return d;
}

int round_degree(double total, double period) {
    const double q = total / period;
    const double r = std::round(q);
    if (std::abs(q - r) > 1e-6) throw Error(ErrorCode::NonInteger, "boundary degree is not an integer");
    return static_cast<int>(r);
}

// Signed solid angle of the geodesic triangle (a, b, c) on S^2.
double solid_angle(const Value& a, const Value& b, const Value& c) {
    const double det = a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
                       a[2] * (b[0] * c[1] - b[1] * c[0]);
    const double ab = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    const double bc = b[0] * c[0] + b[1] * c[1] + b[2] * c[2];
    const double ca = c[0] * a[0] + c[1] * a[1] + c[2] * a[2];
    const double den = 1.0 + ab + bc + ca;
    if (std::abs(det) < 1e-14 && den <= 1e-14)
        throw Error(ErrorCode::NonInteger, "degenerate image triangle; degree undefined");
    return 2.0 * std::atan2(det, den);
}

Value vertex_value(const GridMap& u, Index b) { return u.value(u.grid.vertex_index(u.grid.wrap(b))); }

int circle_degree(const GridMap& u, const Cell& sigma) {
    const auto ax = axes_list(sigma.axes);
    const int a = ax[0], c = ax[1];
    Index p0 = sigma.base, p1 = sigma.base, p2 = sigma.base, p3 = sigma.base;
    p1[a] += 1;
    p2[a] += 1;
    p2[c] += 1;
    p3[c] += 1;
    const double t0 = vertex_value(u, p0)[0], t1 = vertex_value(u, p1)[0];
    const double t2 = vertex_value(u, p2)[0], t3 = vertex_value(u, p3)[0];
    const double total = checked_diff(t0, t1) + checked_diff(t1, t2) + checked_diff(t2, t3) + checked_diff(t3, t0);
    return sigma.orientation * round_degree(total, 2.0 * kPi);
}

int sphere_degree(const GridMap& u, const Cell& sigma) {
    double total = 0.0;
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3, l = (i + 2) % 3;  // (i, j, l) cyclic, so e_j x e_l = e_i
        for (int side = 0; side < 2; ++side) {
            Index q[4];
            for (auto& x : q) x = sigma.base;
            for (auto& x : q) x[i] += side;
            q[1][j] += 1;
            q[2][j] += 1;
            q[2][l] += 1;
            q[3][l] += 1;
            Value v[4];
            for (int t = 0; t < 4; ++t) v[t] = vertex_value(u, q[t]);
            double face = solid_angle(v[0], v[1], v[2]) + solid_angle(v[0], v[2], v[3]);
            total += side == 1 ? face : -face;
        }
    }
    return sigma.orientation * round_degree(total, 4.0 * kPi);
}

} // namespace

int boundary_degree(const GridMap& u, const Cell& sigma) {
    if (u.target == Target::Circle) {
        if (sigma.dim != 2 || popcount(sigma.axes) != 2)
            throw Error(ErrorCode::DimensionMismatch, "circle degree needs a 2-cell");
        return circle_degree(u, sigma);
    }
    if (u.target == Target::Sphere) {
        if (sigma.dim != 3 || popcount(sigma.axes) != 3 || u.grid.n != 3)
            throw Error(ErrorCode::DimensionMismatch, "sphere degree needs a 3-cell of T^3");
        return sphere_degree(u, sigma);
    }
    throw Error(ErrorCode::InvalidArgument, "boundary_degree requires a target-valued map");
}

std::vector<int> cell_degrees(const GridMap& u) {
    const int k = u.target == Target::Sphere ? 3 : 2;
    if (u.target == Target::Ambient) throw Error(ErrorCode::InvalidArgument, "cell_degrees requires a target-valued map");
    if (k > u.grid.n) throw Error(ErrorCode::DimensionMismatch, "target dimension exceeds the torus dimension");
    const CubicalComplex cx(u.grid);
    std::vector<int> out(static_cast<std::size_t>(cx.num_cells(k)));
    for (std::int64_t i = 0; i < cx.num_cells(k); ++i) out[static_cast<std::size_t>(i)] = boundary_degree(u, cx.cell(k, i));
    return out;
}

int plaquette_winding(const GridMap& u, const Index& b) {
    Cell c;
    c.dim = 2;
    c.base = b;
    c.axes = 0b011;
    return boundary_degree(u, c);
}

int loop_winding(const GridMap& u, const std::vector<Point>& loop) {
    if (u.target != Target::Circle) throw Error(ErrorCode::InvalidArgument, "loop_winding needs a circle map");
    double total = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) {
        const double a = interpolate(u, loop[i])[0];
        const double b = interpolate(u, loop[(i + 1) % loop.size()])[0];
        total += checked_diff(a, b);
    }
    return round_degree(total, 2.0 * kPi);
}

double cone_completed_energy_cells(const GridMap& u, double p, const std::function<bool(std::int64_t)>& keep) {
    if (u.target != Target::Circle || u.grid.n != 2)
        throw Error(ErrorCode::InvalidArgument, "cone-completed energy needs a circle map on T^2");
    if (!(p >= 1.0 && p < 2.0)) throw Error(ErrorCode::InvalidArgument, "cone-completed energy needs 1 <= p < 2");
    const TorusGrid& g = u.grid;
    const double h = g.h();
    const double cone = 0.25 * h * h * cone_profile_integral(p) / (2.0 - p);
    const auto dens = cell_energy_density(u, p);
    double total = 0.0;
    for (std::int64_t v = 0; v < g.num_vertices(); ++v) {
        if (!keep(v)) continue;
        const Index b = g.vertex_base(v);
        if (plaquette_winding(u, b) == 0) {
            total += dens[static_cast<std::size_t>(v)] * h * h;
            continue;
        }
        const Index q[4] = {b, {b[0] + 1, b[1], 0}, {b[0] + 1, b[1] + 1, 0}, {b[0], b[1] + 1, 0}};
        for (int e = 0; e < 4; ++e) {
            const double d = std::abs(wrap_diff(vertex_value(u, q[(e + 1) % 4])[0] - vertex_value(u, q[e])[0]));
            total += cone * std::pow(d / h, p);
        }
    }
    return total;
}

double cone_completed_energy(const GridMap& u, double p) {
    return cone_completed_energy_cells(u, p, [](std::int64_t) { return true; });
}

double lambda_const(int k) {
    if (k != 2 && k != 3) throw Error(ErrorCode::InvalidArgument, "k must be 2 or 3");
    return std::pow(static_cast<double>(k - 1), 0.5 * (1 - k));
}

double sphere_volume(int k) {
    if (k != 2 && k != 3) throw Error(ErrorCode::InvalidArgument, "k must be 2 or 3");
    return k == 2 ? 2.0 * kPi : 4.0 * kPi;
}

DegreeConstants degree_constants(int k, double p) {
    DegreeConstants c;
    c.k = k;
    c.lambda = lambda_const(k);
    c.sigma_km1 = sphere_volume(k);
    c.c_p = c.sigma_km1 / std::pow(c.lambda, p / (k - 1));
    return c;
}

double F_p_eval(double s, int k, double p) {
    if (!(p > k - 1 && p < k)) throw Error(ErrorCode::InvalidArgument, "F_p requires p in (k-1, k)");
    if (s < 0) throw Error(ErrorCode::InvalidArgument, "F_p requires s >= 0");
    if (s == 0) return 0.0;
    return degree_constants(k, p).c_p / (k - p) * std::pow(s, k - p);
}

DegreeBoundReport verify_annulus_bound(const GridMap& u, double cx, double cy, double r1, double r2, double p) {
    if (u.target != Target::Circle || u.grid.n != 2)
        throw Error(ErrorCode::InvalidArgument, "annulus check needs a circle map on T^2");
    if (!(r1 > 0 && r2 > r1 && r2 < 0.5)) throw Error(ErrorCode::InvalidArgument, "annulus needs 0 < r1 < r2 < 1/2");
    const TorusGrid& g = u.grid;
    const CubicalComplex cxm(g);
    auto radius = [&](std::int64_t v) {
        Cell c;
        c.dim = 2;
        c.axes = 0b011;
        c.base = g.vertex_base(v);
        const Point z = cxm.center(c);
        double dx = z[0] - cx, dy = z[1] - cy;
        dx -= std::round(dx);
        dy -= std::round(dy);
        return std::hypot(dx, dy);
    };
    DegreeBoundReport rep;
    int d = 0;
    for (std::int64_t v = 0; v < g.num_vertices(); ++v)
        if (radius(v) < r1) d += plaquette_winding(u, g.vertex_base(v));
    rep.d = std::abs(d);
    rep.energy = p_energy_cells(u, p, [&](std::int64_t v) {
        const double r = radius(v);
        return r >= r1 && r <= r2;
    });
    if (rep.d > 0)
        rep.bound = rep.d * (F_p_eval(r2 / rep.d, 2, p) - F_p_eval(r1 / rep.d, 2, p));
    rep.satisfied = rep.energy >= rep.bound;
    rep.slack = rep.bound > 0 ? rep.energy / rep.bound : 0.0;
    return rep;
}

DegreeBoundReport verify_cube_bound(const GridMap& u, const Index& lo, int cells, double r, double p) {
    if (u.target != Target::Circle || u.grid.n != 2)
        throw Error(ErrorCode::InvalidArgument, "square check needs a circle map on T^2");
    if (cells < 1 || cells > u.grid.m) throw Error(ErrorCode::InvalidArgument, "square size out of range");
    if (!(r > 0)) throw Error(ErrorCode::InvalidArgument, "margin must be positive");
    const int k = 2;
    const TorusGrid& g = u.grid;
    const double h = g.h();
    int d = 0;
    for (int j = 0; j < cells; ++j)
        for (int i = 0; i < cells; ++i) d += plaquette_winding(u, {lo[0] + i, lo[1] + j, 0});
    const auto in_block = [&](std::int64_t v) {
        const Index b = g.vertex_base(v);
        for (int a = 0; a < 2; ++a) {
            const int off = ((b[a] - lo[a]) % g.m + g.m) % g.m;
            if (off >= cells) return false;
        }
        return true;
    };
    const double e_inside = p_energy_cells(u, p, in_block);
    // Boundary energy: tangential differences along the four sides, weight h per edge.
    double e_bdry = 0.0;
    auto edge = [&](Index a, Index b) {
        const double t = std::abs(wrap_diff(vertex_value(u, b)[0] - vertex_value(u, a)[0])) / h;
        e_bdry += std::pow(t, p) * h;
    };
    for (int i = 0; i < cells; ++i) {
        edge({lo[0] + i, lo[1], 0}, {lo[0] + i + 1, lo[1], 0});
        edge({lo[0] + i, lo[1] + cells, 0}, {lo[0] + i + 1, lo[1] + cells, 0});
        edge({lo[0], lo[1] + i, 0}, {lo[0], lo[1] + i + 1, 0});
        edge({lo[0] + cells, lo[1] + i, 0}, {lo[0] + cells, lo[1] + i + 1, 0});
    }
    const DegreeConstants dc = degree_constants(k, p);
    DegreeBoundReport rep;
    rep.d = std::abs(d);
    const double lhs = dc.sigma_km1 * std::pow(static_cast<double>(rep.d), 1.0 + p - k);
    const double factor = std::pow(dc.lambda, p / (k - 1)) * std::pow(0.5 * r, p - k) * (k - p);
    rep.energy = e_inside + r * e_bdry;
    rep.bound = rep.d > 0 ? lhs / factor : 0.0;
    rep.satisfied = rep.energy >= rep.bound;
    rep.slack = rep.bound > 0 ? rep.energy / rep.bound : 0.0;
    if (rep.d > 0 && e_bdry > 0) rep.implied_constant = std::max(0.0, (rep.bound - e_inside) / (r * e_bdry));
    return rep;
}

} // namespace tbar
