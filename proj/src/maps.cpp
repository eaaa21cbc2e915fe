#include "tbar/maps.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <random>
#include <string>

#include "tbar/error.hpp"

namespace tbar {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double norm3(const Value& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]); }

Value cross3(const Value& a, const Value& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

int binomial(int n, int k) {
    int r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Gauss-Legendre nodes and weights on [-1,1], 16 points.
constexpr std::array<double, 8> kGlX = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                        0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                        0.9445750230732326, 0.9894009349916499};
constexpr std::array<double, 8> kGlW = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                        0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                        0.0622535239386479, 0.0271524594117541};

template <class F>
double gauss_legendre(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < kGlX.size(); ++i) s += kGlW[i] * (f(mid - half * kGlX[i]) + f(mid + half * kGlX[i]));
    return s * half;
}

} // namespace

const char* target_name(Target t) {
    switch (t) {
    case Target::Circle: return "circle";
    case Target::Sphere: return "sphere";
    case Target::Ambient: return "ambient";
    }
    return "?";
}

Target parse_target(const std::string& s) {
    if (s == "circle") return Target::Circle;
    if (s == "sphere") return Target::Sphere;
    if (s == "ambient") return Target::Ambient;
    throw Error(ErrorCode::InvalidArgument, "unknown target '" + s + "'");
}

Value GridMap::value(std::int64_t v) const {
    Value out{0.0, 0.0, 0.0};
    const int c = comps();
    for (int i = 0; i < c; ++i) out[i] = values[static_cast<std::size_t>(v * c + i)];
    return out;
}

void GridMap::set_value(std::int64_t v, const Value& x) {
    const int c = comps();
    for (int i = 0; i < c; ++i) values[static_cast<std::size_t>(v * c + i)] = x[i];
}

double wrap_angle(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
}

double wrap_diff(double d) {
    double r = std::fmod(d + std::numbers::pi, kTwoPi);
    if (r <= 0) r += kTwoPi;
    return r - std::numbers::pi;
}

GridMap make_circle_map(const TorusGrid& g, const std::function<double(const Point&)>& angle) {
    GridMap u{g, Target::Circle, 2, {}};
    u.values.resize(static_cast<std::size_t>(g.num_vertices()));
    for (std::int64_t v = 0; v < g.num_vertices(); ++v)
        u.values[static_cast<std::size_t>(v)] = wrap_angle(angle(g.vertex_position(g.vertex_base(v))));
    return u;
}

GridMap make_sphere_map(const TorusGrid& g, const std::function<Value(const Point&)>& vec) {
    GridMap u{g, Target::Sphere, 3, {}};
    u.values.resize(static_cast<std::size_t>(3 * g.num_vertices()));
    for (std::int64_t v = 0; v < g.num_vertices(); ++v) {
        Value x = vec(g.vertex_position(g.vertex_base(v)));
        const double nx = norm3(x);
        if (!(nx > 0)) throw Error(ErrorCode::InvalidArgument, "sphere map value has zero norm");
        for (auto& c : x) c /= nx;
        u.set_value(v, x);
    }
    return u;
}

GridMap make_ambient_map(const TorusGrid& g, int k, const std::function<Value(const Point&)>& vec) {
    if (k != 2 && k != 3) throw Error(ErrorCode::InvalidArgument, "ambient dimension must be 2 or 3");
    GridMap u{g, Target::Ambient, k, {}};
    u.values.resize(static_cast<std::size_t>(k * g.num_vertices()));
    for (std::int64_t v = 0; v < g.num_vertices(); ++v) u.set_value(v, vec(g.vertex_position(g.vertex_base(v))));
    return u;
}

GridMap constant_circle_map(const TorusGrid& g, double angle) {
    return make_circle_map(g, [angle](const Point&) { return angle; });
}

double target_distance(const GridMap& u, const Value& a, const Value& b) {
    switch (u.target) {
    case Target::Circle: return std::abs(wrap_diff(b[0] - a[0]));
    case Target::Sphere: {
        const double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        return std::atan2(norm3(cross3(a, b)), dot);
    }
    case Target::Ambient: {
        double s = 0.0;
        for (int i = 0; i < u.k; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
        return std::sqrt(s);
    }
    }
    return 0.0;
}

double vertex_distance(const GridMap& u, std::int64_t a, const GridMap& v, std::int64_t b) {
    return target_distance(u, u.value(a), v.value(b));
}

void validate(const GridMap& u, double sphere_tol) {
    const std::size_t expected = static_cast<std::size_t>(u.size() * u.comps());
    if (u.values.size() != expected)
        throw Error(ErrorCode::Format, "value array has " + std::to_string(u.values.size()) + " entries, expected " +
                                           std::to_string(expected));
    if (u.target == Target::Circle && u.k != 2) throw Error(ErrorCode::InvalidArgument, "circle maps have k = 2");
    if (u.target == Target::Sphere && u.k != 3) throw Error(ErrorCode::InvalidArgument, "sphere maps have k = 3");
    for (std::int64_t v = 0; v < u.size(); ++v) {
        const Value x = u.value(v);
        if (u.target == Target::Circle && !(x[0] >= 0.0 && x[0] < kTwoPi))
            throw Error(ErrorCode::InvalidArgument, "circle angle outside [0,2pi) at vertex " + std::to_string(v));
        if (u.target == Target::Sphere && std::abs(norm3(x) - 1.0) > sphere_tol)
            throw Error(ErrorCode::InvalidArgument, "sphere value not unit at vertex " + std::to_string(v));
    }
}

Value interpolate_local(const GridMap& u, const Index& base, const std::array<double, 3>& local) {
    const TorusGrid& g = u.grid;
    const int n = g.n;
    const int corners = 1 << n;
    const Value v0 = u.value(g.vertex_index(base));
    Value acc{0.0, 0.0, 0.0};
    for (int c = 0; c < corners; ++c) {
        double w = 1.0;
        Index b = base;
        for (int i = 0; i < n; ++i) {
            if (c & (1 << i)) {
                w *= local[i];
                b[i] += 1;
            } else {
                w *= 1.0 - local[i];
            }
        }
        if (w == 0.0) continue;
        const Value x = u.value(g.vertex_index(g.wrap(b)));
        if (u.target == Target::Circle) {
            acc[0] += w * (v0[0] + wrap_diff(x[0] - v0[0]));
        } else {
            for (int i = 0; i < 3; ++i) acc[i] += w * x[i];
        }
    }
    if (u.target == Target::Circle) {
        acc[0] = wrap_angle(acc[0]);
    } else if (u.target == Target::Sphere) {
        const double nx = norm3(acc);
        if (nx < 1e-12) return v0;
        for (auto& c : acc) c /= nx;
    }
    return acc;
}

Value interpolate(const GridMap& u, const Point& x) {
    Index b;
    std::array<double, 3> local;
    locate(u.grid, x, b, local);
    return interpolate_local(u, b, local);
}

std::vector<double> cell_energy_density(const GridMap& u, double p) {
    const TorusGrid& g = u.grid;
    const double inv_h = static_cast<double>(g.m);
    std::vector<double> dens(static_cast<std::size_t>(g.num_vertices()));
    for (std::int64_t v = 0; v < g.num_vertices(); ++v) {
        const Index b = g.vertex_base(v);
        const Value a = u.value(v);
        double s = 0.0;
        for (int i = 0; i < g.n; ++i) {
            Index c = b;
            c[i] += 1;
            const double d = target_distance(u, a, u.value(g.vertex_index(g.wrap(c)))) * inv_h;
            s += d * d;
        }
        dens[static_cast<std::size_t>(v)] = std::pow(s, 0.5 * p);
    }
    return dens;
}

double p_energy(const GridMap& u, double p) {
    if (u.target == Target::Ambient)
        throw Error(ErrorCode::InvalidArgument, "p_energy requires a target-valued map; use gl_energy for ambient maps");
    if (!(p >= 1.0 && p < u.k)) throw Error(ErrorCode::InvalidArgument, "p_energy requires 1 <= p < k");
    const auto dens = cell_energy_density(u, p);
    double s = 0.0;
    for (double d : dens) s += d;
    return s * u.grid.cell_volume();
}

double p_energy_cells(const GridMap& u, double p, const std::function<bool(std::int64_t)>& keep) {
    const auto dens = cell_energy_density(u, p);
    double s = 0.0;
    for (std::size_t c = 0; c < dens.size(); ++c)
        if (keep(static_cast<std::int64_t>(c))) s += dens[c];
    return s * u.grid.cell_volume();
}

double p_energy_masked(const GridMap& u, double p, const std::vector<std::uint8_t>& mask) {
    if (mask.empty()) return p_energy_cells(u, p, [](std::int64_t) { return true; });
    const TorusGrid& g = u.grid;
    return p_energy_cells(u, p, [&](std::int64_t c) {
        const Index b = g.vertex_base(c);
        for (int corner = 0; corner < (1 << g.n); ++corner) {
            Index q = b;
            for (int i = 0; i < g.n; ++i)
                if (corner & (1 << i)) q[i] += 1;
            if (mask[static_cast<std::size_t>(g.vertex_index(g.wrap(q)))]) return false;
        }
        return true;
    });
}

double lp_distance_masked(const GridMap& u, const GridMap& v, double p, const std::vector<std::uint8_t>& mask) {
    if (u.grid != v.grid) throw Error(ErrorCode::DimensionMismatch, "lp_distance: grids differ");
    if (u.target != v.target || u.k != v.k) throw Error(ErrorCode::DimensionMismatch, "lp_distance: targets differ");
    double s = 0.0;
    for (std::int64_t i = 0; i < u.size(); ++i) {
        if (!mask.empty() && mask[static_cast<std::size_t>(i)]) continue;
        s += std::pow(vertex_distance(u, i, v, i), p);
    }
    return std::pow(s * u.grid.cell_volume(), 1.0 / p);
}

double lp_distance(const GridMap& u, const GridMap& v, double p) { return lp_distance_masked(u, v, p, {}); }

GridMap prolong(const GridMap& coarse, const TorusGrid& fine) {
    GridMap out{fine, coarse.target, coarse.k, {}};
    out.values.resize(static_cast<std::size_t>(fine.num_vertices() * coarse.comps()));
    for (std::int64_t v = 0; v < fine.num_vertices(); ++v)
        out.set_value(v, interpolate(coarse, fine.vertex_position(fine.vertex_base(v))));
    return out;
}

namespace {

GridMap resample_on_offset(const GridMap& u, const Point& offset) {
    bool same = true;
    for (int i = 0; i < u.grid.n; ++i) same = same && offset[i] == u.grid.offset[i];
    if (same) return u;
    TorusGrid g = u.grid;
    for (int i = 0; i < g.n; ++i) g.offset[i] = offset[i];
    return prolong(u, g);
}

double family_energy_on(const GridMap& w, unsigned axes, double p) {
    const TorusGrid& g = w.grid;
    const auto list = axes_list(axes);
    if (list.empty()) return 0.0;
    const double inv_h = static_cast<double>(g.m);
    double total = 0.0;
    for (std::int64_t v = 0; v < g.num_vertices(); ++v) {
        const Index b = g.vertex_base(v);
        const Value a = w.value(v);
        double s = 0.0;
        for (int ax : list) {
            Index c = b;
            c[ax] += 1;
            const double d = target_distance(w, a, w.value(g.vertex_index(g.wrap(c)))) * inv_h;
            s += d * d;
        }
        total += std::pow(s, 0.5 * p);
    }
    return total * std::pow(g.h(), static_cast<double>(list.size()));
}

} // namespace

double skeleton_family_energy(const GridMap& u, unsigned axes, const Point& offset, double p) {
    return family_energy_on(resample_on_offset(u, offset), axes, p);
}

double skeleton_energy(const GridMap& u, int j, const Point& offset, double p) {
    if (j < 0 || j > u.grid.n) throw Error(ErrorCode::InvalidArgument, "skeleton_energy: j outside [0,n]");
    if (j == 0) return 0.0;
    const GridMap w = resample_on_offset(u, offset);
    const CubicalComplex cx(u.grid);
    double total = 0.0;
    for (unsigned axes : cx.axis_sets(j)) total += family_energy_on(w, axes, p);
    return total;
}

OffsetCertificate select_offset(const GridMap& u, double p, double eta, int trials, std::uint64_t seed) {
    if (!(eta > 0)) throw Error(ErrorCode::InvalidArgument, "select_offset: eta must be positive");
    if (trials < 1) throw Error(ErrorCode::InvalidArgument, "select_offset: trials must be >= 1");
    const int n = u.grid.n;
    const double h = u.grid.h();
    const double ep = p_energy(u, p);
    const int kk = std::min(u.k, n);
    unsigned sharp_axes = 0;
    for (int a = n - kk; a < n; ++a) sharp_axes |= 1u << a;
    const CubicalComplex cx(u.grid);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, h);
    OffsetCertificate best;
    double best_violation = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        Point a = u.grid.offset;
        if (t > 0)
            for (int i = 0; i < n; ++i) a[i] = unif(rng);
        OffsetCertificate cert;
        cert.offset = a;
        cert.trial = t;
        cert.sharp_axes = sharp_axes;
        const GridMap w = resample_on_offset(u, a);
        double violation = 0.0;
        for (int j = 0; j <= n; ++j) {
            double ej = 0.0;
            if (j > 0)
                for (unsigned axes : cx.axis_sets(j)) ej += family_energy_on(w, axes, p);
            const double denom = std::pow(h, j - n) * ep;
            const double ratio = denom > 0 ? ej / denom : 0.0;
            const double bound = binomial(n, j) / eta;
            cert.coarse_ratios.push_back(ratio);
            cert.coarse_bounds.push_back(bound);
            violation = std::max(violation, ratio / bound - 1.0);
        }
        const double sdenom = std::pow(h, kk - n) * ep;
        cert.sharp_ratio = sdenom > 0 ? family_energy_on(w, sharp_axes, p) / sdenom : 0.0;
        violation = std::max(violation, cert.sharp_ratio / (1.0 + eta) - 1.0);
        cert.satisfied = violation <= 0.0;
        if (cert.satisfied) return cert;
        if (violation < best_violation) {
            best_violation = violation;
            best = cert;
        }
    }
    return best;
}

RetractedMap retract_to_skeleton(const GridMap& u, int k, int refine) {
    if (u.target == Target::Ambient) throw Error(ErrorCode::InvalidArgument, "retract_to_skeleton: target-valued map required");
    if (refine < 2) throw Error(ErrorCode::InvalidArgument, "retract_to_skeleton: refine must be >= 2");
    if (k < 1 || k > u.grid.n) throw Error(ErrorCode::InvalidArgument, "retract_to_skeleton: k outside [1,n]");
    RetractedMap out;
    out.k = k;
    const TorusGrid fine = u.grid.refined(refine);
    out.map = GridMap{fine, u.target, u.k, {}};
    out.map.values.assign(static_cast<std::size_t>(fine.num_vertices() * u.comps()), 0.0);
    out.mask.assign(static_cast<std::size_t>(fine.num_vertices()), 0);
    for (std::int64_t v = 0; v < fine.num_vertices(); ++v) {
        const Point x = fine.vertex_position(fine.vertex_base(v));
        const SkeletonPoint sp = Phi_retraction(u.grid, k, x);
        if (sp.singular) {
            out.mask[static_cast<std::size_t>(v)] = 1;
            out.map.set_value(v, interpolate(u, x));
            continue;
        }
        out.map.set_value(v, interpolate_local(u, sp.base, sp.local));
    }
    return out;
}

double retracted_masked_energy(const RetractedMap& r, double p) { return p_energy_masked(r.map, p, r.mask); }

double cone_profile_integral(double p) {
    return gauss_legendre([p](double t) { return std::pow(1.0 + t * t, 0.5 * p); }, -1.0, 0.0) +
           gauss_legendre([p](double t) { return std::pow(1.0 + t * t, 0.5 * p); }, 0.0, 1.0);
}

double cone_segment_energy(const std::array<double, 2>& apex, const std::array<double, 2>& p0,
                           const std::array<double, 2>& p1, double dtheta, double p, double rho0) {
    const double ex = p1[0] - p0[0], ey = p1[1] - p0[1];
    const double len = std::hypot(ex, ey);
    if (len == 0.0 || dtheta == 0.0) return 0.0;
    const double tx = ex / len, ty = ey / len;
    const double bx = p0[0] - apex[0], by = p0[1] - apex[1];
    const double d = std::abs(bx * ty - by * tx);  // distance from apex to the segment's line
    if (d <= 0.0) throw Error(ErrorCode::InvalidArgument, "cone_segment_energy: apex on segment line");
    const double speed = std::abs(dtheta) / len;
    // Radial factor: integral of rho^{1-p} over [rho0, 1].
    const double radial = (1.0 - std::pow(rho0, 2.0 - p)) / (2.0 - p);
    auto integrand = [&](double l) { return std::pow(std::hypot(bx + l * tx, by + l * ty), p); };
    const double along = gauss_legendre(integrand, 0.0, 0.5 * len) + gauss_legendre(integrand, 0.5 * len, len);
    return radial * std::pow(d, 1.0 - p) * std::pow(speed, p) * along;
}

namespace {

// Cone map of the face trace of u over the n-cell at `base`, evaluated at local
// coordinates y in [0,1]^n (centered at 1/2).
Value cone_value(const GridMap& u, const Index& base, std::array<double, 3> y) {
    const int n = u.grid.n;
    double r = 0.0;
    for (int i = 0; i < n; ++i) r = std::max(r, std::abs(y[i] - 0.5));
    for (int i = 0; i < n; ++i) y[i] = 0.5 + (y[i] - 0.5) * (0.5 / r);
    for (int i = 0; i < n; ++i) y[i] = std::clamp(y[i], 0.0, 1.0);
    return interpolate_local(u, base, y);
}

} // namespace

double retracted_cone_energy(const GridMap& u, double p, int shell_samples) {
    if (u.target == Target::Ambient) throw Error(ErrorCode::InvalidArgument, "retracted_cone_energy: target-valued map required");
    const TorusGrid& g = u.grid;
    const int n = g.n;
    if (!(p < n)) throw Error(ErrorCode::InvalidArgument, "retracted_cone_energy: requires p < n");
    const double h = g.h();
    if (u.target == Target::Circle && n == 2) {
        // Every edge bounds two squares; each contributes (h/2)^2 (|dtheta|/h)^p I(p) / (2-p).
        const double ip = cone_profile_integral(p);
        double total = 0.0;
        for (std::int64_t v = 0; v < g.num_vertices(); ++v) {
            const Index b = g.vertex_base(v);
            for (int a = 0; a < 2; ++a) {
                Index c = b;
                c[a] += 1;
                const double d = std::abs(wrap_diff(u.angle(g.vertex_index(g.wrap(c))) - u.angle(v)));
                total += 2.0 * 0.25 * h * h * std::pow(d / h, p) * ip;
            }
        }
        return total / (2.0 - p);
    }
    // Shell [1/2, 1] of the cube-norm about each cell center, sampled on an S^n sub-grid.
    const int S = std::max(8, shell_samples - shell_samples % 4);
    const double hs = 1.0 / S;  // in units of h
    double total = 0.0;
    std::vector<Value> vals;
    std::vector<std::uint8_t> inside;
    const int nv = n == 2 ? (S + 1) * (S + 1) : (S + 1) * (S + 1) * (S + 1);
    vals.resize(static_cast<std::size_t>(nv));
    auto sub_index = [&](int i, int j, int l) { return i + (S + 1) * (j + (S + 1) * l); };
    for (std::int64_t v = 0; v < g.num_vertices(); ++v) {
        const Index base = g.vertex_base(v);
        for (int l = 0; l <= (n == 3 ? S : 0); ++l)
            for (int j = 0; j <= S; ++j)
                for (int i = 0; i <= S; ++i) {
                    std::array<double, 3> y{i * hs, j * hs, n == 3 ? l * hs : 0.5};
                    double r = 0.0;
                    for (int q = 0; q < n; ++q) r = std::max(r, std::abs(y[q] - 0.5));
                    if (r < 0.25 - 1e-12) continue;
                    vals[static_cast<std::size_t>(sub_index(i, j, l))] = cone_value(u, base, y);
                }
        double shell = 0.0;
        for (int l = 0; l < (n == 3 ? S : 1); ++l)
            for (int j = 0; j < S; ++j)
                for (int i = 0; i < S; ++i) {
                    // Sub-cell center in local coordinates; keep cells in the outer half shell.
                    const std::array<double, 3> c{(i + 0.5) * hs, (j + 0.5) * hs, n == 3 ? (l + 0.5) * hs : 0.5};
                    double r = 0.0;
                    for (int q = 0; q < n; ++q) r = std::max(r, std::abs(c[q] - 0.5));
                    if (r < 0.25) continue;
                    const Value a = vals[static_cast<std::size_t>(sub_index(i, j, l))];
                    double s = 0.0;
                    for (int q = 0; q < n; ++q) {
                        const int di = q == 0, dj = q == 1, dl = q == 2;
                        const Value b = vals[static_cast<std::size_t>(sub_index(i + di, j + dj, l + dl))];
                        const double d = target_distance(u, a, b) / (hs * h);
                        s += d * d;
                    }
                    shell += std::pow(s, 0.5 * p) * std::pow(hs * h, n);
                }
        total += shell / (1.0 - std::pow(0.5, n - p));
    }
    return total;
}

} // namespace tbar
