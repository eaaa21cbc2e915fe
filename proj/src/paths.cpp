#include "tbar/paths.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "tbar/degrees.hpp"
#include "tbar/error.hpp"

namespace tbar {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

int other_axis(int a) { return 1 - a; }

/// Union-find for the spanning tree.
struct Dsu {
    std::vector<std::int64_t> parent;
    explicit Dsu(std::int64_t n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
    std::int64_t find(std::int64_t x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    bool unite(std::int64_t a, std::int64_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[static_cast<std::size_t>(b)] = a;
        return true;
    }
};

/// Reduces a torus coordinate difference to [-1/2, 1/2).
double min_image(double d) { return d - std::floor(d + 0.5); }

/// Gradient of the cone-completed energy with respect to the vertex angles.
std::vector<double> sequence_energy_gradient(const GridMap& u, double p) {
    const TorusGrid& g = u.grid;
    const double h = g.h();
    const double cone = 0.25 * h * h * cone_profile_integral(p) / (2.0 - p);
    std::vector<double> grad(static_cast<std::size_t>(g.num_vertices()), 0.0);
    auto at = [&](const Index& b) { return g.vertex_index(g.wrap(b)); };
    for (std::int64_t v = 0; v < g.num_vertices(); ++v) {
        const Index b = g.vertex_base(v);
        const std::int64_t q[4] = {v, at({b[0] + 1, b[1], 0}), at({b[0] + 1, b[1] + 1, 0}), at({b[0], b[1] + 1, 0})};
        if (plaquette_winding(u, b) == 0) {
            const double a = wrap_diff(u.angle(q[1]) - u.angle(v)) / h;
            const double c = wrap_diff(u.angle(q[3]) - u.angle(v)) / h;
            const double s = a * a + c * c;
            if (s <= 0) continue;
            const double coef = p * std::pow(s, 0.5 * p - 1.0) * h;
            grad[static_cast<std::size_t>(q[1])] += coef * a;
            grad[static_cast<std::size_t>(q[3])] += coef * c;
            grad[static_cast<std::size_t>(v)] -= coef * (a + c);
            continue;
        }
        for (int e = 0; e < 4; ++e) {
            const std::int64_t s0 = q[e], s1 = q[(e + 1) % 4];
            const double d = wrap_diff(u.angle(s1) - u.angle(s0));
            if (d == 0) continue;
            const double dd = cone * p * std::pow(std::abs(d) / h, p - 1.0) / h * (d > 0 ? 1.0 : -1.0);
            grad[static_cast<std::size_t>(s1)] += dd;
            grad[static_cast<std::size_t>(s0)] -= dd;
        }
    }
    return grad;
}

/// Whether every plaquette winding of a sampled circle map is defined (no half-turn edge).
bool windings_defined(const GridMap& w) {
    try {
        (void)cell_degrees(w);
        return true;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NonInteger) throw;
        return false;
    }
}

/// Sample near parameter t; parameters whose samples have a half-turn edge (where the
/// winding is undefined) are nudged by a tiny amount.
std::pair<double, GridMap> sample_near(const HangLinConstruction& hl, double t, int refine) {
    for (int attempt = 0; attempt < 8; ++attempt) {
        const double dt = attempt == 0 ? 0.0 : std::ldexp(attempt % 2 ? 1.0 : -1.0, -30 + attempt);
        const double tt = std::clamp(t + dt, 0.0, 1.0);
        GridMap w = hl.sample(hl.state_at(tt), refine);
        if (windings_defined(w)) return {tt, std::move(w)};
    }
    throw Error(ErrorCode::NonInteger, "no nondegenerate sample near the requested parameter");
}

} // namespace

const char* stage_name(Stage s) {
    switch (s) {
    case Stage::Endpoint: return "ENDPOINT";
    case Stage::RadialU: return "RADIAL_U";
    case Stage::SkeletonHomotopy: return "SKELETON_HOMOTOPY";
    case Stage::CellSwap: return "CELL_SWAP";
    case Stage::RadialV: return "RADIAL_V";
    }
    return "UNKNOWN";
}

HangLinConstruction::HangLinConstruction(GridMap u, GridMap v) : u_(std::move(u)), v_(std::move(v)) {
    if (u_.target != Target::Circle || v_.target != Target::Circle)
        throw Error(ErrorCode::InvalidArgument, "the path construction needs circle maps");
    if (u_.grid != v_.grid) throw Error(ErrorCode::DimensionMismatch, "maps live on different grids");
    if (u_.grid.n != 2) throw Error(ErrorCode::DimensionMismatch, "the path construction needs T^2");
    collapsed_ = u_.values == v_.values;
    const TorusGrid& g = u_.grid;
    const std::int64_t nv = g.num_vertices();
    traces_u_ = traces_of(u_);
    traces_v_ = traces_of(v_);

    // Spanning tree: edges in lexicographic (base vertex, axis) order, Kruskal.
    std::vector<std::vector<std::int64_t>> adj(static_cast<std::size_t>(nv));
    Dsu dsu(nv);
    for (std::int64_t w = 0; w < nv; ++w) {
        const Index b = g.vertex_base(w);
        for (int a = 0; a < 2; ++a) {
            Index c = b;
            c[a] += 1;
            const std::int64_t w2 = g.vertex_index(g.wrap(c));
            if (dsu.unite(w, w2)) {
                adj[static_cast<std::size_t>(w)].push_back(w2);
                adj[static_cast<std::size_t>(w2)].push_back(w);
            }
        }
    }
    auto diff = [&](std::int64_t w) { return v_.angle(w) - u_.angle(w); };
    phi_.assign(static_cast<std::size_t>(nv), 0.0);
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(nv), 0);
    std::queue<std::int64_t> bfs;
    phi_[0] = wrap_diff(diff(0));
    seen[0] = 1;
    bfs.push(0);
    while (!bfs.empty()) {
        const std::int64_t w = bfs.front();
        bfs.pop();
        for (std::int64_t w2 : adj[static_cast<std::size_t>(w)]) {
            if (seen[static_cast<std::size_t>(w2)]) continue;
            seen[static_cast<std::size_t>(w2)] = 1;
            phi_[static_cast<std::size_t>(w2)] = phi_[static_cast<std::size_t>(w)] + wrap_diff(diff(w2) - diff(w));
            bfs.push(w2);
        }
    }
    for (std::int64_t w = 0; w < nv; ++w) {
        if (!seen[static_cast<std::size_t>(w)] ||
            std::abs(wrap_diff(u_.angle(w) + phi_[static_cast<std::size_t>(w)] - v_.angle(w))) > 1e-9)
            throw Error(ErrorCode::HomotopyObstruction, "vertex values cannot be joined along the spanning tree");
    }
    if (collapsed_) return;

    const auto u2 = homotopy_traces(1.0);
    for (std::int64_t e = 0; e < static_cast<std::int64_t>(u2.size()); ++e) {
        const double turns = std::round((u2[static_cast<std::size_t>(e)].delta - traces_v_[static_cast<std::size_t>(e)].delta) / kTwoPi);
        if (turns != 0) swaps_.push_back(e);
    }
    // Processing order: base vertex, then axis.
    std::sort(swaps_.begin(), swaps_.end(), [&](std::int64_t a, std::int64_t b) {
        const std::int64_t nvv = g.num_vertices();
        return std::make_pair(a % nvv, a / nvv) < std::make_pair(b % nvv, b / nvv);
    });
}

std::int64_t HangLinConstruction::edge_index(Index b, int axis) const {
    const TorusGrid& g = u_.grid;
    return static_cast<std::int64_t>(axis) * g.num_vertices() + g.vertex_index(g.wrap(b));
}

std::vector<EdgeTrace> HangLinConstruction::traces_of(const GridMap& w) const {
    const TorusGrid& g = w.grid;
    const std::int64_t nv = g.num_vertices();
    std::vector<EdgeTrace> tr(static_cast<std::size_t>(2 * nv));
    for (std::int64_t x = 0; x < nv; ++x) {
        const Index b = g.vertex_base(x);
        for (int a = 0; a < 2; ++a) {
            Index c = b;
            c[a] += 1;
            const double t0 = w.angle(x);
            tr[static_cast<std::size_t>(a * nv + x)] = {t0, wrap_diff(w.angle(g.vertex_index(g.wrap(c))) - t0)};
        }
    }
    return tr;
}

std::vector<EdgeTrace> HangLinConstruction::homotopy_traces(double t) const {
    const TorusGrid& g = u_.grid;
    const std::int64_t nv = g.num_vertices();
    std::vector<EdgeTrace> tr = traces_u_;
    for (std::int64_t x = 0; x < nv; ++x) {
        const Index b = g.vertex_base(x);
        for (int a = 0; a < 2; ++a) {
            Index c = b;
            c[a] += 1;
            const std::int64_t y = g.vertex_index(g.wrap(c));
            EdgeTrace& e = tr[static_cast<std::size_t>(a * nv + x)];
            e.start += t * phi_[static_cast<std::size_t>(x)];
            e.delta += t * (phi_[static_cast<std::size_t>(y)] - phi_[static_cast<std::size_t>(x)]);
        }
    }
    return tr;
}

EdgeTrace HangLinConstruction::swapped_trace(const std::vector<EdgeTrace>& tr, std::int64_t e) const {
    EdgeTrace t = tr[static_cast<std::size_t>(e)];
    const double turns = std::round((t.delta - traces_v_[static_cast<std::size_t>(e)].delta) / kTwoPi);
    t.delta -= turns * kTwoPi;
    return t;
}

std::vector<EdgeTrace> HangLinConstruction::traces_after_swaps(int count) const {
    std::vector<EdgeTrace> tr = homotopy_traces(1.0);
    for (int i = 0; i < count; ++i) {
        const std::int64_t e = swaps_[static_cast<std::size_t>(i)];
        tr[static_cast<std::size_t>(e)] = swapped_trace(tr, e);
    }
    return tr;
}

int HangLinConstruction::num_segments() const {
    return collapsed_ ? 0 : 3 + static_cast<int>(swaps_.size());
}

PathModel HangLinConstruction::state_at(double t) const {
    t = std::clamp(t, 0.0, 1.0);
    PathModel m;
    if (collapsed_) {
        m.stage = Stage::Endpoint;
        m.from_v = t >= 0.5;
        m.traces = traces_u_;
        return m;
    }
    const int n = num_segments();
    const double x = t * n;
    const int seg = std::min(static_cast<int>(std::floor(x)), n - 1);
    const double tau = std::clamp(x - seg, 0.0, 1.0);
    m.segment = seg;
    if (seg == 0) {
        m.stage = tau == 0 ? Stage::Endpoint : Stage::RadialU;
        m.s = 1.0 - tau;
        m.traces = traces_u_;
    } else if (seg == 1) {
        m.stage = Stage::SkeletonHomotopy;
        m.traces = homotopy_traces(tau);
    } else if (seg == n - 1) {
        m.stage = tau == 1 ? Stage::Endpoint : Stage::RadialV;
        m.from_v = true;
        m.s = tau;
        m.traces = traces_v_;
    } else {
        const int j = seg - 2;
        m.stage = Stage::CellSwap;
        m.traces = traces_after_swaps(j);
        m.swap_edge = swaps_[static_cast<std::size_t>(j)];
        m.new_trace = swapped_trace(m.traces, m.swap_edge);
        if (tau <= 0.5) {
            m.lambda = 1.0 - 2.0 * tau;
            m.use_new = false;
        } else {
            m.lambda = 2.0 * tau - 1.0;
            m.use_new = true;
        }
    }
    return m;
}

double HangLinConstruction::cone_square_energy(const std::vector<EdgeTrace>& tr, const Index& b, double cone, double p,
                                               const EdgeTrace* override_trace, std::int64_t override_edge) const {
    const double h = u_.grid.h();
    const std::int64_t edges[4] = {edge_index(b, 0), edge_index({b[0], b[1] + 1, 0}, 0), edge_index(b, 1),
                                   edge_index({b[0] + 1, b[1], 0}, 1)};
    double s = 0.0;
    for (std::int64_t e : edges) {
        const EdgeTrace& t = (override_trace && e == override_edge) ? *override_trace : tr[static_cast<std::size_t>(e)];
        s += cone * std::pow(std::abs(t.delta) / h, p);
    }
    return s;
}

double HangLinConstruction::energy(const PathModel& m, double p) const {
    if (!(p >= 1.0 && p < 2.0)) throw Error(ErrorCode::InvalidArgument, "path energies need 1 <= p < 2");
    const TorusGrid& g = u_.grid;
    const double h = g.h();
    const double cone = 0.25 * h * h * cone_profile_integral(p) / (2.0 - p);
    const std::int64_t nv = g.num_vertices();
    double total = 0.0;
    if (m.stage == Stage::Endpoint || m.stage == Stage::RadialU || m.stage == Stage::RadialV) {
        const GridMap& w = m.from_v ? v_ : u_;
        const double s = m.stage == Stage::Endpoint ? 1.0 : m.s;
        const double inner_w = std::pow(s, 2.0 - p);
        const auto dens = cell_energy_density(w, p);
        for (std::int64_t x = 0; x < nv; ++x) {
            const Index b = g.vertex_base(x);
            const double c = cone_square_energy(m.traces, b, cone, p, nullptr, -1);
            const double in = plaquette_winding(w, b) == 0 ? dens[static_cast<std::size_t>(x)] * h * h : c;
            total += inner_w * in + (1.0 - inner_w) * c;
        }
        return total;
    }
    if (m.stage == Stage::SkeletonHomotopy) {
        for (std::int64_t x = 0; x < nv; ++x) total += cone_square_energy(m.traces, g.vertex_base(x), cone, p, nullptr, -1);
        return total;
    }
    const auto star = star_squares(m.swap_edge);
    const std::int64_t s0 = g.vertex_index(star[0]), s1 = g.vertex_index(star[1]);
    for (std::int64_t x = 0; x < nv; ++x) {
        if (x == s0 || x == s1) continue;
        total += cone_square_energy(m.traces, g.vertex_base(x), cone, p, nullptr, -1);
    }
    const EdgeTrace* ov = m.use_new ? &m.new_trace : nullptr;
    const double lam = m.lambda;
    if (lam > 0) {
        const double inner = cone_square_energy(m.traces, star[0], cone, p, ov, m.swap_edge) +
                             cone_square_energy(m.traces, star[1], cone, p, ov, m.swap_edge);
        total += std::pow(lam, 2.0 - p) * inner;
    }
    if (lam < 1) {
        // Cone over the six outer edges of V from the edge midpoint, radial fraction [lambda, 1].
        const int a = static_cast<int>(m.swap_edge / nv);
        const int o = other_axis(a);
        const Index b = g.vertex_base(m.swap_edge % nv);
        auto shift = [&](int da, int dob) {
            Index c = b;
            c[a] += da;
            c[o] += dob;
            return c;
        };
        struct Seg {
            std::int64_t edge;
            std::array<double, 2> p0, p1;  // (a, o) coordinates relative to the midpoint, cell units
        };
        const Seg segs[6] = {
            {edge_index(shift(0, 1), a), {-0.5, 1.0}, {0.5, 1.0}},
            {edge_index(shift(0, -1), a), {-0.5, -1.0}, {0.5, -1.0}},
            {edge_index(shift(0, -1), o), {-0.5, -1.0}, {-0.5, 0.0}},
            {edge_index(shift(0, 0), o), {-0.5, 0.0}, {-0.5, 1.0}},
            {edge_index(shift(1, -1), o), {0.5, -1.0}, {0.5, 0.0}},
            {edge_index(shift(1, 0), o), {0.5, 0.0}, {0.5, 1.0}},
        };
        for (const Seg& sg : segs) {
            const std::array<double, 2> q0{sg.p0[0] * h, sg.p0[1] * h}, q1{sg.p1[0] * h, sg.p1[1] * h};
            total += cone_segment_energy({0.0, 0.0}, q0, q1, m.traces[static_cast<std::size_t>(sg.edge)].delta, p, lam);
        }
    }
    return total;
}

std::array<Index, 2> HangLinConstruction::star_squares(std::int64_t edge) const {
    const TorusGrid& g = u_.grid;
    const std::int64_t nv = g.num_vertices();
    const int a = static_cast<int>(edge / nv);
    const Index b = g.vertex_base(edge % nv);
    Index c = b;
    c[other_axis(a)] -= 1;
    return {b, g.wrap(c)};
}

namespace {

/// Offset of x from the midpoint of an edge, in cell units along (edge axis, other axis).
std::array<double, 2> star_coordinates(const TorusGrid& g, std::int64_t edge, const Point& x) {
    const std::int64_t nv = g.num_vertices();
    const int a = static_cast<int>(edge / nv);
    const int o = 1 - a;
    const Point base = g.vertex_position(g.vertex_base(edge % nv));
    Point mid = base;
    mid[a] += 0.5 * g.h();
    return {min_image(x[a] - mid[a]) * g.m, min_image(x[o] - mid[o]) * g.m};
}

} // namespace

bool HangLinConstruction::in_star(std::int64_t edge, const Point& x) const {
    const auto d = star_coordinates(u_.grid, edge, x);
    return std::abs(d[0]) <= 0.5 + 1e-12 && std::abs(d[1]) <= 1.0 + 1e-12;
}

double HangLinConstruction::trace_value(const std::vector<EdgeTrace>& tr, const Index& b, const std::array<double, 2>& z,
                                        const EdgeTrace* override_trace, std::int64_t override_edge) const {
    std::int64_t e;
    double t;
    if (std::abs(z[0]) >= std::abs(z[1])) {
        e = edge_index({b[0] + (z[0] > 0 ? 1 : 0), b[1], 0}, 1);
        t = 0.5 * (z[1] + 1.0);
    } else {
        e = edge_index({b[0], b[1] + (z[1] > 0 ? 1 : 0), 0}, 0);
        t = 0.5 * (z[0] + 1.0);
    }
    const EdgeTrace& et = (override_trace && e == override_edge) ? *override_trace : tr[static_cast<std::size_t>(e)];
    return et.start + et.delta * t;
}

double HangLinConstruction::cone_value(const std::vector<EdgeTrace>& tr, const Point& x, const EdgeTrace* override_trace,
                                       std::int64_t override_edge) const {
    Index b;
    std::array<double, 3> local;
    locate(u_.grid, x, b, local);
    std::array<double, 2> z{2.0 * local[0] - 1.0, 2.0 * local[1] - 1.0};
    const double r = std::max(std::abs(z[0]), std::abs(z[1]));
    if (r < kSingularTol) return trace_value(tr, b, {1.0, 0.0}, override_trace, override_edge);
    return trace_value(tr, b, {z[0] / r, z[1] / r}, override_trace, override_edge);
}

double HangLinConstruction::evaluate(const PathModel& m, const Point& x) const {
    const TorusGrid& g = u_.grid;
    if (m.stage == Stage::Endpoint || m.stage == Stage::RadialU || m.stage == Stage::RadialV) {
        const GridMap& w = m.from_v ? v_ : u_;
        const double s = m.stage == Stage::Endpoint ? 1.0 : m.s;
        Index b;
        std::array<double, 3> local;
        locate(g, x, b, local);
        std::array<double, 2> z{2.0 * local[0] - 1.0, 2.0 * local[1] - 1.0};
        const double r = std::max(std::abs(z[0]), std::abs(z[1]));
        if (s > 0 && r <= s)
            return interpolate_local(w, b, {0.5 * (z[0] / s + 1.0), 0.5 * (z[1] / s + 1.0), 0.0})[0];
        if (r < kSingularTol) return trace_value(m.traces, b, {1.0, 0.0}, nullptr, -1);
        return trace_value(m.traces, b, {z[0] / r, z[1] / r}, nullptr, -1);
    }
    if (m.stage == Stage::SkeletonHomotopy) return cone_value(m.traces, x, nullptr, -1);

    const auto d = star_coordinates(g, m.swap_edge, x);
    const double rv = std::max(std::abs(d[0]) / 0.5, std::abs(d[1]));
    if (rv > 1.0) return cone_value(m.traces, x, nullptr, -1);
    const std::int64_t nv = g.num_vertices();
    const int a = static_cast<int>(m.swap_edge / nv);
    const int o = other_axis(a);
    Point mid = g.vertex_position(g.vertex_base(m.swap_edge % nv));
    mid[a] += 0.5 * g.h();
    auto point_at = [&](double scale) {
        Point y = mid;
        y[a] += d[0] * g.h() * scale;
        y[o] += d[1] * g.h() * scale;
        return y;
    };
    if (m.lambda > 0 && rv <= m.lambda) {
        const EdgeTrace* ov = m.use_new ? &m.new_trace : nullptr;
        return cone_value(m.traces, point_at(1.0 / m.lambda), ov, m.swap_edge);
    }
    if (rv < kSingularTol) return cone_value(m.traces, point_at(0.0) /* unused direction */, nullptr, -1);
    return cone_value(m.traces, point_at(1.0 / rv), nullptr, -1);
}

GridMap HangLinConstruction::sample(const PathModel& m, int refine) const {
    if (refine < 1) throw Error(ErrorCode::InvalidArgument, "refine must be positive");
    return make_circle_map(u_.grid.refined(refine), [&](const Point& x) { return evaluate(m, x); });
}

MapPath hang_lin_path(const GridMap& u, const GridMap& v, int k, int samples_per_stage, int refine) {
    if (k != 2) throw Error(ErrorCode::InvalidArgument, "the path construction is implemented for k = 2");
    if (samples_per_stage < 1) throw Error(ErrorCode::InvalidArgument, "samples_per_stage must be positive");
    MapPath path;
    path.refine = refine;
    auto hl = std::make_shared<HangLinConstruction>(u, v);
    path.construction = hl;
    auto endpoint = [&](double t, const GridMap& w) {
        PathSample s;
        s.t = t;
        s.stage = Stage::Endpoint;
        s.model = hl->state_at(t);
        s.map = w;
        path.samples.push_back(std::move(s));
    };
    endpoint(0.0, u);
    if (!hl->collapsed()) {
        const int n = hl->num_segments();
        const int swap_samples = samples_per_stage + (samples_per_stage % 2);
        for (int seg = 0; seg < n; ++seg) {
            const bool swap = seg >= 2 && seg < n - 1;
            const int count = swap ? swap_samples : samples_per_stage;
            for (int i = (seg == 0 ? 1 : 0); i < count; ++i) {
                PathSample s;
                auto [t, map] = sample_near(*hl, (seg + static_cast<double>(i) / count) / n, refine);
                s.t = t;
                s.model = hl->state_at(t);
                s.stage = s.model.stage;
                s.map = std::move(map);
                path.samples.push_back(std::move(s));
            }
        }
    }
    endpoint(1.0, v);
    return path;
}

EnergyProfile profile_energy(const MapPath& path, double p) {
    EnergyProfile prof;
    for (const PathSample& s : path.samples) {
        const double e = sequence_energy(s.map, p);
        const double x = path.construction->energy(s.model, p);
        prof.energies.push_back(e);
        prof.exact.push_back(x);
        prof.sup = std::max(prof.sup, e);
        prof.exact_sup = std::max(prof.exact_sup, x);
    }
    return prof;
}

double path_lp_distance(const GridMap& a, const GridMap& b, double p) {
    if (a.grid == b.grid) return lp_distance(a, b, p);
    if (a.grid.m < b.grid.m) return lp_distance(prolong(a, b.grid), b, p);
    return lp_distance(a, prolong(b, a.grid), p);
}

ScalingFit fit_scaling(const std::vector<double>& ps, const std::vector<double>& sups, int k) {
    if (ps.size() != sups.size() || ps.size() < 2)
        throw Error(ErrorCode::InvalidArgument, "scaling fit needs at least two (p, sup) pairs");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (!(ps[i] < k)) throw Error(ErrorCode::InvalidArgument, "scaling fit needs p < k");
        if (!(sups[i] > 0)) throw Error(ErrorCode::InvalidArgument, "scaling fit needs positive sups");
        xs.push_back(std::log(1.0 / (k - ps[i])));
        ys.push_back(std::log(sups[i]));
    }
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx <= 0) throw Error(ErrorCode::InvalidArgument, "scaling fit needs distinct exponents");
    ScalingFit f;
    f.beta = sxy / sxx;
    f.C = std::exp(my - f.beta * mx);
    return f;
}

double sequence_energy(const GridMap& w, double p) {
    if (w.target == Target::Circle && w.grid.n == 2 && p < 2.0) return cone_completed_energy(w, p);
    return p_energy(w, p);
}

BarrierEstimate sequence_barrier(const GridMap& u, const GridMap& v, double p, double delta, int relax_iters,
                                 const BarrierOptions& opts) {
    if (!(delta > 0)) throw Error(ErrorCode::InvalidArgument, "delta must be positive");
    if (relax_iters < 0) throw Error(ErrorCode::InvalidArgument, "relax_iters must be non-negative");
    const HangLinConstruction hl(u, v);
    BarrierEstimate est;
    est.p = p;
    est.delta = delta;
    est.kind = BarrierKind::SequenceDelta;

    // Fine samples of the path; the endpoints are the prolonged inputs.
    const TorusGrid fine = u.grid.refined(opts.refine);
    std::vector<GridMap> seq;
    if (hl.collapsed()) {
        seq = {prolong(u, fine), prolong(v, fine)};
    } else {
        std::vector<std::pair<double, GridMap>> pts;
        pts.push_back(sample_near(hl, 0.0, opts.refine));
        pts.push_back(sample_near(hl, 1.0, opts.refine));
        std::vector<int> depth = {0, 0};
        std::size_t i = 0;
        while (i + 1 < pts.size()) {
            if (lp_distance(pts[i].second, pts[i + 1].second, p) < delta) {
                ++i;
                continue;
            }
            const int dnew = std::max(depth[i], depth[i + 1]) + 1;
            if (dnew > opts.max_depth)
                throw Error(ErrorCode::Fineness, "bisection of the path did not reach the requested fineness");
            const double tm = 0.5 * (pts[i].first + pts[i + 1].first);
            pts.insert(pts.begin() + static_cast<std::ptrdiff_t>(i + 1), sample_near(hl, tm, opts.refine));
            depth.insert(depth.begin() + static_cast<std::ptrdiff_t>(i + 1), dnew);
        }
        for (auto& pt : pts) seq.push_back(std::move(pt.second));
    }

    std::vector<double> energies(seq.size());
    energies.front() = sequence_energy(u, p);
    energies.back() = sequence_energy(v, p);
    for (std::size_t i = 1; i + 1 < seq.size(); ++i) energies[i] = sequence_energy(seq[i], p);

    // Projected descent on interior members; angles stay on the circle by construction.
    for (int it = 0; it < relax_iters; ++it) {
        for (std::size_t i = 1; i + 1 < seq.size(); ++i) {
            const auto grad = sequence_energy_gradient(seq[i], p);
            double gmax = 0.0;
            for (double g : grad) gmax = std::max(gmax, std::abs(g));
            if (gmax == 0) continue;
            double step = opts.relax_step;
            for (int tries = 0; tries < 12; ++tries, step *= 0.5) {
                GridMap cand = seq[i];
                for (std::size_t j = 0; j < cand.values.size(); ++j)
                    cand.values[j] = wrap_angle(cand.values[j] - step * grad[j] / gmax);
                double e;
                try {
                    e = sequence_energy(cand, p);
                } catch (const Error& err) {
                    if (err.code() != ErrorCode::NonInteger) throw;
                    continue;
                }
                if (!(e < energies[i])) continue;
                if (lp_distance(seq[i - 1], cand, p) >= delta || lp_distance(cand, seq[i + 1], p) >= delta) continue;
                seq[i] = std::move(cand);
                energies[i] = e;
                break;
            }
        }
    }

    est.max_step = 0.0;
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) est.max_step = std::max(est.max_step, lp_distance(seq[i], seq[i + 1], p));
    seq.front() = u;
    seq.back() = v;
    est.length = static_cast<int>(seq.size());
    est.gamma_hat = 0.0;
    for (std::size_t i = 0; i < energies.size(); ++i) {
        if (energies[i] > est.gamma_hat || i == 0) {
            est.gamma_hat = energies[i];
            est.argmax = static_cast<int>(i);
        }
    }
    est.sequence = std::move(seq);
    est.energies = std::move(energies);
    return est;
}

} // namespace tbar
