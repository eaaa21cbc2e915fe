// Acceptance run: one PASS/FAIL line per criterion with its runtime and the measured
// quantities. Exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tbar/balls.hpp"
#include "tbar/cycles.hpp"
#include "tbar/degrees.hpp"
#include "tbar/experiment.hpp"
#include "tbar/fixtures.hpp"
#include "tbar/maps.hpp"
#include "tbar/mountainpass.hpp"
#include "tbar/paths.hpp"

using namespace tbar;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool passed = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double budget_s;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

GridMap vortex_fixture(int m, const std::vector<std::array<double, 3>>& spec) {
    const TorusGrid g = make_grid(2, m);
    std::vector<Vortex> vs;
    for (const auto& s : spec) {
        const Point c = plaquette_center(g, s[0], s[1]);
        vs.push_back({c[0], c[1], static_cast<int>(s[2])});
    }
    return vortex_map(g, vs);
}

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

Outcome annulus_equality() {
    const TorusGrid g = make_grid(2, 256);
    const Point c = plaquette_center(g, 0.5, 0.5);
    const GridMap u = radial_vortex_map(g, c[0], c[1]);
    Outcome o{true, ""};
    for (double p : {1.5, 1.8, 1.95}) {
        const DegreeBoundReport rep = verify_annulus_bound(u, c[0], c[1], 0.1, 0.4, p);
        const double closed = 2 * kPi * (std::pow(0.4, 2 - p) - std::pow(0.1, 2 - p)) / (2 - p);
        const double e1 = std::abs(rep.energy - closed) / closed, e2 = std::abs(rep.energy - rep.bound) / rep.bound;
        o.passed = o.passed && rep.d == 1 && e1 < 0.03 && e2 < 0.03;
        o.detail += "p=" + fmt("%g", p) + " E=" + fmt("%.4f", rep.energy) + " closed=" + fmt("%.4f", closed) +
                    " err=" + fmt("%.2e", e1) + " bound_err=" + fmt("%.2e", e2) + "; ";
    }
    return o;
}

Outcome jacobian_integrality() {
    Outcome o{true, ""};
    double worst_frac = 0.0;
    int nonzero = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const GridMap u = random_circle_map(make_grid(2, 32), 1000 + seed);
        const TorusGrid& g = u.grid;
        long total = 0;
        const std::vector<int> deg = cell_degrees(u);
        for (int y = 0; y < 32; ++y)
            for (int x = 0; x < 32; ++x) {
                const Index c[4] = {{x, y, 0}, {x + 1, y, 0}, {x + 1, y + 1, 0}, {x, y + 1, 0}};
                double s = 0.0;
                for (int i = 0; i < 4; ++i)
                    s += wrap_diff(u.angle(g.vertex_index(g.wrap(c[(i + 1) % 4]))) - u.angle(g.vertex_index(g.wrap(c[i]))));
                const double w = s / (2 * kPi);
                worst_frac = std::max(worst_frac, std::abs(w - std::round(w)));
                const int d = deg[static_cast<std::size_t>(g.vertex_index({x, y, 0}))];
                o.passed = o.passed && d == static_cast<int>(std::lround(w));
                total += d;
                nonzero += d != 0;
            }
        o.passed = o.passed && total == 0;
    }
    o.passed = o.passed && worst_frac < 1e-9;
    // Vortex fixtures: exactly the prescribed plaquettes carry +-1.
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> cell(0, 31);
    int fixtures_ok = 0;
    for (int t = 0; t < 10; ++t) {
        std::array<int, 4> ij;
        do {
            for (int& x : ij) x = cell(rng);
        } while (std::max(std::abs(ij[0] - ij[2]), std::abs(ij[1] - ij[3])) < 3);
        const GridMap u = vortex_fixture(32, {{(ij[0] + 0.5) / 32, (ij[1] + 0.5) / 32, 1}, {(ij[2] + 0.5) / 32, (ij[3] + 0.5) / 32, -1}});
        const std::vector<int> deg = cell_degrees(u);
        bool ok = true;
        for (std::int64_t v = 0; v < u.size(); ++v) {
            const Index b = u.grid.vertex_base(v);
            const int expect = (b[0] == ij[0] && b[1] == ij[1]) ? 1 : ((b[0] == ij[2] && b[1] == ij[3]) ? -1 : 0);
            ok = ok && deg[static_cast<std::size_t>(v)] == expect;
        }
        fixtures_ok += ok;
    }
    o.passed = o.passed && fixtures_ok == 10;
    o.detail = "worst fractional winding " + fmt("%.2e", worst_frac) + ", nonzero plaquettes " + std::to_string(nonzero) +
               ", vortex fixtures exact " + std::to_string(fixtures_ok) + "/10";
    return o;
}

Outcome ball_invariants() {
    Outcome o{true, ""};
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> count(1, 8), deg(1, 2), sign(0, 1);
    std::uniform_real_distribution<double> pos(0.15, 0.85);
    const double sigma0 = 0.01;
    int configs = 0, checks = 0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Singularity> s;
        const int k = count(rng);
        while (static_cast<int>(s.size()) < k) {
            Singularity c{{pos(rng), pos(rng), 0.0}, deg(rng) * (sign(rng) ? 1 : -1)};
            bool ok = true;
            for (const auto& t : s) ok = ok && std::hypot(c.position[0] - t.position[0], c.position[1] - t.position[1]) > 6.5 * sigma0;
            if (ok) s.push_back(c);
        }
        BallCollection c = initial_balls(s, sigma0);
        bool ok = check_ball_invariants(c).empty();
        double prev = total_radius(c);
        for (double sig = 0.012; sig <= 0.25; sig *= 1.2) {
            c = grow_to_scale(c, sig);
            ok = ok && check_ball_invariants(c).empty() && total_radius(c) >= prev - 1e-12;
            prev = total_radius(c);
            for (const Ball& b : c.balls) {
                ok = ok && !b.members.empty();
                if (b.aggregate > 0 && !c.clamped) ok = ok && b.radius >= sig * b.aggregate - 1e-12;
            }
            ++checks;
        }
        configs += ok;
    }
    o.passed = configs == 100;
    // Matched vortex maps: the degree bound inside every ball with nonzero degree.
    const std::vector<std::vector<std::array<double, 3>>> layouts = {
        {{0.25, 0.5, 1}, {0.75, 0.5, -1}},
        {{0.3, 0.3, 1}, {0.7, 0.7, 1}, {0.3, 0.7, -1}, {0.7, 0.3, -1}},
        {{0.2, 0.5, 2}, {0.6, 0.5, -1}, {0.8, 0.2, -1}},
    };
    int bounds = 0, bound_ok = 0;
    double tightest = 0.0;
    for (const auto& layout : layouts) {
        const GridMap u = vortex_fixture(128, layout);
        std::vector<Singularity> s;
        for (const auto& v : layout) {
            const Point c = plaquette_center(u.grid, v[0], v[1]);
            s.push_back({c, static_cast<int>(v[2])});
        }
        for (double sig : {0.02, 0.05, 0.08}) {
            const BallCollection c = grow_to_scale(initial_balls(s, 0.01), sig);
            for (const Ball& b : c.balls) {
                if (b.aggregate == 0) continue;
                std::vector<Singularity> mem;
                for (int j : b.members) mem.push_back(s[static_cast<std::size_t>(j)]);
                for (double p : {1.5, 1.8, 1.95}) {
                    const double lb = lower_bound_energy(mem, b.radius, p, 2);
                    const double e = energy_in_ball(u, b.center, b.radius, p);
                    ++bounds;
                    bound_ok += lb <= e;
                    tightest = std::max(tightest, lb / e);
                }
            }
        }
    }
    o.passed = o.passed && bound_ok == bounds && bounds > 0;
    o.detail = "configurations passing " + std::to_string(configs) + "/100 over " + std::to_string(checks) +
               " growth checks; energy bounds " + std::to_string(bound_ok) + "/" + std::to_string(bounds) +
               ", largest bound/energy " + fmt("%.3f", tightest);
    return o;
}

Outcome flat_norm_oracles() {
    const TorusGrid g = make_grid(2, 4);
    std::vector<double> a(50), b(50);
    std::vector<Chain> chains;
    for (int i = 0; i < 50; ++i) chains.push_back(random_balanced_chain(g, 2, 7000 + static_cast<std::uint64_t>(i)));
    parallel_for(50, 4, [&](int i) {
        a[static_cast<std::size_t>(i)] = flat_norm(chains[static_cast<std::size_t>(i)], FlatMethod::ExactFlow).value;
        b[static_cast<std::size_t>(i)] = flat_norm(chains[static_cast<std::size_t>(i)], FlatMethod::Exhaustive).value;
    });
    int equal = 0;
    double largest = 0.0;
    for (int i = 0; i < 50; ++i) {
        equal += a[static_cast<std::size_t>(i)] == b[static_cast<std::size_t>(i)];
        largest = std::max(largest, a[static_cast<std::size_t>(i)]);
    }
    return {equal == 50, "exact equality on " + std::to_string(equal) + "/50 chains, largest flat norm " + fmt("%.4f", largest)};
}

Outcome almgren_map() {
    const TorusGrid g = make_grid(2, 16);
    auto walk = [&](int laps) {
        std::vector<Chain> seq{zero_chain(g, 0)};
        for (int lap = 0; lap < laps; ++lap)
            for (int i = 1; i <= g.m; ++i) {
                Chain c = zero_chain(g, 0);
                if (i < g.m) {
                    c.add(g.vertex_index({0, i, 0}), 1);
                    c.add(g.vertex_index({0, 0, 0}), -1);
                }
                seq.push_back(c);
            }
        return seq;
    };
    const double delta = 0.1;
    const auto one = almgren_class(walk(1), delta), two = almgren_class(walk(2), delta);
    const std::vector<Chain> seq = walk(1);
    std::vector<Chain> fill;
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) fill.push_back(min_filling(seq[i + 1] - seq[i]));
    const CubicalComplex cx(g);
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<std::size_t> pick(0, fill.size() - 1);
    int stable = 0, tried = 0;
    while (tried < 10) {
        std::vector<Chain> f = fill;
        const std::size_t i = pick(rng);
        // Swap the filling of one step for another one of small mass.
        Cell sq;
        sq.dim = 2;
        sq.axes = 3u;
        sq.base = g.wrap({static_cast<int>(rng() % 2) - 1, static_cast<int>(i), 0});
        Chain S = zero_chain(g, 2);
        S.add(cx.cell_index(sq), rng() % 2 ? 1 : -1);
        f[i] = f[i] + chain_boundary(S);
        if (chain_mass(f[i]) >= AlmgrenOptions{}.eps0 / 2) continue;
        ++tried;
        stable += almgren_class_with_fillings(seq, f, delta) == std::vector<std::int64_t>{0, 1};
    }
    const bool ok = one == std::vector<std::int64_t>{0, 1} && two == std::vector<std::int64_t>{0, 2} && stable == 10;
    return {ok, "single walk (" + std::to_string(one[0]) + "," + std::to_string(one[1]) + "), double walk (" +
                    std::to_string(two[0]) + "," + std::to_string(two[1]) + "), perturbations stable " +
                    std::to_string(stable) + "/10"};
}

Outcome hang_lin_scaling() {
    const TorusGrid g = make_grid(2, 32);
    const MapPath path = hang_lin_path(constant_circle_map(g, 0.0), linear_phase_map(g, 0, 1), 2, 4, 5);
    const std::vector<double> ps{1.9, 1.95, 1.975, 1.99};
    std::vector<EnergyProfile> prof(ps.size());
    parallel_for(4, 4, [&](int i) { prof[static_cast<std::size_t>(i)] = profile_energy(path, ps[static_cast<std::size_t>(i)]); });
    std::vector<double> sup, exact;
    std::string d;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        sup.push_back(prof[i].sup);
        exact.push_back(prof[i].exact_sup);
        d += "p=" + fmt("%g", ps[i]) + " sup=" + fmt("%.1f", prof[i].sup) + "; ";
    }
    const ScalingFit f = fit_scaling(ps, sup, 2), fe = fit_scaling(ps, exact, 2);
    d += "beta=" + fmt("%.4f", f.beta) + " C=" + fmt("%.2f", f.C) + " (piecewise-cone model energies: beta=" +
         fmt("%.4f", fe.beta) + ")";
    return {f.beta >= 0.8 && f.beta <= 1.2, d};
}

Outcome mass_bound() {
    std::vector<std::pair<double, GridMap>> family;
    for (double p : {1.9, 1.95, 1.975, 1.99}) family.push_back({p, vortex_fixture(128, {{0.25, 0.5, 1}, {0.75, 0.5, -1}})});
    for (double p : {1.9, 1.99}) family.push_back({p, vortex_fixture(128, {{0.25, 0.3, 1}, {0.75, 0.7, -1}, {0.25, 0.7, -1}, {0.75, 0.3, 1}})});
    const MassBoundReport r = mass_bound_check(family, 2, 0.10);
    std::string d;
    for (const auto& row : r.rows)
        d += "p=" + fmt("%g", row.p) + " lhs=" + fmt("%.3f", row.lhs) + " rhs=" + fmt("%.3f", row.rhs) + "; ";
    d += "tightest lhs/rhs " + fmt("%.4f", r.tightest_ratio) + " (allowed 1.10)";
    return {r.satisfied, d};
}

Outcome main_inequality() {
    const TorusGrid g = make_grid(2, 64);
    const GridMap u = constant_circle_map(g, 0.0), v = linear_phase_map(g, 0, 1);
    const auto cu = dual_current_class(u), cv = dual_current_class(v);
    WidthQuery q;
    q.grid = make_grid(2, 4);
    q.xi = {cv[0] - cu[0], cv[1] - cu[1]};
    q.delta = 0.3;
    q.mass_cap = 4.0;
    const WidthResult w = minmax_width(q);
    if (!w.found) return {false, "no sweepout below the mass cap"};
    StringOptions so;
    so.beads = 12;
    so.iters = 3000;
    so.noise = 1e-3;
    so.seed = 1;
    const StringResult s = string_method(u, v, GLConfig{1.99, 0.05}, so);
    const double p = 1.99;
    const double lhs = sphere_volume(2) * w.width;
    const double rhs = lambda_const(2) * lambda_const(2) * (2 - p) * s.gamma_hat;
    return {lhs <= rhs * 1.25, "xi=(" + std::to_string(q.xi[0]) + "," + std::to_string(q.xi[1]) + ") L=" + fmt("%g", w.width) +
                                   " gamma_GL=" + fmt("%.4f", s.gamma_hat) + " (bead " + std::to_string(s.argmax) + "/" +
                                   std::to_string(so.beads - 1) + ", " + std::to_string(s.iterations) +
                                   " iterations); sigma_1 L=" + fmt("%.4f", lhs) + " vs 1.25 lambda^2 (2-p) gamma=" +
                                   fmt("%.4f", 1.25 * rhs)};
}

Outcome gl_sandwich() {
    const TorusGrid g = make_grid(2, 32);
    SandwichOptions so;
    so.string.beads = 12;
    so.string.iters = 2000;
    so.string.noise = 1e-3;
    so.string.seed = 1;
    const SandwichReport r = sandwich_report(constant_circle_map(g, 0.0), linear_phase_map(g, 0, 1), 1.99, {0.2, 0.1, 0.05}, so);
    std::string d = "HL sup=" + fmt("%.2f", r.hl_sup) + "; ";
    bool ok = true;
    for (const auto& row : r.rows) {
        d += "eps=" + fmt("%g", row.eps) + " gamma_GL=" + fmt("%.4f", row.gamma_gl) + (row.below_hl ? "" : " ABOVE") +
             (row.monotone ? "" : " NONMONOTONE") + "; ";
        ok = ok && row.below_hl && row.monotone;
    }
    return {ok && r.passed, d};
}

Outcome gradient_fidelity() {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> U(-1.2, 1.2);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        const GridMap w = make_ambient_map(make_grid(2, 8), 2, [&](const Point&) { return Value{U(rng), U(rng), 0.0}; });
        const GLConfig cfg{1.5 + 0.49 * (t % 5) / 4.0, 0.05 + 0.05 * (t % 4)};
        const GridMap gr = gl_gradient(w, cfg);
        double gmax = 0.0;
        for (double x : gr.values) gmax = std::max(gmax, std::abs(x));
        for (std::size_t j = 0; j < w.values.size(); ++j) {
            const double hstep = 1e-6;
            GridMap a = w, b = w;
            a.values[j] += hstep;
            b.values[j] -= hstep;
            const double fd = (gl_energy(a, cfg) - gl_energy(b, cfg)) / (2 * hstep);
            worst = std::max(worst, std::abs(fd - gr.values[j]) / std::max(std::abs(gr.values[j]), 1e-3 * gmax));
        }
    }
    return {worst < 1e-5, "worst component relative error " + fmt("%.3e", worst)};
}

Outcome retraction_estimates() {
    const GridMap pair = vortex_fixture(16, {{0.25, 0.5, 1}, {0.75, 0.5, -1}});
    std::vector<double> ratios;
    std::string d = "ratios";
    for (double p : {1.5, 1.8, 1.9, 1.95}) {
        ratios.push_back((2 - p) * retracted_cone_energy(pair, p) / p_energy(pair, p));
        d += " " + fmt("%.3f", ratios.back());
    }
    const double spread = *std::max_element(ratios.begin(), ratios.end()) / *std::min_element(ratios.begin(), ratios.end());
    d += " (max/min " + fmt("%.3f", spread) + "); drift ratio/2^-p";
    bool drift_ok = true;
    auto smooth = [](int m) {
        return make_circle_map(make_grid(2, m), [](const Point& x) {
            return 2 * kPi * x[0] + 0.7 * std::sin(2 * kPi * x[1]) + 0.3 * std::cos(2 * kPi * (x[0] - x[1]));
        });
    };
    for (double p : {1.5, 1.8, 1.95}) {
        auto drift = [&](int m) {
            const GridMap u = smooth(m);
            const RetractedMap r = retract_to_skeleton(u, 2, 5);
            return std::pow(lp_distance_masked(prolong(u, r.map.grid), r.map, p, r.mask), p);
        };
        const double rel = drift(64) / drift(32) / std::pow(2.0, -p);
        drift_ok = drift_ok && std::abs(rel - 1) < 0.25;
        d += " " + fmt("%.3f", rel);
    }
    return {spread < 4 && drift_ok, d};
}

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "annulus equality", 5, annulus_equality},
        {2, "Jacobian integrality and closedness", 10, jacobian_integrality},
        {3, "ball construction invariants", 30, ball_invariants},
        {4, "flat-norm oracle equivalence", 60, flat_norm_oracles},
        {5, "Almgren map", 10, almgren_map},
        {6, "Hang-Lin scaling", 300, hang_lin_scaling},
        {7, "mass bound", 60, mass_bound},
        {8, "main inequality at desk scale", 600, main_inequality},
        {9, "Ginzburg-Landau sandwich", 600, gl_sandwich},
        {10, "gradient fidelity", 10, gradient_fidelity},
        {11, "retraction estimates", 60, retraction_estimates},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.budget_s;
        const bool ok = o.passed && in_time;
        failed += !ok;
        std::printf("%s criterion %2d: %s [%.2f s, budget %.0f s%s] %s\n", ok ? "PASS" : "FAIL", c.id, c.name.c_str(), secs,
                    c.budget_s, in_time ? "" : ", OVER BUDGET", o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
