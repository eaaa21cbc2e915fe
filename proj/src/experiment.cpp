#include "tbar/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "tbar/balls.hpp"
#include "tbar/degrees.hpp"
#include "tbar/error.hpp"
#include "tbar/mountainpass.hpp"
#include "tbar/paths.hpp"
#include "tbar/svg.hpp"

namespace tbar {

using nlohmann::json;

namespace {

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string fmt(double x) { return std::isfinite(x) ? format_double(x) : (std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf")); }

json jnum(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::vector<Vortex> parse_vortices(const std::string& text, const std::string& where) {
    std::vector<Vortex> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) {
        std::istringstream in(item);
        Vortex v;
        if (!(in >> v.x >> v.y >> v.degree)) {
            if (item.find_first_not_of(" \t") == std::string::npos) continue;
            throw Error(ErrorCode::Config, where + ": vortex entries are 'x y degree' separated by ';'");
        }
        out.push_back(v);
    }
    return out;
}

FixtureSpec parse_fixture(const Config& cfg, const std::string& section, FixtureSpec f) {
    f.kind = lower(cfg.get_string(section, "kind", f.kind));
    f.q1 = static_cast<int>(cfg.get_int(section, "q1", f.q1));
    f.q2 = static_cast<int>(cfg.get_int(section, "q2", f.q2));
    f.q3 = static_cast<int>(cfg.get_int(section, "q3", f.q3));
    f.angle = cfg.get_double(section, "angle", f.angle);
    if (cfg.has(section, "vortices")) f.vortices = parse_vortices(cfg.get_string(section, "vortices", ""), section + ".vortices");
    if (cfg.has(section, "center")) {
        const auto c = cfg.get_doubles(section, "center", {});
        if (c.size() != 3) throw Error(ErrorCode::Config, section + ".center needs 3 numbers");
        f.center = {c[0], c[1], c[2]};
    }
    static const char* kinds[] = {"constant", "linear", "vortex", "random", "sine_sphere"};
    if (std::find(std::begin(kinds), std::end(kinds), f.kind) == std::end(kinds))
        throw Error(ErrorCode::Config, section + ".kind: unknown fixture '" + f.kind + "'");
    return f;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create directory " + dir + ": " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) { return (std::filesystem::path(dir) / name).string(); }

struct Run {
    const ExperimentConfig& cfg;
    std::string dir;
    int threads;
    ExperimentOutcome out;
    json summary;

    std::string path(const std::string& name) {
        out.files.push_back(name);
        return join(dir, name);
    }
    void verdict(const std::string& name, const std::string& ineq, double lhs, double rhs, bool ok) {
        out.verdicts.push_back({name, ineq, lhs, rhs, ok});
        out.passed = out.passed && ok;
    }
    TorusGrid grid() const { return make_grid(cfg.n, cfg.m); }
};

void run_energy(Run& r) {
    const GridMap u = build_fixture(r.cfg.fixture, r.grid(), r.cfg.seed);
    CsvWriter csv(r.path("energy.csv"), {"p", "energy", "completed_energy"}, r.cfg.hash);
    json rows = json::array();
    for (double p : r.cfg.ps) {
        const double e = p_energy(u, p);
        const double c = (u.target == Target::Circle && u.grid.n == 2 && p < 2) ? cone_completed_energy(u, p)
                                                                               : std::numeric_limits<double>::quiet_NaN();
        csv.row({fmt(p), fmt(e), fmt(c)});
        rows.push_back({{"p", p}, {"energy", e}, {"completed_energy", jnum(c)}});
    }
    r.summary["energies"] = rows;
}

void run_jacobian(Run& r) {
    const GridMap u = build_fixture(r.cfg.fixture, r.grid(), r.cfg.seed);
    const Chain T = jacobian_cycle(u);
    save_chain(r.path("jacobian.chain"), T);
    const CubicalComplex dual(T.grid);
    CsvWriter csv(r.path("jacobian.csv"), {"cell", "coefficient", "x", "y", "z"}, r.cfg.hash);
    for (const auto& [idx, c] : T.coeffs) {
        const Point x = dual.center(dual.cell(T.dim, idx));
        csv.row({std::to_string(idx), std::to_string(c), fmt(x[0]), fmt(x[1]), fmt(x[2])});
    }
    r.summary["mass"] = chain_mass(T);
    r.summary["cells"] = T.coeffs.size();
    if (T.dim == 0) {
        const auto aug = augmentation(T);
        r.summary["augmentation"] = aug;
        r.verdict("jacobian_balanced", "sum of plaquette windings = 0", static_cast<double>(aug), 0.0, aug == 0);
    } else {
        const bool closed = chain_boundary(T).empty();
        r.summary["homology_class"] = homology_class(T);
        r.verdict("jacobian_closed", "boundary of T = 0", closed ? 0.0 : 1.0, 0.0, closed);
    }
    if (r.cfg.fixture.kind == "vortex") {
        const std::size_t expected = r.cfg.fixture.vortices.size();
        r.verdict("vortex_count", "nonzero Jacobian cells = prescribed vortices", static_cast<double>(T.coeffs.size()),
                  static_cast<double>(expected), T.coeffs.size() == expected);
    }
}

void run_balls(Run& r) {
    const auto& f = r.cfg.fixture;
    if (f.vortices.empty()) throw Error(ErrorCode::Config, "balls experiment needs fixture.vortices");
    std::vector<Singularity> sings;
    for (const Vortex& v : f.vortices) sings.push_back({{v.x, v.y, 0.0}, v.degree});
    BallCollection coll = initial_balls(sings, r.cfg.sigma0, 2);
    CsvWriter csv(r.path("balls.csv"), {"sigma", "ball", "x", "y", "radius", "degree_sum", "frozen"}, r.cfg.hash);
    auto dump = [&](const BallCollection& c) {
        for (std::size_t i = 0; i < c.balls.size(); ++i) {
            const Ball& b = c.balls[i];
            csv.row({fmt(c.scale), std::to_string(i), fmt(b.center[0]), fmt(b.center[1]), fmt(b.radius),
                     std::to_string(b.degree_sum), b.frozen ? "1" : "0"});
        }
    };
    dump(coll);
    bool inv_ok = check_ball_invariants(coll).empty();
    for (double s : r.cfg.scales) {
        coll = grow_to_scale(coll, s);
        dump(coll);
        const std::string why = check_ball_invariants(coll);
        if (!why.empty()) r.summary["invariant_failure"] = why;
        inv_ok = inv_ok && why.empty();
    }
    r.verdict("ball_invariants", "disjoint, covering, r >= sigma d", inv_ok ? 0.0 : 1.0, 0.0, inv_ok);
    write_file(r.path("balls.svg"), svg_balls_plot("Ball construction", coll));

    // Energy lower bound per ball on the matching vortex map.
    const GridMap u = build_fixture(f, r.grid(), r.cfg.seed);
    CsvWriter lb(r.path("balls_bound.csv"), {"p", "ball", "lower_bound", "energy"}, r.cfg.hash);
    for (double p : r.cfg.ps) {
        for (std::size_t i = 0; i < coll.balls.size(); ++i) {
            const Ball& b = coll.balls[i];
            if (b.aggregate == 0) continue;
            std::vector<Singularity> mem;
            for (int j : b.members) mem.push_back(coll.singularities[static_cast<std::size_t>(j)]);
            const double bound = lower_bound_energy(mem, b.radius, p, 2);
            const TorusGrid& g = u.grid;
            const double e = cone_completed_energy_cells(u, p, [&](std::int64_t v) {
                const Point c = g.vertex_position(g.vertex_base(v));
                double d2 = 0.0;
                for (int a = 0; a < 2; ++a) {
                    double d = c[a] + 0.5 * g.h() - b.center[a];
                    d -= std::round(d);
                    d2 += d * d;
                }
                return std::sqrt(d2) < b.radius;
            });
            lb.row({fmt(p), std::to_string(i), fmt(bound), fmt(e)});
            r.verdict("ball_energy_bound", "d F_p(r/2d) <= E_p(u, B)", bound, e, bound <= e);
        }
    }
    r.summary["balls"] = coll.balls.size();
    r.summary["total_radius"] = total_radius(coll);
}

void run_flatnorm(Run& r) {
    const TorusGrid g = r.grid();
    CsvWriter csv(r.path("flatnorm.csv"), {"chain", "mass", "exact_flow", "exhaustive", "states", "equal"}, r.cfg.hash);
    std::vector<double> a(static_cast<std::size_t>(r.cfg.chains)), b(a.size());
    std::vector<std::int64_t> states(a.size());
    std::vector<Chain> chains;
    for (int i = 0; i < r.cfg.chains; ++i) chains.push_back(random_balanced_chain(g, r.cfg.max_coefficient, r.cfg.seed + static_cast<std::uint64_t>(i)));
    parallel_for(r.cfg.chains, r.threads, [&](int i) {
        const auto ex = flat_norm(chains[static_cast<std::size_t>(i)], FlatMethod::ExactFlow);
        const auto bf = flat_norm(chains[static_cast<std::size_t>(i)], FlatMethod::Exhaustive);
        a[static_cast<std::size_t>(i)] = ex.value;
        b[static_cast<std::size_t>(i)] = bf.value;
        states[static_cast<std::size_t>(i)] = bf.states;
    });
    int equal = 0;
    for (int i = 0; i < r.cfg.chains; ++i) {
        const bool eq = a[static_cast<std::size_t>(i)] == b[static_cast<std::size_t>(i)];
        equal += eq;
        csv.row({std::to_string(i), fmt(chain_mass(chains[static_cast<std::size_t>(i)])), fmt(a[static_cast<std::size_t>(i)]),
                 fmt(b[static_cast<std::size_t>(i)]), std::to_string(states[static_cast<std::size_t>(i)]), eq ? "1" : "0"});
    }
    r.summary["equal"] = equal;
    r.verdict("flat_norm_oracles", "EXACT_FLOW = EXHAUSTIVE", equal, r.cfg.chains, equal == r.cfg.chains);
}

std::vector<std::int64_t> class_difference(const GridMap& u, const GridMap& v) {
    const auto cu = dual_current_class(u), cv = dual_current_class(v);
    std::vector<std::int64_t> d(cu.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = cv[i] - cu[i];
    return d;
}

WidthResult compute_width(Run& r, const std::vector<std::int64_t>& xi) {
    WidthQuery q;
    q.grid = make_grid(2, r.cfg.width_m);
    q.xi = xi;
    q.delta = r.cfg.width_delta;
    q.mass_cap = r.cfg.mass_cap;
    return minmax_width(q);
}

void run_width(Run& r) {
    const TorusGrid g = r.grid();
    const GridMap u = build_fixture(r.cfg.start, g, r.cfg.seed), v = build_fixture(r.cfg.fixture, g, r.cfg.seed + 1);
    const auto xi = class_difference(u, v);
    WidthQuery q;
    q.grid = make_grid(2, r.cfg.width_m);
    q.xi = xi;
    q.delta = r.cfg.width_delta;
    q.mass_cap = r.cfg.mass_cap;
    const WidthResult w = minmax_width(q);
    const WidthResult wr = minmax_width_real(q);
    CsvWriter csv(r.path("width.csv"), {"m", "delta", "cap", "xi1", "xi2", "found", "width", "width_real", "states"}, r.cfg.hash);
    csv.row({std::to_string(q.grid.m), fmt(q.delta), fmt(q.mass_cap), std::to_string(xi[0]), std::to_string(xi[1]),
             w.found ? "1" : "0", fmt(w.width), fmt(wr.width), std::to_string(w.states)});
    std::ostringstream seq;
    for (std::size_t i = 0; i < w.sequence.size(); ++i) seq << "# step " << i << '\n' << format_chain(w.sequence[i]);
    write_file(r.path("width_sequence.txt"), seq.str());
    r.summary["xi"] = xi;
    r.summary["width"] = jnum(w.width);
    r.summary["width_real"] = jnum(wr.width);
    r.summary["states"] = w.states;
    r.verdict("width_found", "a sweepout below the mass cap exists", w.found ? w.width : r.cfg.mass_cap, r.cfg.mass_cap, w.found);
}

void run_hanglin(Run& r) {
    const TorusGrid g = r.grid();
    const GridMap u = build_fixture(r.cfg.start, g, r.cfg.seed), v = build_fixture(r.cfg.fixture, g, r.cfg.seed + 1);
    const MapPath path = hang_lin_path(u, v, 2, r.cfg.samples_per_stage, r.cfg.refine);
    std::vector<EnergyProfile> profiles(r.cfg.ps.size());
    parallel_for(static_cast<int>(profiles.size()), r.threads,
                 [&](int i) { profiles[static_cast<std::size_t>(i)] = profile_energy(path, r.cfg.ps[static_cast<std::size_t>(i)]); });
    CsvWriter csv(r.path("hanglin_profile.csv"), {"p", "sample", "t", "stage", "energy", "exact_energy"}, r.cfg.hash);
    CsvWriter sups(r.path("hanglin_sup.csv"), {"p", "inv_k_minus_p", "sup", "exact_sup"}, r.cfg.hash);
    std::vector<double> sup, exact_sup, xs;
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        const double p = r.cfg.ps[i];
        for (std::size_t s = 0; s < path.samples.size(); ++s)
            csv.row({fmt(p), std::to_string(s), fmt(path.samples[s].t), stage_name(path.samples[s].stage),
                     fmt(profiles[i].energies[s]), fmt(profiles[i].exact[s])});
        sups.row({fmt(p), fmt(1.0 / (2.0 - p)), fmt(profiles[i].sup), fmt(profiles[i].exact_sup)});
        sup.push_back(profiles[i].sup);
        exact_sup.push_back(profiles[i].exact_sup);
        xs.push_back(1.0 / (2.0 - p));
    }
    r.summary["samples"] = path.samples.size();
    r.summary["swaps"] = path.construction->swap_edges().size();
    r.summary["sup"] = sup;
    r.summary["exact_sup"] = exact_sup;
    if (r.cfg.ps.size() >= 2 && !path.construction->collapsed() && *std::min_element(sup.begin(), sup.end()) > 0) {
        const ScalingFit f = fit_scaling(r.cfg.ps, sup, 2);
        const ScalingFit fe = fit_scaling(r.cfg.ps, exact_sup, 2);
        r.summary["fit"] = {{"C", f.C}, {"beta", f.beta}};
        r.summary["exact_fit"] = {{"C", fe.C}, {"beta", fe.beta}};
        r.verdict("hang_lin_scaling", "0.8 <= beta <= 1.2", f.beta, 1.2, f.beta >= 0.8 && f.beta <= 1.2);
        write_file(r.path("hanglin_scaling.svg"),
                   svg_line_plot("Sup energy along the path", "1/(2-p)", "sup E_p",
                                 {{"sampled", xs, sup, false}, {"exact model", xs, exact_sup, false}}, true, true));
    }
}

void run_mountainpass(Run& r) {
    const TorusGrid g = r.grid();
    const GridMap u = build_fixture(r.cfg.start, g, r.cfg.seed), v = build_fixture(r.cfg.fixture, g, r.cfg.seed + 1);
    std::vector<SandwichReport> reps(r.cfg.ps.size());
    parallel_for(static_cast<int>(reps.size()), r.threads, [&](int i) {
        SandwichOptions so;
        so.string.beads = r.cfg.beads;
        so.string.iters = r.cfg.iters;
        so.string.noise = r.cfg.noise;
        so.string.seed = r.cfg.seed;
        so.hl_samples_per_stage = r.cfg.samples_per_stage;
        so.with_sequence = r.cfg.sequence;
        so.sequence_delta = r.cfg.sequence_delta;
        reps[static_cast<std::size_t>(i)] = sandwich_report(u, v, r.cfg.ps[static_cast<std::size_t>(i)], r.cfg.eps, so);
    });
    CsvWriter csv(r.path("mountainpass.csv"),
                  {"p", "eps", "gamma_gl", "hl_sup", "sequence_barrier", "iterations", "below_hl", "monotone"}, r.cfg.hash);
    std::vector<PlotSeries> plot;
    json rows = json::array();
    for (const auto& rep : reps) {
        PlotSeries s{"p = " + fmt(rep.p), {}, {}, false};
        for (const auto& row : rep.rows) {
            csv.row({fmt(rep.p), fmt(row.eps), fmt(row.gamma_gl), fmt(rep.hl_sup), fmt(rep.sequence_barrier),
                     std::to_string(row.iterations), row.below_hl ? "1" : "0", row.monotone ? "1" : "0"});
            rows.push_back({{"p", rep.p}, {"eps", row.eps}, {"gamma_gl", row.gamma_gl}, {"hl_sup", rep.hl_sup}});
            s.x.push_back(row.eps);
            s.y.push_back(row.gamma_gl);
            r.verdict("gl_below_hang_lin", "gamma_GL <= HL sup * 1.05", row.gamma_gl, rep.hl_sup * 1.05, row.below_hl);
            r.verdict("gl_monotone_in_eps", "gamma_GL(eps) >= gamma_GL(larger eps) * 0.98", row.gamma_gl, 0.0, row.monotone);
        }
        plot.push_back(std::move(s));
    }
    r.summary["rows"] = rows;
    write_file(r.path("mountainpass.svg"), svg_line_plot("String-method barrier", "eps", "gamma_GL", plot, true, false));
}

void run_main_inequality(Run& r) {
    const TorusGrid g = r.grid();
    const GridMap u = build_fixture(r.cfg.start, g, r.cfg.seed), v = build_fixture(r.cfg.fixture, g, r.cfg.seed + 1);
    const auto xi = class_difference(u, v);
    const WidthResult w = compute_width(r, xi);
    r.summary["xi"] = xi;
    r.summary["width"] = jnum(w.width);
    if (!w.found) throw Error(ErrorCode::SizeCap, "no sweepout below the mass cap; raise solver.mass_cap");
    const double sigma1 = sphere_volume(2);
    const double lam = lambda_const(2);
    CsvWriter csv(r.path("barrier_report.csv"),
                  {"p", "eps", "gamma_gl", "hl_sup", "sequence_barrier", "width", "lhs_sigma_L", "rhs_lambda_k_minus_p_gamma",
                   "rhs_with_tolerance", "passed"},
                  r.cfg.hash);
    struct Cell {
        double p, eps, gamma, hl, seq;
    };
    std::vector<Cell> cells;
    for (double p : r.cfg.ps)
        for (double e : r.cfg.eps) cells.push_back({p, e, 0, 0, std::numeric_limits<double>::quiet_NaN()});
    parallel_for(static_cast<int>(cells.size()), r.threads, [&](int i) {
        Cell& c = cells[static_cast<std::size_t>(i)];
        StringOptions so;
        so.beads = r.cfg.beads;
        so.iters = r.cfg.iters;
        so.noise = r.cfg.noise;
        so.seed = r.cfg.seed;
        c.gamma = string_method(u, v, GLConfig{c.p, c.eps}, so).gamma_hat;
        c.hl = profile_energy(hang_lin_path(u, v, 2, r.cfg.samples_per_stage, r.cfg.refine), c.p).sup;
        if (r.cfg.sequence) c.seq = sequence_barrier(u, v, c.p, r.cfg.sequence_delta, 0).gamma_hat;
    });
    const double tol = r.cfg.tolerance > 0 ? r.cfg.tolerance : 0.25;
    json rows = json::array();
    for (const Cell& c : cells) {
        const double lhs = sigma1 * w.width;
        const double rhs = lam * lam * (2.0 - c.p) * c.gamma;
        const bool ok = lhs <= rhs * (1.0 + tol);
        csv.row({fmt(c.p), fmt(c.eps), fmt(c.gamma), fmt(c.hl), fmt(c.seq), fmt(w.width), fmt(lhs), fmt(rhs),
                 fmt(rhs * (1.0 + tol)), ok ? "1" : "0"});
        rows.push_back({{"p", c.p}, {"eps", c.eps}, {"gamma_gl", c.gamma}, {"hl_sup", c.hl}, {"lhs", lhs}, {"rhs", rhs}});
        r.verdict("main_inequality", "sigma_1 L <= lambda^2 (2-p) gamma (1+tol)", lhs, rhs * (1.0 + tol), ok);
    }
    r.summary["rows"] = rows;
}

} // namespace

const char* experiment_kind_name(ExperimentKind k) {
    switch (k) {
    case ExperimentKind::Energy: return "ENERGY";
    case ExperimentKind::Jacobian: return "JACOBIAN";
    case ExperimentKind::Balls: return "BALLS";
    case ExperimentKind::FlatNorm: return "FLATNORM";
    case ExperimentKind::Width: return "WIDTH";
    case ExperimentKind::HangLin: return "HANGLIN";
    case ExperimentKind::MountainPass: return "MOUNTAINPASS";
    case ExperimentKind::MainInequality: return "MAIN_INEQUALITY";
    }
    return "?";
}

ExperimentKind parse_experiment_kind(const std::string& s) {
    std::string up;
    for (char c : s) up += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    for (int i = 0; i <= static_cast<int>(ExperimentKind::MainInequality); ++i) {
        const auto k = static_cast<ExperimentKind>(i);
        if (up == experiment_kind_name(k)) return k;
    }
    throw Error(ErrorCode::Config, "unknown experiment kind '" + s + "'");
}

GridMap build_fixture(const FixtureSpec& f, const TorusGrid& g, std::uint64_t seed) {
    if (f.kind == "constant") return constant_circle_map(g, f.angle);
    if (f.kind == "linear") return linear_phase_map(g, f.q1, f.q2, f.q3);
    if (f.kind == "vortex") return vortex_map(g, f.vortices, f.q1, f.q2);
    if (f.kind == "random") return random_circle_map(g, seed);
    if (f.kind == "sine_sphere") return sine_sphere_map(g, f.center);
    throw Error(ErrorCode::Config, "unknown fixture '" + f.kind + "'");
}

ExperimentConfig parse_experiment_config(const Config& cfg) {
    ExperimentConfig e;
    if (!cfg.has("experiment", "kind")) throw Error(ErrorCode::Config, "experiment.kind is required");
    e.kind = parse_experiment_kind(cfg.get_string("experiment", "kind", ""));
    const std::int64_t seed = cfg.get_int("experiment", "seed", 1);
    if (seed < 0) throw Error(ErrorCode::Config, "experiment.seed must be non-negative");
    e.seed = static_cast<std::uint64_t>(seed);
    e.n = static_cast<int>(cfg.get_int("grid", "n", 2));
    e.m = static_cast<int>(cfg.get_int("grid", "m", 32));
    if (e.n != 2 && e.n != 3) throw Error(ErrorCode::Config, "grid.n must be 2 or 3");
    if (e.m < 3) throw Error(ErrorCode::Config, "grid.m must be at least 3");
    try {
        e.target = parse_target(cfg.get_string("target", "name", "circle"));
    } catch (const Error& err) {
        throw Error(ErrorCode::Config, std::string("target.name: ") + err.what());
    }
    if (e.target == Target::Ambient) throw Error(ErrorCode::Config, "target.name must be circle or sphere");
    e.k = e.target == Target::Circle ? 2 : 3;
    e.ps = cfg.get_doubles("sweep", "p", e.ps);
    e.eps = cfg.get_doubles("sweep", "eps", e.eps);
    for (double p : e.ps)
        if (!(p > e.k - 1 && p < e.k)) throw Error(ErrorCode::Config, "sweep.p values must lie in (k-1, k)");
    for (double x : e.eps)
        if (!(x > 0)) throw Error(ErrorCode::Config, "sweep.eps values must be positive");
    e.fixture = parse_fixture(cfg, "fixture", e.target == Target::Sphere ? fixture_of("sine_sphere") : FixtureSpec{});
    e.start = parse_fixture(cfg, "start", fixture_of("constant"));
    if (e.target == Target::Sphere && e.fixture.kind != "sine_sphere")
        throw Error(ErrorCode::Config, "sphere targets use the sine_sphere fixture");
    e.beads = static_cast<int>(cfg.get_int("solver", "beads", e.beads));
    e.iters = static_cast<int>(cfg.get_int("solver", "iters", e.iters));
    e.noise = cfg.get_double("solver", "noise", e.noise);
    e.samples_per_stage = static_cast<int>(cfg.get_int("solver", "samples_per_stage", e.samples_per_stage));
    e.refine = static_cast<int>(cfg.get_int("solver", "refine", e.refine));
    e.sequence = cfg.get_int("solver", "sequence", 0) != 0;
    e.sequence_delta = cfg.get_double("solver", "sequence_delta", e.sequence_delta);
    e.width_m = static_cast<int>(cfg.get_int("solver", "width_m", e.width_m));
    e.width_delta = cfg.get_double("solver", "width_delta", e.width_delta);
    e.mass_cap = cfg.get_double("solver", "mass_cap", e.mass_cap);
    e.chains = static_cast<int>(cfg.get_int("solver", "chains", e.chains));
    e.max_coefficient = static_cast<int>(cfg.get_int("solver", "max_coefficient", e.max_coefficient));
    e.sigma0 = cfg.get_double("solver", "sigma0", e.sigma0);
    e.scales = cfg.get_doubles("solver", "scales", e.scales);
    e.tolerance = cfg.get_double("solver", "tolerance", e.tolerance);
    if (e.beads < 3) throw Error(ErrorCode::Config, "solver.beads must be at least 3");
    if (e.iters < 0) throw Error(ErrorCode::Config, "solver.iters must be non-negative");
    if (e.samples_per_stage < 1) throw Error(ErrorCode::Config, "solver.samples_per_stage must be positive");
    if (e.refine < 1 || e.refine % 2 == 0) throw Error(ErrorCode::Config, "solver.refine must be a positive odd integer");
    if (e.chains < 1) throw Error(ErrorCode::Config, "solver.chains must be positive");
    if (e.width_m < 3) throw Error(ErrorCode::Config, "solver.width_m must be at least 3");
    e.canonical = cfg.canonical();
    e.hash = hex64(fnv1a64(e.canonical));
    return e;
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, int threads) {
    ensure_dir(out_dir);
    Run r{cfg, out_dir, std::max(1, threads), {}, json::object()};
    r.summary["kind"] = experiment_kind_name(cfg.kind);
    r.summary["config_hash"] = cfg.hash;
    r.summary["seed"] = cfg.seed;
    auto finish = [&](const std::string& error) {
        json verdicts = json::array();
        for (const auto& v : r.out.verdicts)
            verdicts.push_back({{"name", v.name}, {"inequality", v.inequality}, {"lhs", jnum(v.lhs)}, {"rhs", jnum(v.rhs)},
                                {"passed", v.passed}});
        r.summary["verdicts"] = verdicts;
        r.summary["passed"] = error.empty() && r.out.passed;
        if (!error.empty()) r.summary["error"] = error;
        r.out.files.push_back("summary.json");
        r.summary["files"] = r.out.files;
        r.out.summary_json = r.summary.dump(2) + "\n";
        write_file(join(out_dir, "summary.json"), r.out.summary_json);
    };
    try {
        switch (cfg.kind) {
        case ExperimentKind::Energy: run_energy(r); break;
        case ExperimentKind::Jacobian: run_jacobian(r); break;
        case ExperimentKind::Balls: run_balls(r); break;
        case ExperimentKind::FlatNorm: run_flatnorm(r); break;
        case ExperimentKind::Width: run_width(r); break;
        case ExperimentKind::HangLin: run_hanglin(r); break;
        case ExperimentKind::MountainPass: run_mountainpass(r); break;
        case ExperimentKind::MainInequality: run_main_inequality(r); break;
        }
    } catch (const std::exception& e) {
        finish(e.what());
        throw;
    }
    finish("");
    return r.out;
}

Chain random_balanced_chain(const TorusGrid& g, int max_coef, std::uint64_t seed) {
    if (max_coef < 1) throw Error(ErrorCode::InvalidArgument, "max_coef must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> coef(-max_coef, max_coef);
    std::bernoulli_distribution present(0.4);
    for (;;) {
        Chain c = zero_chain(g, 0);
        for (std::int64_t v = 0; v < g.num_vertices(); ++v)
            if (present(rng)) c.add(v, coef(rng));
        if (!c.empty() && augmentation(c) == 0) return c;
    }
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    if (count <= 0) return;
    const int workers = std::max(1, std::min(threads, count));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mu);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

} // namespace tbar
