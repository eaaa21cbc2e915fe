#include "tbar/mountainpass.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "tbar/error.hpp"
#include "tbar/paths.hpp"

namespace tbar {

namespace {

constexpr double kGradientShift = 1e-12;

void require_ambient(const GridMap& w) {
    if (w.target != Target::Ambient) throw Error(ErrorCode::InvalidArgument, "expected an ambient map");
}

void require_config(const GLConfig& cfg) {
    if (!(cfg.eps > 0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
    if (!(cfg.p >= 1.0)) throw Error(ErrorCode::InvalidArgument, "p must be at least 1");
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double max_of(const std::vector<double>& e) { return *std::max_element(e.begin(), e.end()); }

/// Sum over the interior beads; convergence is judged on it because the fixed
/// endpoints can hold the max constant while the interior still moves.
double interior_sum(const std::vector<double>& e) { return std::accumulate(e.begin() + 1, e.end() - 1, 0.0); }

} // namespace

double gl_potential(const Value& x, int comps) {
    double r2 = 0.0;
    for (int i = 0; i < comps; ++i) r2 += x[i] * x[i];
    const double d = 1.0 - r2;
    return 0.25 * d * d;
}

GridMap to_ambient(const GridMap& u) {
    if (u.target == Target::Ambient) return u;
    GridMap w{u.grid, Target::Ambient, u.target == Target::Circle ? 2 : 3, {}};
    w.values.resize(static_cast<std::size_t>(w.comps() * u.size()));
    for (std::int64_t v = 0; v < u.size(); ++v) {
        if (u.target == Target::Circle) {
            const double a = u.angle(v);
            w.set_value(v, {std::cos(a), std::sin(a), 0.0});
        } else {
            w.set_value(v, u.value(v));
        }
    }
    return w;
}

double gl_energy(const GridMap& w, const GLConfig& cfg) {
    require_ambient(w);
    require_config(cfg);
    const TorusGrid& g = w.grid;
    const int c = w.comps();
    const double inv_h2 = static_cast<double>(g.m) * g.m;
    const double pen = std::pow(cfg.eps, -cfg.p);
    double dir = 0.0, pot = 0.0;
    for (std::int64_t v = 0; v < g.num_vertices(); ++v) {
        const Index b = g.vertex_base(v);
        const Value a = w.value(v);
        double s = 0.0;
        for (int i = 0; i < g.n; ++i) {
            Index q = b;
            q[i] += 1;
            const Value x = w.value(g.vertex_index(g.wrap(q)));
            for (int j = 0; j < c; ++j) s += (x[j] - a[j]) * (x[j] - a[j]);
        }
        dir += std::pow(s * inv_h2, 0.5 * cfg.p);
        pot += gl_potential(a, c);
    }
    return (dir + pen * pot) * g.cell_volume();
}

GridMap gl_gradient(const GridMap& w, const GLConfig& cfg) {
    require_ambient(w);
    require_config(cfg);
    const TorusGrid& g = w.grid;
    const int c = w.comps();
    const double inv_h2 = static_cast<double>(g.m) * g.m;
    const double vol = g.cell_volume();
    const double pen = std::pow(cfg.eps, -cfg.p);
    GridMap grad{g, Target::Ambient, w.k, std::vector<double>(w.values.size(), 0.0)};
    auto at = [&](std::int64_t v, int j) -> double& { return grad.values[static_cast<std::size_t>(v * c + j)]; };
    for (std::int64_t v = 0; v < g.num_vertices(); ++v) {
        const Index b = g.vertex_base(v);
        const Value a = w.value(v);
        std::array<std::int64_t, 3> nb{};
        std::array<Value, 3> diff{};
        double s = 0.0;
        for (int i = 0; i < g.n; ++i) {
            Index q = b;
            q[i] += 1;
            nb[i] = g.vertex_index(g.wrap(q));
            const Value x = w.value(nb[i]);
            for (int j = 0; j < c; ++j) {
                diff[i][j] = x[j] - a[j];
                s += diff[i][j] * diff[i][j];
            }
        }
        // d/dw of (inv_h2 * s + shift)^{p/2} * vol.
        const double coef = cfg.p * std::pow(s * inv_h2 + kGradientShift, 0.5 * cfg.p - 1.0) * inv_h2 * vol;
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < c; ++j) {
                at(nb[i], j) += coef * diff[i][j];
                at(v, j) -= coef * diff[i][j];
            }
        double r2 = 0.0;
        for (int j = 0; j < c; ++j) r2 += a[j] * a[j];
        for (int j = 0; j < c; ++j) at(v, j) -= pen * vol * (1.0 - r2) * a[j];
    }
    return grad;
}

ProjectionResult project_to_target(const GridMap& w) {
    require_ambient(w);
    ProjectionResult r;
    const int c = w.comps();
    std::vector<std::int64_t> bad;
    GridMap out{w.grid, c == 2 ? Target::Circle : Target::Sphere, c == 2 ? 2 : 3, {}};
    out.values.resize(static_cast<std::size_t>((c == 2 ? 1 : 3) * w.size()));
    for (std::int64_t v = 0; v < w.size(); ++v) {
        const Value x = w.value(v);
        double r2 = 0.0;
        for (int j = 0; j < c; ++j) r2 += x[j] * x[j];
        const double norm = std::sqrt(r2);
        const double dist = std::abs(1.0 - norm);
        if (!(dist < 0.5)) {
            bad.push_back(v);
            continue;
        }
        r.max_distance = std::max(r.max_distance, dist);
        if (c == 2) {
            out.values[static_cast<std::size_t>(v)] = wrap_angle(std::atan2(x[1], x[0]));
        } else {
            out.set_value(v, {x[0] / norm, x[1] / norm, x[2] / norm});
        }
    }
    if (!bad.empty()) {
        std::ostringstream msg;
        msg << bad.size() << " vertices at distance >= 0.5 from the target:";
        for (std::size_t i = 0; i < std::min<std::size_t>(bad.size(), 10); ++i) msg << ' ' << bad[i];
        if (bad.size() > 10) msg << " ...";
        throw Error(ErrorCode::ProjectionUnsafe, msg.str());
    }
    r.map = std::move(out);
    return r;
}

double ambient_l2(const GridMap& a, const GridMap& b) {
    require_ambient(a);
    require_ambient(b);
    if (a.grid != b.grid || a.k != b.k) throw Error(ErrorCode::DimensionMismatch, "ambient maps differ in shape");
    double s = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) s += (a.values[i] - b.values[i]) * (a.values[i] - b.values[i]);
    return std::sqrt(s * a.grid.cell_volume());
}

namespace {

/// Beads at equal L^2 arc length along the polygon through `beads`.
std::vector<GridMap> redistribute(const std::vector<GridMap>& beads) {
    const std::size_t nb = beads.size();
    std::vector<double> arc(nb, 0.0);
    for (std::size_t i = 1; i < nb; ++i) arc[i] = arc[i - 1] + ambient_l2(beads[i - 1], beads[i]);
    const double total = arc.back();
    if (!(total > 0)) return beads;
    std::vector<GridMap> out = beads;
    std::size_t seg = 0;
    for (std::size_t i = 1; i + 1 < nb; ++i) {
        const double target = total * static_cast<double>(i) / static_cast<double>(nb - 1);
        while (seg + 2 < nb && arc[seg + 1] < target) ++seg;
        const double len = arc[seg + 1] - arc[seg];
        const double a = len > 0 ? std::clamp((target - arc[seg]) / len, 0.0, 1.0) : 0.0;
        for (std::size_t j = 0; j < out[i].values.size(); ++j)
            out[i].values[j] = (1.0 - a) * beads[seg].values[j] + a * beads[seg + 1].values[j];
    }
    return out;
}

} // namespace

StringResult string_method(const GridMap& u, const GridMap& v, const GLConfig& cfg, const StringOptions& opts) {
    require_config(cfg);
    if (u.target == Target::Ambient || v.target == Target::Ambient)
        throw Error(ErrorCode::InvalidArgument, "string endpoints must be target-valued");
    if (u.grid != v.grid || u.target != v.target) throw Error(ErrorCode::DimensionMismatch, "endpoints differ in shape");
    if (opts.beads < 3) throw Error(ErrorCode::InvalidArgument, "the string needs at least 3 beads");
    const std::size_t nb = static_cast<std::size_t>(opts.beads);
    const GridMap U = to_ambient(u), V = to_ambient(v);

    StringResult res;
    std::vector<GridMap>& beads = res.beads;
    if (!opts.initial.empty()) {
        if (opts.initial.size() != nb) throw Error(ErrorCode::InvalidArgument, "initial string has the wrong bead count");
        beads = opts.initial;
        for (const GridMap& b : beads)
            if (b.target != Target::Ambient || b.grid != U.grid || b.k != U.k)
                throw Error(ErrorCode::DimensionMismatch, "initial bead differs in shape from the endpoints");
    } else {
        for (std::size_t i = 0; i < nb; ++i) {
            const double t = static_cast<double>(i) / static_cast<double>(nb - 1);
            GridMap b = U;
            for (std::size_t j = 0; j < b.values.size(); ++j) b.values[j] = (1.0 - t) * U.values[j] + t * V.values[j];
            beads.push_back(std::move(b));
        }
    }
    beads.front() = U;
    beads.back() = V;
    if (opts.noise > 0) {
        std::mt19937_64 rng(opts.seed);
        std::uniform_real_distribution<double> dist(-opts.noise, opts.noise);
        for (std::size_t i = 1; i + 1 < nb; ++i)
            for (double& x : beads[i].values) x += dist(rng);
    }

    std::vector<double>& energy = res.energies;
    energy.resize(nb);
    for (std::size_t i = 0; i < nb; ++i) energy[i] = gl_energy(beads[i], cfg);

    if (u.values == v.values && opts.initial.empty() && opts.noise == 0) {
        res.status = StringStatus::Converged;
    } else {
        std::vector<double> step(nb, opts.initial_step);
        int rejections = 0, calm = 0;
        double current_max = max_of(energy);
        double current_sum = interior_sum(energy);
        for (int it = 0; it < opts.iters; ++it) {
            for (std::size_t i = 1; i + 1 < nb; ++i) {
                const GridMap g = gl_gradient(beads[i], cfg);
                const double gn2 = dot(g.values, g.values);
                if (!(gn2 > 0)) continue;
                for (int tries = 0; tries < 60; ++tries) {
                    GridMap cand = beads[i];
                    for (std::size_t j = 0; j < cand.values.size(); ++j) cand.values[j] -= step[i] * g.values[j];
                    const double e = gl_energy(cand, cfg);
                    if (e <= energy[i] - 1e-4 * step[i] * gn2) {
                        beads[i] = std::move(cand);
                        energy[i] = e;
                        step[i] *= 1.25;
                        break;
                    }
                    step[i] *= 0.5;
                    if (step[i] < 1e-300) break;
                }
            }
            std::vector<GridMap> moved = redistribute(beads);
            std::vector<double> moved_e(nb);
            for (std::size_t i = 0; i < nb; ++i) moved_e[i] = i == 0 || i + 1 == nb ? energy[i] : gl_energy(moved[i], cfg);
            if (!std::isfinite(max_of(moved_e)) || !std::isfinite(max_of(energy)))
                throw Error(ErrorCode::Diverged, "non-finite bead energy");
            if (max_of(moved_e) <= current_max) {
                beads = std::move(moved);
                energy = std::move(moved_e);
                rejections = 0;
            } else if (++rejections >= 100) {
                throw Error(ErrorCode::Diverged, "redistribution raised the max bead energy 100 times in a row");
            }
            const double new_max = max_of(energy);
            const double new_sum = interior_sum(energy);
            res.max_history.push_back(new_max);
            res.iterations = it + 1;
            const bool still = std::abs(current_max - new_max) <= opts.rel_tol * std::max(1.0, std::abs(new_max)) &&
                               std::abs(current_sum - new_sum) <= opts.rel_tol * std::max(1.0, std::abs(new_sum));
            current_sum = new_sum;
            if (still) {
                if (++calm >= opts.patience) {
                    current_max = new_max;
                    res.status = StringStatus::Converged;
                    break;
                }
            } else {
                calm = 0;
            }
            current_max = new_max;
        }
    }

    res.argmax = static_cast<int>(std::max_element(energy.begin(), energy.end()) - energy.begin());
    res.gamma_hat = energy[static_cast<std::size_t>(res.argmax)];
    const std::size_t k = static_cast<std::size_t>(res.argmax);
    const GridMap g = gl_gradient(beads[k], cfg);
    res.saddle_gradient = std::sqrt(dot(g.values, g.values));
    if (k > 0 && k + 1 < nb) {
        std::vector<double> tau(g.values.size());
        for (std::size_t j = 0; j < tau.size(); ++j) tau[j] = beads[k + 1].values[j] - beads[k - 1].values[j];
        const double tn = std::sqrt(dot(tau, tau));
        double proj = tn > 0 ? dot(g.values, tau) / tn : 0.0;
        res.saddle_gradient_perp = std::sqrt(std::max(0.0, res.saddle_gradient * res.saddle_gradient - proj * proj));
    } else {
        res.saddle_gradient_perp = res.saddle_gradient;
    }
    return res;
}

SandwichReport sandwich_report(const GridMap& u, const GridMap& v, double p, const std::vector<double>& eps_list,
                               const SandwichOptions& opts) {
    if (eps_list.empty()) throw Error(ErrorCode::InvalidArgument, "eps list is empty");
    for (std::size_t i = 1; i < eps_list.size(); ++i)
        if (!(eps_list[i] < eps_list[i - 1])) throw Error(ErrorCode::InvalidArgument, "eps list must be decreasing");
    SandwichReport rep;
    rep.p = p;
    const MapPath path = hang_lin_path(u, v, 2, opts.hl_samples_per_stage);
    rep.hl_sup = profile_energy(path, p).sup;
    rep.sequence_barrier = opts.with_sequence ? sequence_barrier(u, v, p, opts.sequence_delta, 0).gamma_hat
                                              : std::numeric_limits<double>::quiet_NaN();

    rep.rows.resize(eps_list.size());
    StringOptions so = opts.string;
    for (std::size_t r = eps_list.size(); r-- > 0;) {
        const StringResult sr = string_method(u, v, GLConfig{p, eps_list[r]}, so);
        rep.rows[r].eps = eps_list[r];
        rep.rows[r].gamma_gl = sr.gamma_hat;
        rep.rows[r].iterations = sr.iterations;
        so.initial = sr.beads;
        so.noise = 0.0;
    }
    for (std::size_t r = 0; r < rep.rows.size(); ++r) {
        SandwichRow& row = rep.rows[r];
        row.below_hl = row.gamma_gl <= rep.hl_sup * 1.05;
        row.monotone = r == 0 || row.gamma_gl >= rep.rows[r - 1].gamma_gl * (1.0 - 0.02);
        rep.passed = rep.passed && row.below_hl && row.monotone;
    }
    return rep;
}

} // namespace tbar
