#include "tbar/cycles.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <queue>
#include <string>
#include <unordered_map>

#include "tbar/degrees.hpp"
#include "tbar/error.hpp"

namespace tbar {

void Chain::add(std::int64_t cell, std::int64_t c) {
    if (c == 0) return;
    auto it = coeffs.find(cell);
    if (it == coeffs.end()) {
        coeffs.emplace(cell, c);
        return;
    }
    it->second += c;
    if (it->second == 0) coeffs.erase(it);
}

std::int64_t Chain::coef(std::int64_t cell) const {
    auto it = coeffs.find(cell);
    return it == coeffs.end() ? 0 : it->second;
}

Chain zero_chain(const TorusGrid& g, int dim) { return Chain{g, dim, {}}; }

namespace {

void require_compatible(const Chain& a, const Chain& b) {
    if (a.grid != b.grid || a.dim != b.dim) throw Error(ErrorCode::DimensionMismatch, "chains live on different grids or dimensions");
}

} // namespace

Chain operator+(const Chain& a, const Chain& b) {
    require_compatible(a, b);
    Chain c = a;
    for (const auto& [k, v] : b.coeffs) c.add(k, v);
    return c;
}

Chain operator-(const Chain& a, const Chain& b) {
    require_compatible(a, b);
    Chain c = a;
    for (const auto& [k, v] : b.coeffs) c.add(k, -v);
    return c;
}

Chain operator*(std::int64_t s, const Chain& a) {
    Chain c = zero_chain(a.grid, a.dim);
    if (s == 0) return c;
    for (const auto& [k, v] : a.coeffs) c.coeffs.emplace(k, s * v);
    return c;
}

Chain chain_boundary(const Chain& c) {
    if (c.dim < 1) throw Error(ErrorCode::DimensionMismatch, "0-chains have no boundary; use augmentation");
    const CubicalComplex cx(c.grid);
    Chain out = zero_chain(c.grid, c.dim - 1);
    for (const auto& [idx, coef] : c.coeffs)
        for (const Incidence& inc : cx.boundary(c.dim, idx)) out.add(inc.index, inc.sign * coef);
    return out;
}

double chain_mass(const Chain& c) { return static_cast<double>(coefficient_l1(c)) * std::pow(c.grid.h(), c.dim); }

std::int64_t coefficient_l1(const Chain& c) {
    std::int64_t s = 0;
    for (const auto& kv : c.coeffs) s += std::abs(kv.second);
    return s;
}

std::int64_t augmentation(const Chain& c) {
    std::int64_t s = 0;
    for (const auto& kv : c.coeffs) s += kv.second;
    return s;
}

std::vector<std::int64_t> homology_class(const Chain& c) {
    if (c.dim == 0) return {augmentation(c)};
    if (!chain_boundary(c).empty()) throw Error(ErrorCode::NonzeroBoundary, "homology_class requires a cycle");
    const CubicalComplex cx(c.grid);
    const auto& sets = cx.axis_sets(c.dim);
    std::vector<std::int64_t> out(sets.size(), 0);
    for (const auto& [idx, coef] : c.coeffs) {
        const Cell cell = cx.cell(c.dim, idx);
        bool on_cut = true;
        for (int a : axes_list(cell.axes)) on_cut = on_cut && cell.base[a] == 0;
        if (on_cut) out[static_cast<std::size_t>(cx.axis_rank(cell.axes))] += coef;
    }
    return out;
}

Chain jacobian_cycle(const GridMap& u) {
    if (u.target == Target::Ambient) throw Error(ErrorCode::InvalidArgument, "jacobian_cycle requires a target-valued map");
    const int k = u.target == Target::Sphere ? 3 : 2;
    const int n = u.grid.n;
    if (k > n) throw Error(ErrorCode::DimensionMismatch, "target dimension exceeds the torus dimension");
    const CubicalComplex cx(u.grid);
    const TorusGrid dg = dual_grid(u.grid);
    const CubicalComplex dcx(dg);
    const auto degrees = cell_degrees(u);
    Chain out = zero_chain(dg, n - k);
    for (std::size_t i = 0; i < degrees.size(); ++i) {
        if (degrees[i] == 0) continue;
        const DualCell dc = dual_cell(cx, cx.cell(k, static_cast<std::int64_t>(i)));
        out.add(dcx.cell_index(dc.cell), static_cast<std::int64_t>(degrees[i]) * dc.orientation);
    }
    return out;
}

Chain branch_cut_chain(const GridMap& u) {
    if (u.target != Target::Circle) throw Error(ErrorCode::InvalidArgument, "branch_cut_chain needs a circle map");
    const int n = u.grid.n;
    const CubicalComplex cx(u.grid);
    const TorusGrid dg = dual_grid(u.grid);
    const CubicalComplex dcx(dg);
    Chain out = zero_chain(dg, n - 1);
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::int64_t i = 0; i < cx.num_cells(1); ++i) {
        const Cell e = cx.cell(1, i);
        Index b1 = e.base;
        b1[axes_list(e.axes)[0]] += 1;
        const double a0 = u.angle(u.grid.vertex_index(e.base));
        const double a1 = u.angle(u.grid.vertex_index(u.grid.wrap(b1)));
        const double raw = a1 - a0;
        const auto crossings = static_cast<std::int64_t>(std::llround((raw - wrap_diff(raw)) / two_pi));
        if (crossings == 0) continue;
        const DualCell dc = dual_cell(cx, e);
        // With this sign the boundary of the cut chain is the Jacobian cycle.
        out.add(dcx.cell_index(dc.cell), -crossings * dc.orientation);
    }
    return out;
}

std::vector<std::int64_t> dual_current_class(const GridMap& u) { return homology_class(branch_cut_chain(u)); }

// ---------------------------------------------------------------------------
// Transport on the vertex graph (0-chains)
// ---------------------------------------------------------------------------

namespace {

int torus_axis_distance(int a, int b, int m) {
    const int d = ((b - a) % m + m) % m;
    return std::min(d, m - d);
}

int torus_l1(const TorusGrid& g, const Index& a, const Index& b) {
    int s = 0;
    for (int i = 0; i < g.n; ++i) s += torus_axis_distance(a[i], b[i], g.m);
    return s;
}

// Oriented edge path from `from` to `to`: axis 0 first, shorter direction, ties positive.
Chain canonical_path(const TorusGrid& g, Index from, const Index& to) {
    const CubicalComplex cx(g);
    Chain path = zero_chain(g, 1);
    for (int a = 0; a < g.n; ++a) {
        const int fwd = ((to[a] - from[a]) % g.m + g.m) % g.m;
        const int step = fwd <= g.m - fwd ? 1 : -1;
        const int len = step > 0 ? fwd : g.m - fwd;
        for (int t = 0; t < len; ++t) {
            Cell e;
            e.dim = 1;
            e.axes = 1u << a;
            if (step > 0) {
                e.base = from;
                path.add(cx.cell_index(e), 1);
                from[a] = (from[a] + 1) % g.m;
            } else {
                from[a] = (from[a] - 1 + g.m) % g.m;
                e.base = from;
                path.add(cx.cell_index(e), -1);
            }
        }
    }
    return path;
}

struct FlowArc {
    int to;
    std::int64_t cap;
    std::int64_t cost;
};

// Successive shortest paths with Bellman-Ford (SPFA); graphs here are tiny.
class MinCostFlow {
public:
    explicit MinCostFlow(int nodes) : adj_(static_cast<std::size_t>(nodes)) {}

    int add_arc(int from, int to, std::int64_t cap, std::int64_t cost) {
        adj_[static_cast<std::size_t>(from)].push_back(static_cast<int>(arcs_.size()));
        arcs_.push_back({to, cap, cost});
        adj_[static_cast<std::size_t>(to)].push_back(static_cast<int>(arcs_.size()));
        arcs_.push_back({from, 0, -cost});
        return static_cast<int>(arcs_.size()) - 2;
    }

    std::int64_t flow_on(int arc) const { return arcs_[static_cast<std::size_t>(arc ^ 1)].cap; }

    std::pair<std::int64_t, std::int64_t> run(int s, int t) {
        std::int64_t flow = 0, cost = 0;
        const std::size_t n = adj_.size();
        while (true) {
            std::vector<std::int64_t> dist(n, std::numeric_limits<std::int64_t>::max());
            std::vector<int> via(n, -1);
            std::vector<char> inq(n, 0);
            std::deque<int> q;
            dist[static_cast<std::size_t>(s)] = 0;
            q.push_back(s);
            while (!q.empty()) {
                const int v = q.front();
                q.pop_front();
                inq[static_cast<std::size_t>(v)] = 0;
                for (int ai : adj_[static_cast<std::size_t>(v)]) {
                    const FlowArc& a = arcs_[static_cast<std::size_t>(ai)];
                    if (a.cap <= 0) continue;
                    const std::int64_t nd = dist[static_cast<std::size_t>(v)] + a.cost;
                    if (nd < dist[static_cast<std::size_t>(a.to)]) {
                        dist[static_cast<std::size_t>(a.to)] = nd;
                        via[static_cast<std::size_t>(a.to)] = ai;
                        if (!inq[static_cast<std::size_t>(a.to)]) {
                            inq[static_cast<std::size_t>(a.to)] = 1;
                            q.push_back(a.to);
                        }
                    }
                }
            }
            if (via[static_cast<std::size_t>(t)] < 0) break;
            std::int64_t push = std::numeric_limits<std::int64_t>::max();
            for (int v = t; v != s; v = arcs_[static_cast<std::size_t>(via[static_cast<std::size_t>(v)] ^ 1)].to)
                push = std::min(push, arcs_[static_cast<std::size_t>(via[static_cast<std::size_t>(v)])].cap);
            for (int v = t; v != s; v = arcs_[static_cast<std::size_t>(via[static_cast<std::size_t>(v)] ^ 1)].to) {
                arcs_[static_cast<std::size_t>(via[static_cast<std::size_t>(v)])].cap -= push;
                arcs_[static_cast<std::size_t>(via[static_cast<std::size_t>(v)] ^ 1)].cap += push;
            }
            flow += push;
            cost += push * dist[static_cast<std::size_t>(t)];
        }
        return {flow, cost};
    }

private:
    std::vector<std::vector<int>> adj_;
    std::vector<FlowArc> arcs_;
};

struct TransportPlan {
    Chain S;
    Chain T_prime;
};

// Transport the positive part of a balanced 0-chain onto its negative part; when
// `disposal` is set each unit may instead stay in T' at cost 1 (m mass units).
TransportPlan transport(const Chain& T, bool disposal) {
    const TorusGrid& g = T.grid;
    std::vector<std::pair<std::int64_t, std::int64_t>> pos, neg;
    for (const auto& [v, c] : T.coeffs) (c > 0 ? pos : neg).push_back({v, std::abs(c)});
    const int np = static_cast<int>(pos.size()), nn = static_cast<int>(neg.size());
    const int src = np + nn, dump = np + nn + 1, sink = np + nn + 2;
    MinCostFlow mcf(np + nn + 3);
    std::vector<std::vector<int>> pair_arc(static_cast<std::size_t>(np), std::vector<int>(static_cast<std::size_t>(nn)));
    std::vector<int> dispose_pos(static_cast<std::size_t>(np), -1), dispose_neg(static_cast<std::size_t>(nn), -1);
    std::int64_t total = 0;
    for (int i = 0; i < np; ++i) {
        mcf.add_arc(src, i, pos[static_cast<std::size_t>(i)].second, 0);
        total += pos[static_cast<std::size_t>(i)].second;
    }
    for (int j = 0; j < nn; ++j) mcf.add_arc(np + j, sink, neg[static_cast<std::size_t>(j)].second, 0);
    for (int i = 0; i < np; ++i)
        for (int j = 0; j < nn; ++j) {
            const int d = torus_l1(g, g.vertex_base(pos[static_cast<std::size_t>(i)].first),
                                   g.vertex_base(neg[static_cast<std::size_t>(j)].first));
            pair_arc[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = mcf.add_arc(i, np + j, total, d);
        }
    if (disposal) {
        for (int i = 0; i < np; ++i) dispose_pos[static_cast<std::size_t>(i)] = mcf.add_arc(i, dump, total, g.m);
        for (int j = 0; j < nn; ++j) dispose_neg[static_cast<std::size_t>(j)] = mcf.add_arc(dump, np + j, total, g.m);
    }
    const auto [flow, cost] = mcf.run(src, sink);
    (void)cost;
    if (flow != total) throw Error(ErrorCode::InvalidArgument, "transport requires a balanced 0-chain");
    TransportPlan plan{zero_chain(g, 1), zero_chain(g, 0)};
    for (int i = 0; i < np; ++i)
        for (int j = 0; j < nn; ++j) {
            const std::int64_t f = mcf.flow_on(pair_arc[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
            if (f == 0) continue;
            // dS must equal P - N, so S runs from N to P.
            const Chain path = canonical_path(g, g.vertex_base(neg[static_cast<std::size_t>(j)].first),
                                              g.vertex_base(pos[static_cast<std::size_t>(i)].first));
            plan.S = plan.S + f * path;
        }
    if (disposal) {
        for (int i = 0; i < np; ++i)
            plan.T_prime.add(pos[static_cast<std::size_t>(i)].first, mcf.flow_on(dispose_pos[static_cast<std::size_t>(i)]));
        for (int j = 0; j < nn; ++j)
            plan.T_prime.add(neg[static_cast<std::size_t>(j)].first, -mcf.flow_on(dispose_neg[static_cast<std::size_t>(j)]));
    }
    return plan;
}

// ---------------------------------------------------------------------------
// Exhaustive flat norm: frontier dynamic program over the (dim+1)-cells
// ---------------------------------------------------------------------------

struct FrontierStep {
    std::vector<std::int64_t> opening;            // faces opened at this step (appended after the previous frontier)
    std::vector<std::pair<int, int>> touched;     // (position in the extended frontier, sign)
    std::vector<int> keep;                        // positions of the extended frontier that stay open
    std::vector<int> closing;                     // positions closed at this step
    std::vector<int> remaining_after;             // for each kept face, unprocessed cofaces after this step
    std::int64_t unopened_after = 0;              // sum |T_f| over faces not yet opened
};

struct FrontierPlan {
    std::vector<std::int64_t> order;  // (dim+1)-cell indices in processing order
    std::vector<FrontierStep> steps;
};

FrontierPlan plan_frontier(const Chain& T) {
    const CubicalComplex cx(T.grid);
    const int j = T.dim;
    const std::int64_t ncells = cx.num_cells(j + 1);
    const std::int64_t nv = T.grid.num_vertices();
    FrontierPlan plan;
    for (std::int64_t i = 0; i < ncells; ++i) plan.order.push_back(i);
    std::stable_sort(plan.order.begin(), plan.order.end(), [nv](std::int64_t a, std::int64_t b) {
        return std::make_pair(a % nv, a / nv) < std::make_pair(b % nv, b / nv);
    });
    const std::int64_t nfaces = cx.num_cells(j);
    std::vector<int> first(static_cast<std::size_t>(nfaces), -1), last(static_cast<std::size_t>(nfaces), -1),
        count(static_cast<std::size_t>(nfaces), 0);
    std::vector<std::vector<Incidence>> bd(static_cast<std::size_t>(ncells));
    for (std::size_t s = 0; s < plan.order.size(); ++s) {
        bd[s] = cx.boundary(j + 1, plan.order[s]);
        for (const Incidence& inc : bd[s]) {
            auto f = static_cast<std::size_t>(inc.index);
            if (first[f] < 0) first[f] = static_cast<int>(s);
            last[f] = static_cast<int>(s);
            ++count[f];
        }
    }
    std::int64_t unopened = 0;
    for (const auto& kv : T.coeffs) unopened += std::abs(kv.second);
    std::vector<std::int64_t> frontier;
    std::vector<int> seen(static_cast<std::size_t>(nfaces), 0);
    for (std::size_t s = 0; s < plan.order.size(); ++s) {
        FrontierStep st;
        std::vector<std::int64_t> ext = frontier;
        for (const Incidence& inc : bd[s]) {
            if (first[static_cast<std::size_t>(inc.index)] == static_cast<int>(s) &&
                std::find(st.opening.begin(), st.opening.end(), inc.index) == st.opening.end()) {
                st.opening.push_back(inc.index);
                ext.push_back(inc.index);
                unopened -= std::abs(T.coef(inc.index));
            }
        }
        for (const Incidence& inc : bd[s]) {
            const int pos = static_cast<int>(std::find(ext.begin(), ext.end(), inc.index) - ext.begin());
            st.touched.push_back({pos, inc.sign});
            ++seen[static_cast<std::size_t>(inc.index)];
        }
        std::vector<std::int64_t> next;
        for (std::size_t p = 0; p < ext.size(); ++p) {
            const auto f = static_cast<std::size_t>(ext[p]);
            if (last[f] == static_cast<int>(s)) {
                st.closing.push_back(static_cast<int>(p));
            } else {
                st.keep.push_back(static_cast<int>(p));
                st.remaining_after.push_back(count[f] - seen[f]);
                next.push_back(ext[p]);
            }
        }
        st.unopened_after = unopened;
        frontier = std::move(next);
        plan.steps.push_back(std::move(st));
    }
    return plan;
}

struct DpNode {
    std::int64_t cost;
    int parent;
    int coef;
};

struct DpResult {
    bool found = false;
    std::int64_t cost = 0;
    std::vector<int> coefs;  // per processed cell
    std::int64_t states = 0;
};

DpResult run_frontier_dp(const Chain& T, const FrontierPlan& plan, int bound, std::int64_t disposal_cost, int faces_per_cell,
                         std::int64_t upper, std::size_t beam) {
    using Key = std::string;  // one signed byte per open face
    std::vector<std::vector<DpNode>> layers;
    std::vector<Key> keys{Key{}};
    std::vector<DpNode> nodes{{0, -1, 0}};
    DpResult res;
    auto lower_bound = [&](const Key& k, const FrontierStep& st) {
        std::int64_t r = st.unopened_after, lb2 = 0;
        for (std::size_t p = 0; p < k.size(); ++p) {
            const std::int64_t a = std::abs(static_cast<std::int64_t>(static_cast<signed char>(k[p])));
            r += a;
            lb2 += disposal_cost * std::max<std::int64_t>(0, a - static_cast<std::int64_t>(bound) * st.remaining_after[p]);
        }
        const std::int64_t lb1 = (r + faces_per_cell - 1) / faces_per_cell;
        return std::max(lb1, lb2);
    };
    std::vector<std::vector<DpNode>> history;
    for (std::size_t s = 0; s < plan.steps.size(); ++s) {
        const FrontierStep& st = plan.steps[s];
        std::unordered_map<Key, int> index;
        std::vector<Key> nkeys;
        std::vector<DpNode> nnodes;
        std::vector<std::int64_t> lbs;
        Key ext, out;
        for (std::size_t si = 0; si < keys.size(); ++si) {
            for (int c = -bound; c <= bound; ++c) {
                ext = keys[si];
                for (std::int64_t f : st.opening) ext.push_back(static_cast<char>(T.coef(f)));
                for (const auto& [pos, sign] : st.touched) {
                    char& r = ext[static_cast<std::size_t>(pos)];
                    r = static_cast<char>(static_cast<signed char>(r) - sign * c);
                }
                std::int64_t cost = nodes[si].cost + std::abs(c);
                for (int pos : st.closing)
                    cost += disposal_cost * std::abs(static_cast<std::int64_t>(static_cast<signed char>(ext[static_cast<std::size_t>(pos)])));
                out.clear();
                for (int pos : st.keep) out.push_back(ext[static_cast<std::size_t>(pos)]);
                const std::int64_t lb = lower_bound(out, st);
                if (cost + lb > upper) continue;
                auto it = index.find(out);
                if (it == index.end()) {
                    index.emplace(out, static_cast<int>(nkeys.size()));
                    nkeys.push_back(out);
                    nnodes.push_back({cost, static_cast<int>(si), c});
                    lbs.push_back(lb);
                } else if (cost < nnodes[static_cast<std::size_t>(it->second)].cost) {
                    nnodes[static_cast<std::size_t>(it->second)] = {cost, static_cast<int>(si), c};
                }
            }
        }
        res.states += static_cast<std::int64_t>(nkeys.size());
        if (beam > 0 && nkeys.size() > beam) {
            std::vector<std::size_t> idx(nkeys.size());
            for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
            std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(beam), idx.end(), [&](std::size_t a, std::size_t b) {
                const std::int64_t fa = nnodes[a].cost + lbs[a], fb = nnodes[b].cost + lbs[b];
                return fa != fb ? fa < fb : nkeys[a] < nkeys[b];
            });
            idx.resize(beam);
            std::sort(idx.begin(), idx.end());
            std::vector<Key> k2;
            std::vector<DpNode> n2;
            for (std::size_t i : idx) {
                k2.push_back(nkeys[i]);
                n2.push_back(nnodes[i]);
            }
            nkeys = std::move(k2);
            nnodes = std::move(n2);
        }
        history.push_back(nnodes);
        keys = std::move(nkeys);
        nodes = std::move(nnodes);
        if (keys.empty()) return res;
    }
    // The last frontier is empty, so exactly one state remains.
    res.found = true;
    res.cost = nodes[0].cost;
    res.coefs.assign(plan.steps.size(), 0);
    int cur = 0;
    for (std::size_t s = plan.steps.size(); s-- > 0;) {
        const DpNode& nd = history[s][static_cast<std::size_t>(cur)];
        res.coefs[s] = nd.coef;
        cur = nd.parent;
    }
    return res;
}

FlatNormResult flat_exhaustive(const Chain& T, const ExhaustiveOptions& opts) {
    const CubicalComplex cx(T.grid);
    const std::int64_t ncells = cx.num_cells(T.dim + 1);
    if (T.dim + 1 > T.grid.n) throw Error(ErrorCode::DimensionMismatch, "top-dimensional chains have no fillings");
    if (ncells > opts.max_cells)
        throw Error(ErrorCode::SizeCap, "exhaustive flat norm limited to " + std::to_string(opts.max_cells) + " cells, got " +
                                            std::to_string(ncells));
    const FrontierPlan plan = plan_frontier(T);
    const int faces = 2 * (T.dim + 1);
    const std::int64_t disposal = T.grid.m;  // one unit of a dim-cell is m units of a (dim+1)-cell
    const std::int64_t trivial = disposal * coefficient_l1(T);
    const DpResult seed = run_frontier_dp(T, plan, opts.coefficient_bound, disposal, faces, trivial,
                                          static_cast<std::size_t>(opts.beam_width));
    DpResult best = seed;
    // The beam already realizes its cost, so the exact pass only has to look for strictly cheaper S.
    DpResult exact = run_frontier_dp(T, plan, opts.coefficient_bound, disposal, faces, (seed.found ? seed.cost : trivial + 1) - 1, 0);
    if (exact.found && (!best.found || exact.cost < best.cost)) best = exact;
    FlatNormResult r;
    r.states = seed.states + exact.states;
    r.witness_S = zero_chain(T.grid, T.dim + 1);
    for (std::size_t s = 0; s < plan.order.size(); ++s) r.witness_S.add(plan.order[s], best.coefs[s]);
    r.witness_T_prime = T - chain_boundary(r.witness_S);
    r.value = chain_mass(r.witness_T_prime) + chain_mass(r.witness_S);
    return r;
}

} // namespace

FlatNormResult flat_norm(const Chain& T, FlatMethod method, const ExhaustiveOptions& opts) {
    if (method == FlatMethod::ExactFlow) {
        if (T.dim != 0) throw Error(ErrorCode::MethodMismatch, "EXACT_FLOW handles 0-chains only");
        if (augmentation(T) != 0) throw Error(ErrorCode::MethodMismatch, "EXACT_FLOW needs zero total coefficient");
        const TransportPlan plan = transport(T, true);
        FlatNormResult r;
        r.witness_S = plan.S;
        r.witness_T_prime = plan.T_prime;
        r.value = chain_mass(plan.T_prime) + chain_mass(plan.S);
        return r;
    }
    return flat_exhaustive(T, opts);
}

Chain min_filling(const Chain& T) {
    if (T.dim != 0) throw Error(ErrorCode::DimensionMismatch, "min_filling handles 0-chains only");
    if (augmentation(T) != 0) throw Error(ErrorCode::NonzeroBoundary, "only balanced 0-chains bound");
    return transport(T, false).S;
}

// ---------------------------------------------------------------------------
// Almgren map
// ---------------------------------------------------------------------------

namespace {

void check_sequence(const std::vector<Chain>& seq) {
    if (seq.empty()) throw Error(ErrorCode::InvalidArgument, "empty sequence");
    for (const Chain& c : seq) {
        if (c.dim != 0) throw Error(ErrorCode::DimensionMismatch, "Almgren class implemented for 0-cycles");
        if (c.grid != seq.front().grid) throw Error(ErrorCode::DimensionMismatch, "sequence mixes grids");
        if (augmentation(c) != 0) throw Error(ErrorCode::NonzeroBoundary, "sequence members must be balanced");
    }
    if (!seq.front().empty() || !seq.back().empty())
        throw Error(ErrorCode::InvalidArgument, "sequence must start and end at the zero chain");
}

} // namespace

std::vector<std::int64_t> almgren_class_with_fillings(const std::vector<Chain>& seq, const std::vector<Chain>& fillings,
                                                      double delta, const AlmgrenOptions& opts) {
    check_sequence(seq);
    if (fillings.size() + 1 != seq.size()) throw Error(ErrorCode::InvalidArgument, "need one filling per step");
    Chain total = zero_chain(seq.front().grid, 1);
    for (std::size_t i = 1; i < seq.size(); ++i) {
        const Chain diff = seq[i] - seq[i - 1];
        const double fl = flat_norm(diff, FlatMethod::ExactFlow).value;
        if (fl >= delta)
            throw Error(ErrorCode::Fineness, "step " + std::to_string(i) + " has flat norm " + std::to_string(fl) +
                                                 " >= delta " + std::to_string(delta));
        const Chain& S = fillings[i - 1];
        if (!(chain_boundary(S) == diff)) throw Error(ErrorCode::InvalidArgument, "filling " + std::to_string(i - 1) + " has the wrong boundary");
        const double mass = chain_mass(S);
        if (mass >= 0.5 * opts.eps0)
            throw Error(ErrorCode::FillTooBig, "filling " + std::to_string(i - 1) + " has mass " + std::to_string(mass));
        total = total + S;
    }
    return homology_class(total);
}

std::vector<std::int64_t> almgren_class(const std::vector<Chain>& seq, double delta, const AlmgrenOptions& opts) {
    check_sequence(seq);
    std::vector<Chain> fills;
    for (std::size_t i = 1; i < seq.size(); ++i) fills.push_back(min_filling(seq[i] - seq[i - 1]));
    return almgren_class_with_fillings(seq, fills, delta, opts);
}

// ---------------------------------------------------------------------------
// Min-max widths of 0-cycles on T^2
// ---------------------------------------------------------------------------

namespace {

struct Move {
    std::vector<std::pair<std::int64_t, int>> delta;  // vertex changes (dS)
    std::vector<std::int64_t> class_step;              // class of S - R(dS)
    Chain S;
};

// Canonical filling of a balanced 0-chain: paths from vertex 0 to each unit.
Chain reference_filling(const Chain& T) {
    Chain R = zero_chain(T.grid, 1);
    const Index origin{0, 0, 0};
    for (const auto& [v, c] : T.coeffs) R = R + c * canonical_path(T.grid, origin, T.grid.vertex_base(v));
    return R;
}

std::vector<Move> enumerate_moves(const TorusGrid& g, double delta) {
    const CubicalComplex cx(g);
    const std::int64_t ne = cx.num_cells(1);
    const int max_edges = static_cast<int>(std::ceil(delta / g.h())) - 1;  // k edges allowed iff k h < delta
    std::vector<Move> moves;
    auto push = [&](const Chain& S) {
        Move mv;
        mv.S = S;
        const Chain d = chain_boundary(S);
        if (d.empty()) return;
        for (const auto& [v, c] : d.coeffs) mv.delta.push_back({v, static_cast<int>(c)});
        mv.class_step = homology_class(S - reference_filling(d));
        moves.push_back(std::move(mv));
    };
    for (std::int64_t e = 0; e < ne && max_edges >= 1; ++e)
        for (int s : {1, -1}) {
            Chain S = zero_chain(g, 1);
            S.add(e, s);
            push(S);
        }
    for (std::int64_t e = 0; e < ne && max_edges >= 2; ++e)
        for (std::int64_t f = e + 1; f < ne; ++f)
            for (int s : {1, -1})
                for (int t : {1, -1}) {
                    Chain S = zero_chain(g, 1);
                    S.add(e, s);
                    S.add(f, t);
                    push(S);
                }
    return moves;
}

} // namespace

WidthResult minmax_width(const WidthQuery& q) {
    const TorusGrid& g = q.grid;
    if (g.n != 2) throw Error(ErrorCode::DimensionMismatch, "widths are implemented for 0-cycles on T^2");
    if (q.xi.size() != 2) throw Error(ErrorCode::DimensionMismatch, "class must have 2 components");
    if (!(q.mass_cap >= 0)) throw Error(ErrorCode::InvalidArgument, "mass cap must be nonnegative");
    WidthResult res;
    res.cap = q.mass_cap;
    for (auto c : q.xi)
        if (std::abs(c) > q.class_clamp) return res;
    const std::int64_t nv = g.num_vertices();
    if (q.xi[0] == 0 && q.xi[1] == 0) {
        res.found = true;
        res.width = 0.0;
        res.sequence = {zero_chain(g, 0)};
        return res;
    }
    const auto moves = enumerate_moves(g, q.delta);
    // State: per-vertex coefficient followed by the accumulated class.
    using Key = std::string;  // signed bytes
    const auto cap_units = static_cast<std::int64_t>(std::floor(q.mass_cap + 1e-9));
    for (std::int64_t level = 2; level <= cap_units; level += 2) {
        Key start(static_cast<std::size_t>(nv + 2), '\0');
        Key goal = start;
        goal[static_cast<std::size_t>(nv)] = static_cast<char>(q.xi[0]);
        goal[static_cast<std::size_t>(nv + 1)] = static_cast<char>(q.xi[1]);
        std::unordered_map<Key, std::pair<Key, int>> parent;
        parent.emplace(start, std::make_pair(Key{}, -1));
        std::queue<std::pair<Key, std::int64_t>> bfs;
        bfs.push({start, 0});
        bool found = false;
        while (!bfs.empty() && !found) {
            auto [state, mass] = bfs.front();
            bfs.pop();
            for (std::size_t mi = 0; mi < moves.size(); ++mi) {
                const Move& mv = moves[mi];
                Key next = state;
                std::int64_t nmass = mass;
                for (const auto& [v, c] : mv.delta) {
                    char& slot = next[static_cast<std::size_t>(v)];
                    const int before = static_cast<signed char>(slot);
                    nmass += std::abs(before + c) - std::abs(before);
                    slot = static_cast<char>(before + c);
                }
                if (nmass > level) continue;
                bool ok = true;
                for (int a = 0; a < 2; ++a) {
                    const int c = static_cast<signed char>(next[static_cast<std::size_t>(nv + a)]) +
                                  static_cast<int>(mv.class_step[static_cast<std::size_t>(a)]);
                    if (std::abs(c) > q.class_clamp) ok = false;
                    next[static_cast<std::size_t>(nv + a)] = static_cast<char>(c);
                }
                if (!ok || parent.count(next)) continue;
                parent.emplace(next, std::make_pair(state, static_cast<int>(mi)));
                if (next == goal) {
                    found = true;
                    break;
                }
                bfs.push({next, nmass});
            }
        }
        res.states += static_cast<std::int64_t>(parent.size());
        if (!found) continue;
        res.found = true;
        res.width = static_cast<double>(level);
        std::vector<Chain> rev;
        for (Key k = goal; !k.empty(); k = parent.at(k).first) {
            Chain c = zero_chain(g, 0);
            for (std::int64_t v = 0; v < nv; ++v) c.add(v, static_cast<signed char>(k[static_cast<std::size_t>(v)]));
            rev.push_back(c);
        }
        res.sequence.assign(rev.rbegin(), rev.rend());
        return res;
    }
    return res;
}

WidthResult minmax_width_real(const WidthQuery& q) {
    // H_1(T^2; Z) is torsion free, so the only integer class with the real class of xi
    // inside the clamp is xi itself; scan the clamp box anyway to keep the definition visible.
    WidthResult best;
    best.cap = q.mass_cap;
    for (int a = -q.class_clamp; a <= q.class_clamp; ++a)
        for (int b = -q.class_clamp; b <= q.class_clamp; ++b) {
            if (a != q.xi[0] || b != q.xi[1]) continue;
            WidthQuery w = q;
            w.xi = {a, b};
            WidthResult r = minmax_width(w);
            if (r.found && (!best.found || r.width < best.width)) best = r;
            best.states += r.states;
        }
    return best;
}

MassBoundReport mass_bound_check(const std::vector<std::pair<double, GridMap>>& family, int k, double tolerance,
                                 const std::function<double(const GridMap&, double)>& energy) {
    MassBoundReport rep;
    const double lam = lambda_const(k);
    for (const auto& [p, u] : family) {
        MassBoundRow row;
        row.p = p;
        row.mass = chain_mass(jacobian_cycle(u));
        if (energy) row.energy = energy(u, p);
        else if (u.target == Target::Circle && u.grid.n == 2) row.energy = cone_completed_energy(u, p);
        else row.energy = p_energy(u, p);
        row.lhs = sphere_volume(k) * row.mass;
        row.rhs = std::pow(lam, static_cast<double>(k) / (k - 1)) * (k - p) * row.energy;
        row.ratio = row.rhs > 0 ? row.lhs / row.rhs : (row.lhs > 0 ? std::numeric_limits<double>::infinity() : 0.0);
        row.satisfied = row.lhs <= row.rhs * (1.0 + tolerance);
        rep.satisfied = rep.satisfied && row.satisfied;
        rep.tightest_ratio = std::max(rep.tightest_ratio, row.ratio);
        rep.rows.push_back(row);
    }
    return rep;
}

} // namespace tbar
