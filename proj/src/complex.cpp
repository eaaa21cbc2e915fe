#include "tbar/complex.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tbar/error.hpp"

namespace tbar {

namespace {

int mod(int a, int m) {
    int r = a % m;
    return r < 0 ? r + m : r;
}

} // namespace

std::int64_t TorusGrid::num_vertices() const {
    std::int64_t v = 1;
    for (int i = 0; i < n; ++i) v *= m;
    return v;
}

std::int64_t TorusGrid::vertex_index(const Index& b) const {
    std::int64_t idx = 0;
    for (int i = n - 1; i >= 0; --i) idx = idx * m + mod(b[i], m);
    return idx;
}

Index TorusGrid::vertex_base(std::int64_t idx) const {
    Index b{0, 0, 0};
    for (int i = 0; i < n; ++i) {
        b[i] = static_cast<int>(idx % m);
        idx /= m;
    }
    return b;
}

Index TorusGrid::wrap(Index b) const {
    for (int i = 0; i < n; ++i) b[i] = mod(b[i], m);
    return b;
}

Point TorusGrid::vertex_position(const Index& b) const {
    Point p{0.0, 0.0, 0.0};
    for (int i = 0; i < n; ++i) p[i] = mod(b[i], m) * h() + offset[i];
    return p;
}

TorusGrid TorusGrid::refined(int factor) const {
    TorusGrid g = *this;
    g.m = m * factor;
    // The offset may exceed the finer side length; keep it in [0, 1/m_fine).
    for (int i = 0; i < n; ++i) g.offset[i] = std::fmod(offset[i], g.h());
    return g;
}

double TorusGrid::cell_volume() const { return std::pow(h(), n); }

TorusGrid make_grid(int n, int m, Point offset) {
    if (n != 2 && n != 3) throw Error(ErrorCode::InvalidArgument, "dimension must be 2 or 3, got " + std::to_string(n));
    if (m < 3) throw Error(ErrorCode::InvalidArgument, "cells per side must be >= 3, got " + std::to_string(m));
    TorusGrid g{n, m, {0.0, 0.0, 0.0}};
    for (int i = 0; i < n; ++i) {
        if (!(offset[i] >= 0.0 && offset[i] < g.h()))
            throw Error(ErrorCode::InvalidArgument, "offset component outside [0,1/m)");
        g.offset[i] = offset[i];
    }
    return g;
}

TorusGrid dual_grid(const TorusGrid& g) {
    TorusGrid d = g;
    for (int i = 0; i < g.n; ++i) {
        double o = g.offset[i] + 0.5 * g.h();
        if (o >= g.h()) o -= g.h();
        d.offset[i] = o;
    }
    return d;
}

std::vector<int> axes_list(unsigned axes) {
    std::vector<int> out;
    for (int a = 0; a < 3; ++a)
        if (axes & (1u << a)) out.push_back(a);
    return out;
}

int popcount(unsigned axes) {
    int c = 0;
    for (int a = 0; a < 3; ++a) c += (axes >> a) & 1u;
    return c;
}

int shuffle_sign(unsigned first, unsigned second) {
    // Count inversions: pairs (a in first, c in second) with a > c.
    int inv = 0;
    for (int a : axes_list(first))
        for (int c : axes_list(second))
            if (a > c) ++inv;
    return (inv % 2 == 0) ? 1 : -1;
}

CubicalComplex::CubicalComplex(TorusGrid grid) : grid_(grid) {
    rank_of_.fill(-1);
    for (unsigned mask = 0; mask < (1u << grid_.n); ++mask) {
        int d = popcount(mask);
        rank_of_[mask] = static_cast<int>(axis_sets_[d].size());
        axis_sets_[d].push_back(mask);
    }
}

std::int64_t CubicalComplex::num_cells(int dim) const {
    if (dim < 0 || dim > grid_.n) return 0;
    return static_cast<std::int64_t>(axis_sets_[dim].size()) * grid_.num_vertices();
}

int CubicalComplex::axis_rank(unsigned axes) const { return rank_of_[axes]; }

std::int64_t CubicalComplex::cell_index(const Cell& c) const {
    return static_cast<std::int64_t>(rank_of_[c.axes]) * grid_.num_vertices() + grid_.vertex_index(c.base);
}

Cell CubicalComplex::cell(int dim, std::int64_t idx) const {
    const std::int64_t nv = grid_.num_vertices();
    Cell c;
    c.dim = dim;
    c.axes = axis_sets_[dim][static_cast<std::size_t>(idx / nv)];
    c.base = grid_.vertex_base(idx % nv);
    return c;
}

std::vector<Incidence> CubicalComplex::boundary(const Cell& c) const {
    std::vector<Incidence> out;
    if (c.dim == 0) return out;
    const auto axes = axes_list(c.axes);
    for (std::size_t i = 0; i < axes.size(); ++i) {
        const int a = axes[i];
        const int sign = (i % 2 == 0) ? 1 : -1;
        Cell face;
        face.dim = c.dim - 1;
        face.axes = c.axes & ~(1u << a);
        face.base = c.base;
        const std::int64_t lower = cell_index(face);
        face.base[a] += 1;
        face.base = grid_.wrap(face.base);
        const std::int64_t upper = cell_index(face);
        out.push_back({upper, sign * c.orientation});
        out.push_back({lower, -sign * c.orientation});
    }
    return out;
}

std::vector<Incidence> CubicalComplex::coboundary(const Cell& c) const {
    std::vector<Incidence> out;
    for (int a = 0; a < grid_.n; ++a) {
        if (c.axes & (1u << a)) continue;
        const unsigned big = c.axes | (1u << a);
        // Position of a within the sorted axes of the coface.
        int pos = 0;
        for (int b = 0; b < a; ++b)
            if (big & (1u << b)) ++pos;
        const int sign = (pos % 2 == 0) ? 1 : -1;
        Cell co;
        co.dim = c.dim + 1;
        co.axes = big;
        co.base = c.base;
        out.push_back({cell_index(co), -sign * c.orientation});
        co.base[a] -= 1;
        co.base = grid_.wrap(co.base);
        out.push_back({cell_index(co), sign * c.orientation});
    }
    return out;
}

Point CubicalComplex::center(const Cell& c) const {
    Point p = grid_.vertex_position(c.base);
    for (int a : axes_list(c.axes)) p[a] += 0.5 * grid_.h();
    for (int i = 0; i < grid_.n; ++i) p[i] = std::fmod(p[i], 1.0);
    return p;
}

CubicalComplex build_torus_complex(int n, int m, Point offset) {
    return CubicalComplex(make_grid(n, m, offset));
}

DualCell dual_cell(const CubicalComplex& complex, const Cell& sigma) {
    const TorusGrid& g = complex.grid();
    const int n = g.n;
    if (sigma.dim < 0 || sigma.dim > n || popcount(sigma.axes) != sigma.dim || (sigma.axes >> n) != 0)
        throw Error(ErrorCode::DimensionMismatch, "cell dimension does not match its axes or the complex");
    DualCell out;
    out.grid = dual_grid(g);
    const unsigned full = (1u << n) - 1u;
    const unsigned comp = full & ~sigma.axes;
    out.cell.dim = n - sigma.dim;
    out.cell.axes = comp;
    out.center = complex.center(sigma);
    out.measure = std::pow(g.h(), n - sigma.dim);
    out.orientation = shuffle_sign(sigma.axes, comp) * sigma.orientation;
    out.cell.orientation = out.orientation;
    // The dual cell runs from center - h/2 to center + h/2 along the complementary axes.
    // Dual vertex w sits at (w + 1/2) h + offset, shifted into the normalized dual grid.
    Index w = sigma.base;
    for (int c : axes_list(comp)) w[c] -= 1;
    for (int i = 0; i < n; ++i)
        if (g.offset[i] + 0.5 * g.h() >= g.h()) w[i] += 1;
    out.cell.base = g.wrap(w);
    return out;
}

PhiResult phi_retraction(int j, double s, double delta, const std::array<double, 3>& x) {
    if (j < 1 || j > 3) throw Error(ErrorCode::InvalidArgument, "phi_retraction: j must be in [1,3]");
    if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "phi_retraction: delta must be positive");
    if (!(s >= 0.0 && s <= delta)) throw Error(ErrorCode::InvalidArgument, "phi_retraction: s outside [0, delta]");
    double r = 0.0;
    for (int i = 0; i < j; ++i) r = std::max(r, std::abs(x[i]));
    PhiResult out;
    const double denom = std::max(s, r);
    if (denom < kSingularTol * delta) {
        out.singular = true;
        return out;
    }
    for (int i = 0; i < j; ++i) out.y[i] = delta * x[i] / denom;
    return out;
}

void locate(const TorusGrid& grid, const Point& x, Index& base, std::array<double, 3>& local) {
    base = {0, 0, 0};
    local = {0.0, 0.0, 0.0};
    for (int i = 0; i < grid.n; ++i) {
        double t = (x[i] - grid.offset[i]) * grid.m;
        double f = std::floor(t);
        double frac = t - f;
        if (frac >= 1.0) {
            frac = 0.0;
            f += 1.0;
        }
        const long long fi = static_cast<long long>(f) % grid.m;
        base[i] = static_cast<int>(fi < 0 ? fi + grid.m : fi);
        local[i] = frac;
    }
}

SkeletonPoint Phi_retraction(const TorusGrid& grid, int j, const Point& x) {
    const int n = grid.n;
    if (j < 1 || j > n) throw Error(ErrorCode::InvalidArgument, "Phi_retraction: j must be in [1,n]");
    SkeletonPoint out;
    Index b;
    std::array<double, 3> y;
    locate(grid, x, b, y);
    unsigned free_axes = (1u << n) - 1u;
    // Snap coordinates already on a grid line so that skeleton points are fixed exactly.
    const double snap = 1e-13;
    for (int i = 0; i < n; ++i) {
        if (y[i] < snap) y[i] = 0.0;
        if (y[i] > 1.0 - snap) y[i] = 1.0;
    }
    for (int d = n; d >= j; --d) {
        double r = 0.0;
        int arg = -1;
        for (int i = 0; i < n; ++i) {
            if (!(free_axes & (1u << i))) continue;
            const double dev = std::abs(y[i] - 0.5);
            if (dev > r) {
                r = dev;
                arg = i;
            }
        }
        if (arg < 0 || r < kSingularTol * 0.5) {
            out.singular = true;
            return out;
        }
        const double scale = 0.5 / r;
        for (int i = 0; i < n; ++i)
            if (free_axes & (1u << i)) y[i] = 0.5 + (y[i] - 0.5) * scale;
        // The argmax axis lands exactly on a grid line; move it into the base index.
        if (y[arg] > 0.5) {
            b[arg] = (b[arg] + 1) % grid.m;
        }
        y[arg] = 0.0;
        free_axes &= ~(1u << arg);
        for (int i = 0; i < n; ++i) {
            if (!(free_axes & (1u << i))) continue;
            if (y[i] < snap) y[i] = 0.0;
            if (y[i] > 1.0 - snap) y[i] = 1.0;
        }
    }
    out.base = b;
    out.free_axes = free_axes;
    out.local = y;
    for (int i = 0; i < n; ++i) {
        double p = (b[i] + y[i]) * grid.h() + grid.offset[i];
        p = std::fmod(p, 1.0);
        if (p < 0) p += 1.0;
        out.point[i] = p;
    }
    return out;
}

SkeletonPoint Phi_retraction(const CubicalComplex& complex, int j, const Point& x) {
    return Phi_retraction(complex.grid(), j, x);
}

} // namespace tbar
