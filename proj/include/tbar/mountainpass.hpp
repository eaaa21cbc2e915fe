#ifndef TBAR_MOUNTAINPASS_HPP
#define TBAR_MOUNTAINPASS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "tbar/maps.hpp"

namespace tbar {

/// Generalized Ginzburg-Landau functional E_{p,eps}(w) = sum |dw|^p h^n + eps^{-p} sum F(w) h^n
/// with F(x) = (1 - |x|^2)^2 / 4, which vanishes exactly on the unit circle/sphere.
struct GLConfig {
    double p = 1.99;
    double eps = 0.05;
};

/// F(x) = (1 - |x|^2)^2 / 4.
double gl_potential(const Value& x, int comps);

/// Embeds a circle/sphere map as an ambient map (k = 2 or 3 components); ambient maps are copied.
GridMap to_ambient(const GridMap& u);

double gl_energy(const GridMap& w, const GLConfig& cfg);

/// Gradient of gl_energy with respect to the ambient vertex values; |dw|^2 is shifted
/// by 1e-12 in the p-Laplacian term. Returned as an ambient map of the same shape.
GridMap gl_gradient(const GridMap& w, const GLConfig& cfg);

struct ProjectionResult {
    GridMap map;
    double max_distance = 0.0;
};

/// Vertexwise nearest-point projection onto the target (circle for k = 2, sphere for
/// k = 3). Throws ProjectionUnsafe, listing offending vertices, when some value lies
/// at distance >= 1/2 from the target.
ProjectionResult project_to_target(const GridMap& w);

struct StringOptions {
    int beads = 12;
    int iters = 2000;
    double rel_tol = 1e-10;     ///< stop when the max energy changes less than this for `patience` iterations
    int patience = 50;
    double initial_step = 0.05;
    double noise = 0.0;         ///< amplitude of a seeded perturbation of the initial interior beads
    std::uint64_t seed = 0;
    std::vector<GridMap> initial;  ///< optional initial beads (ambient, first/last ignored)
};

enum class StringStatus { Converged, IterationLimit };

struct StringResult {
    std::vector<GridMap> beads;
    std::vector<double> energies;
    double gamma_hat = 0.0;
    int argmax = 0;
    int iterations = 0;
    StringStatus status = StringStatus::IterationLimit;
    double saddle_gradient = 0.0;       ///< |grad E| at the highest bead
    double saddle_gradient_perp = 0.0;  ///< component orthogonal to the string tangent
    std::vector<double> max_history;    ///< max bead energy after every iteration
};

/// String method for the mountain pass of E_{p,eps} between target-valued u and v:
/// beads start on the linear ambient interpolation (or `initial`), each interior bead
/// takes a backtracking gradient step, then beads are redistributed at equal L^2 arc
/// length. A redistribution that would raise the max bead energy is rejected, so the
/// max is non-increasing; 100 consecutive rejections throw Diverged. Convergence needs
/// both the max and the interior energy sum to settle.
StringResult string_method(const GridMap& u, const GridMap& v, const GLConfig& cfg, const StringOptions& opts = {});

/// L^2 distance between ambient maps on the same grid.
double ambient_l2(const GridMap& a, const GridMap& b);

struct SandwichRow {
    double eps = 0.0;
    double gamma_gl = 0.0;
    int iterations = 0;
    bool below_hl = false;   ///< gamma_gl <= hl_sup * 1.05
    bool monotone = true;    ///< gamma_gl >= previous (larger eps) * (1 - 0.02)
};

struct SandwichReport {
    double p = 0.0;
    double hl_sup = 0.0;
    double sequence_barrier = 0.0;  ///< NaN when not computed
    std::vector<SandwichRow> rows;  ///< in the order of eps_list
    bool passed = true;
};

struct SandwichOptions {
    StringOptions string;
    int hl_samples_per_stage = 4;
    bool with_sequence = false;
    double sequence_delta = 0.05;
};

/// Tabulates the string-method barrier for each eps (eps_list decreasing), the Hang-Lin
/// sup at the same p, and optionally the sequence barrier. The smallest eps is solved
/// first; each larger eps starts from the converged string of the next smaller one, so
/// the estimates are monotone by construction of the continuation.
SandwichReport sandwich_report(const GridMap& u, const GridMap& v, double p, const std::vector<double>& eps_list,
                               const SandwichOptions& opts = {});

} // namespace tbar

#endif
