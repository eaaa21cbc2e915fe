#ifndef TBAR_MAPS_HPP
#define TBAR_MAPS_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tbar/complex.hpp"

namespace tbar {

enum class Target { Circle, Sphere, Ambient };

const char* target_name(Target t);
Target parse_target(const std::string& s);

using Value = std::array<double, 3>;

/// Discrete map from grid vertices into S^1 (angles), S^2 (unit vectors) or the
/// ambient space R^k of the target. `k` is 2 for circle-valued data and 3 for
/// sphere-valued data; ambient maps carry k components.
struct GridMap {
    TorusGrid grid;
    Target target = Target::Circle;
    int k = 2;
    std::vector<double> values;

    int comps() const { return target == Target::Circle ? 1 : k; }
    std::int64_t size() const { return grid.num_vertices(); }
    Value value(std::int64_t v) const;
    void set_value(std::int64_t v, const Value& x);
    double angle(std::int64_t v) const { return values[static_cast<std::size_t>(v)]; }
};

GridMap make_circle_map(const TorusGrid& g, const std::function<double(const Point&)>& angle);
GridMap make_sphere_map(const TorusGrid& g, const std::function<Value(const Point&)>& vec);
GridMap make_ambient_map(const TorusGrid& g, int k, const std::function<Value(const Point&)>& vec);
GridMap constant_circle_map(const TorusGrid& g, double angle);

/// Reduce an angle to [0, 2pi).
double wrap_angle(double a);
/// Reduce an angle difference to (-pi, pi].
double wrap_diff(double d);

/// Geodesic distance on the target (Euclidean for ambient maps).
double target_distance(const GridMap& u, const Value& a, const Value& b);
double vertex_distance(const GridMap& u, std::int64_t a, const GridMap& v, std::int64_t b);

/// Checks value invariants; throws on violation.
void validate(const GridMap& u, double sphere_tol = 1e-12);

/// Interpolated value at an arbitrary point: multilinear on angles lifted relative
/// to the base corner (circle), normalized multilinear (sphere), multilinear (ambient).
Value interpolate(const GridMap& u, const Point& x);
Value interpolate_local(const GridMap& u, const Index& base, const std::array<double, 3>& local);

/// Per-n-cell forward-stencil density (sum_i |d_i u|^2)^{p/2} with |d_i u| = d_N(u_b, u_{b+e_i}) / h.
std::vector<double> cell_energy_density(const GridMap& u, double p);

/// E_p(u) = sum over n-cells of the forward-stencil density times h^n.
double p_energy(const GridMap& u, double p);
/// E_p restricted to cells selected by `keep` (called with the cell index).
double p_energy_cells(const GridMap& u, double p, const std::function<bool(std::int64_t)>& keep);
/// E_p excluding n-cells that touch a masked vertex.
double p_energy_masked(const GridMap& u, double p, const std::vector<std::uint8_t>& mask);

double lp_distance(const GridMap& u, const GridMap& v, double p);
/// L^p distance over vertices not flagged in `mask` (mask may be empty).
double lp_distance_masked(const GridMap& u, const GridMap& v, double p, const std::vector<std::uint8_t>& mask);
/// Resample `coarse` onto the grid of `fine` (same torus, integer refinement) by interpolation.
GridMap prolong(const GridMap& coarse, const TorusGrid& fine);

/// Tangential p-energy on the j-cells with axis set `axes` of the translated grid.
double skeleton_family_energy(const GridMap& u, unsigned axes, const Point& offset, double p);
/// Tangential p-energy on the whole j-skeleton of the translated grid, weight h^j per j-cell.
double skeleton_energy(const GridMap& u, int j, const Point& offset, double p);

struct OffsetCertificate {
    Point offset{0.0, 0.0, 0.0};
    std::vector<double> coarse_ratios;  ///< per j: skeleton_energy_j / (h^{j-n} E_p)
    std::vector<double> coarse_bounds;  ///< per j: C(n,j)/eta
    unsigned sharp_axes = 0;            ///< distinguished k-plane family
    double sharp_ratio = 0.0;           ///< family energy / (h^{k-n} E_p)
    bool satisfied = false;
    int trial = -1;
};

/// Sampled Fubini search for a grid translation with bounded skeleton energies.
/// The distinguished family spans the last min(k,n) axes.
OffsetCertificate select_offset(const GridMap& u, double p, double eta, int trials, std::uint64_t seed = 0);

/// u composed with Phi_k, sampled on the refined grid; `mask` flags SINGULAR vertices.
struct RetractedMap {
    GridMap map;
    std::vector<std::uint8_t> mask;
    int k = 2;
};

RetractedMap retract_to_skeleton(const GridMap& u, int k, int refine);

/// Energy of the refined sample excluding cells that touch a singular vertex.
double retracted_masked_energy(const RetractedMap& r, double p);

/// Exact p-energy of u o Phi_n (the cone extension of the skeleton trace into every
/// top cell). Circle maps on T^2 use the closed form per edge; other cases integrate
/// one dyadic shell by sampling and sum the self-similar series.
double retracted_cone_energy(const GridMap& u, double p, int shell_samples = 48);

/// I(p) = integral over [-1,1] of (1 + t^2)^{p/2} dt.
double cone_profile_integral(double p);

/// Energy of the cone over one segment [P0,P1] from apex O, truncated to radial
/// fraction [rho0, 1], for a trace with constant speed |dtheta|/|P1-P0|.
double cone_segment_energy(const std::array<double, 2>& apex, const std::array<double, 2>& p0,
                           const std::array<double, 2>& p1, double dtheta, double p, double rho0 = 0.0);

} // namespace tbar

#endif
