#ifndef TBAR_DEGREES_HPP
#define TBAR_DEGREES_HPP

#include <vector>

#include "tbar/complex.hpp"
#include "tbar/maps.hpp"

namespace tbar {

/// Degree of u on the boundary of the k-cell sigma. Circle maps: sigma is a 2-cell
/// and the degree is the sum of wrapped edge differences over 2pi. Sphere maps:
/// sigma is a 3-cell and the degree is the total signed solid angle of the image
/// of the outward-oriented, 2-triangles-per-face boundary over 4pi.
/// Throws NonInteger on a half-turn edge or a degenerate image triangle.
int boundary_degree(const GridMap& u, const Cell& sigma);

/// Degrees of every k-cell (k = 2 for circle maps, 3 for sphere maps), indexed by
/// cell index of the complex on u.grid.
std::vector<int> cell_degrees(const GridMap& u);

/// Winding number of u around the (n=2) plaquette with base vertex b.
int plaquette_winding(const GridMap& u, const Index& b);

/// Winding of u around a polygon of points (interpolated values), closed automatically.
int loop_winding(const GridMap& u, const std::vector<Point>& loop);

/// p-energy of the W^{1,p} completion of a circle map on T^2: plaquettes with zero
/// winding use the forward stencil, plaquettes carrying a vortex are filled with the
/// cone over their boundary trace (energy (h/2)^2 (|dtheta_e|/h)^p I(p) / (2-p) per edge).
/// Requires p < 2.
double cone_completed_energy(const GridMap& u, double p);
/// Same, restricted to plaquettes selected by `keep` (called with the base vertex index).
double cone_completed_energy_cells(const GridMap& u, double p, const std::function<bool(std::int64_t)>& keep);

/// lambda(k) = (k-1)^{(1-k)/2}.
double lambda_const(int k);
/// Volume of the unit (k-1)-sphere: 2pi for k = 2, 4pi for k = 3.
double sphere_volume(int k);

struct DegreeConstants {
    int k = 2;
    double lambda = 1.0;
    double sigma_km1 = 0.0;
    double c_p = 0.0;
};

/// Constants at exponent p; c_p = sigma_{k-1} / lambda^{p/(k-1)}.
DegreeConstants degree_constants(int k, double p);

/// F_p(s) = c_p/(k-p) s^{k-p}; requires p in (k-1, k).
double F_p_eval(double s, int k, double p);

struct DegreeBoundReport {
    int d = 0;
    double energy = 0.0;
    double bound = 0.0;
    bool satisfied = true;
    double slack = 0.0;           ///< energy / bound when bound > 0
    double implied_constant = 0.0;  ///< cube variant: smallest C(k) making the inequality hold
};

/// Annulus variant on T^2: d is the total winding of the plaquettes with center
/// inside radius r1 of c; the energy sums cells whose centers lie in [r1, r2];
/// bound = d [F_p(r2/d) - F_p(r1/d)].
DegreeBoundReport verify_annulus_bound(const GridMap& u, double cx, double cy, double r1, double r2, double p);

/// Square variant on T^2: I is the block of cells x cells grid squares with base
/// vertex lo, r the margin. The inequality
///   sigma_1 d^{1+p-k} <= lambda^{p/(k-1)} (r/2)^{p-k} (k-p) [E_p(u,I) + C r E_p(u,dI)]
/// is checked with C = 1. `energy` holds E_p(u,I) + r E_p(u,dI), `bound` the value the
/// bracket must reach, and `implied_constant` the smallest C for which it does.
DegreeBoundReport verify_cube_bound(const GridMap& u, const Index& lo, int cells, double r, double p);

} // namespace tbar

#endif
