#ifndef TBAR_FIXTURES_HPP
#define TBAR_FIXTURES_HPP

#include <cstdint>
#include <vector>

#include "tbar/maps.hpp"

namespace tbar {

/// Point singularity of a circle-valued map on T^2 with an integer degree.
struct Vortex {
    double x = 0.0;
    double y = 0.0;
    int degree = 1;
};

/// Periodic S^1-valued map on T^2 (or T^3, constant along z) with prescribed
/// vortices plus the linear phase 2pi(q1 x + q2 y). Uses the Jacobi theta
/// function theta_1 with tau = i, whose zeros form the unit lattice, and removes
/// the quasi-periodicity factor so that the map is periodic. Degrees must sum to 0.
GridMap vortex_map(const TorusGrid& g, const std::vector<Vortex>& vortices, int q1 = 0, int q2 = 0);

/// Angle of vortex_map at a point, before wrapping.
double vortex_phase(const Point& x, const std::vector<Vortex>& vortices, int q1, int q2);

/// u = 2pi(q1 x + q2 y [+ q3 z]).
GridMap linear_phase_map(const TorusGrid& g, int q1, int q2, int q3 = 0);

/// u(z) = d * arg(z - c), not periodic; for annulus checks away from the cut.
GridMap radial_vortex_map(const TorusGrid& g, double cx, double cy, int d = 1);

/// Independent uniform angles per vertex.
GridMap random_circle_map(const TorusGrid& g, std::uint64_t seed);

/// Smooth random phase: sum of a few low Fourier modes with random amplitudes,
/// added to an existing circle map.
GridMap perturb_circle_map(const GridMap& u, double amplitude, std::uint64_t seed);

/// Sphere-valued map on T^3: the normalized field (sin 2pi(x_i - c_i))_i. Its eight
/// zeros c + {0, 1/2}^3 carry index (-1)^(number of coordinates shifted by 1/2);
/// none may lie on a grid vertex.
GridMap sine_sphere_map(const TorusGrid& g, const Point& c);

/// Plaquette center nearest to (x, y) on the grid: a good vortex placement that
/// avoids vertices and edges.
Point plaquette_center(const TorusGrid& g, double x, double y);

} // namespace tbar

#endif
