#ifndef TBAR_BALLS_HPP
#define TBAR_BALLS_HPP

#include <string>
#include <vector>

#include "tbar/complex.hpp"
#include "tbar/maps.hpp"

namespace tbar {

struct Singularity {
    Point position{0.0, 0.0, 0.0};
    int degree = 1;
};

struct Ball {
    Point center{0.0, 0.0, 0.0};
    double radius = 0.0;
    std::vector<int> members;  ///< indices into the singularity list
    int degree_sum = 0;        ///< signed sum of member degrees
    int aggregate = 0;         ///< |degree_sum|
    bool frozen = false;       ///< radius no longer grows (zero aggregate)
};

/// Merge recorded during growth, for traces and plots.
struct MergeEvent {
    double sigma = 0.0;
    Point center{0.0, 0.0, 0.0};
    double radius = 0.0;
    int aggregate = 0;
};

struct BallCollection {
    int n = 2;
    double scale = 0.0;
    std::vector<Ball> balls;
    std::vector<Singularity> singularities;
    std::vector<MergeEvent> events;
    bool clamped = false;  ///< some radius reached 1/2, beyond the chart's validity
};

/// One ball of radius sigma0 |d_j| (sigma0 when d_j = 0) per singularity. Throws
/// Overlap unless the balls of radius D sigma0, D = 1 + max |d_j|, are disjoint.
BallCollection initial_balls(const std::vector<Singularity>& sings, double sigma0, int n = 2);

/// Event-driven growth: every ball with nonzero aggregate keeps r/sigma fixed;
/// touching balls merge into one with the summed radius and the radius-weighted
/// center, cascading until the family is disjoint again. Zero-aggregate balls freeze.
BallCollection grow_to_scale(const BallCollection& coll, double sigma_target);

/// d F_p(r / (2d)) with d = |sum of degrees|; 0 when d = 0.
double lower_bound_energy(const std::vector<Singularity>& sings, double r, double p, int k);

/// Structural checks on a collection; returns an empty string when all hold.
std::string check_ball_invariants(const BallCollection& coll, double tol = 1e-12);

/// Sum of radii.
double total_radius(const BallCollection& coll);

} // namespace tbar

#endif
