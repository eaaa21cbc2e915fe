#ifndef TBAR_PATHS_HPP
#define TBAR_PATHS_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "tbar/maps.hpp"

namespace tbar {

enum class Stage { Endpoint, RadialU, SkeletonHomotopy, CellSwap, RadialV };

const char* stage_name(Stage s);

/// Angle trace along a primal edge: start + delta * t for t in [0, 1] (lifted).
struct EdgeTrace {
    double start = 0.0;
    double delta = 0.0;
};

/// Exact description of one map along the construction.
/// RadialU/RadialV: w o phi_{2,s} in every square, s in [0,1] (1 = identity).
/// SkeletonHomotopy: every square is the cone over the edge traces.
/// CellSwap: cones everywhere except the star V of `swap_edge`, where the V-map
/// (cones over `traces`, or over the swapped traces when `use_new`) is shrunk by
/// `lambda` about the edge midpoint and completed by the cone over the boundary of V.
struct PathModel {
    Stage stage = Stage::Endpoint;
    int segment = 0;
    double s = 1.0;
    std::vector<EdgeTrace> traces;
    std::int64_t swap_edge = -1;
    EdgeTrace new_trace;
    double lambda = 1.0;
    bool use_new = false;
    bool from_v = false;  ///< radial stages: which endpoint map
};

/// Hang-Lin path between two circle maps on T^2 (k = 2): radial retraction of u,
/// lifted skeleton homotopy to u_2 (equal to v on vertices), swaps of the edges whose
/// traces still differ from v by full turns, then the reversed retraction of v.
class HangLinConstruction {
public:
    HangLinConstruction(GridMap u, GridMap v);

    const GridMap& u() const { return u_; }
    const GridMap& v() const { return v_; }
    /// u and v have bitwise-equal value arrays; the path collapses to its endpoints.
    bool collapsed() const { return collapsed_; }
    int num_segments() const;
    const std::vector<std::int64_t>& swap_edges() const { return swaps_; }
    /// Global parameter t in [0,1], segments of equal length.
    PathModel state_at(double t) const;
    /// Exact p-energy of the model map.
    double energy(const PathModel& m, double p) const;
    /// Value (angle) of the model map at a point of the torus.
    double evaluate(const PathModel& m, const Point& x) const;
    /// Samples on the refined grid (refine should be odd so no sample hits a square center).
    GridMap sample(const PathModel& m, int refine) const;
    /// Star neighborhood of an edge: the two squares sharing it, by base vertex.
    std::array<Index, 2> star_squares(std::int64_t edge) const;
    /// Whether x lies in the closed star neighborhood of the edge.
    bool in_star(std::int64_t edge, const Point& x) const;

private:
    std::vector<EdgeTrace> traces_of(const GridMap& w) const;
    std::vector<EdgeTrace> homotopy_traces(double t) const;
    std::vector<EdgeTrace> traces_after_swaps(int count) const;
    EdgeTrace swapped_trace(const std::vector<EdgeTrace>& tr, std::int64_t e) const;
    double cone_square_energy(const std::vector<EdgeTrace>& tr, const Index& b, double cone, double p,
                              const EdgeTrace* override_trace, std::int64_t override_edge) const;
    double trace_value(const std::vector<EdgeTrace>& tr, const Index& b, const std::array<double, 2>& z,
                       const EdgeTrace* override_trace, std::int64_t override_edge) const;
    double cone_value(const std::vector<EdgeTrace>& tr, const Point& x, const EdgeTrace* override_trace,
                      std::int64_t override_edge) const;
    std::int64_t edge_index(Index b, int axis) const;

    GridMap u_, v_;
    bool collapsed_ = false;
    std::vector<double> phi_;               ///< lifted vertex difference along the spanning tree
    std::vector<EdgeTrace> traces_u_, traces_v_;
    std::vector<std::int64_t> swaps_;       ///< edges swapped, in processing order
};

struct PathSample {
    double t = 0.0;
    Stage stage = Stage::Endpoint;
    PathModel model;
    GridMap map;
};

struct MapPath {
    std::shared_ptr<const HangLinConstruction> construction;
    std::vector<PathSample> samples;
    int refine = 5;
};

/// Builds the Hang-Lin path; k must be 2 and u, v circle maps on the same T^2 grid.
/// The first and last samples hold u and v themselves (coarse grid); the interior
/// samples are refined samplings. Throws HomotopyObstruction if vertex lifting fails.
MapPath hang_lin_path(const GridMap& u, const GridMap& v, int k, int samples_per_stage, int refine = 5);

struct EnergyProfile {
    std::vector<double> energies;  ///< energies of the sampled grids (cone-completed on T^2)
    double sup = 0.0;
    std::vector<double> exact;     ///< continuum energies of the sample models
    double exact_sup = 0.0;
};

/// Energy along the path. Interior samples are measured on their refined sampling
/// grids, with vortex plaquettes (the cone apexes) filled by cones; the endpoints on
/// their own grids. The exact energies of the piecewise-cone models are reported too.
EnergyProfile profile_energy(const MapPath& path, double p);

/// L^p distance between two maps on possibly different (nested) grids; the coarser
/// one is prolonged to the finer grid first.
double path_lp_distance(const GridMap& a, const GridMap& b, double p);

struct ScalingFit {
    double C = 0.0;
    double beta = 0.0;
};

/// Least-squares fit of log(sup) = log C + beta log(1/(k-p)).
ScalingFit fit_scaling(const std::vector<double>& ps, const std::vector<double>& sups, int k);

enum class BarrierKind { HangLinUpper, SequenceDelta };

struct BarrierEstimate {
    double p = 0.0;
    double gamma_hat = 0.0;
    BarrierKind kind = BarrierKind::SequenceDelta;
    double delta = 0.0;
    int length = 0;            ///< sequence length
    double max_step = 0.0;     ///< largest consecutive L^p distance
    int argmax = 0;            ///< index of the most energetic member
    std::vector<GridMap> sequence;
    std::vector<double> energies;
};

struct BarrierOptions {
    int refine = 5;
    int max_depth = 40;
    double relax_step = 1e-2;  ///< largest angle change per relaxation step, radians
};

/// Upper estimate of gamma_p^delta(u,v): bisect the Hang-Lin path until consecutive
/// maps are within delta in L^p, optionally relax interior members by projected
/// gradient descent on the energy while keeping the chain delta-fine, and return the
/// largest energy along the sequence.
BarrierEstimate sequence_barrier(const GridMap& u, const GridMap& v, double p, double delta, int relax_iters,
                                 const BarrierOptions& opts = {});

/// Energy used for sampled members of sequences: cone-completed on T^2 circle maps.
double sequence_energy(const GridMap& w, double p);

} // namespace tbar

#endif
