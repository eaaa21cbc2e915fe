#ifndef TBAR_CYCLES_HPP
#define TBAR_CYCLES_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <vector>

#include "tbar/complex.hpp"
#include "tbar/maps.hpp"

namespace tbar {

/// Integer chain of cells of one dimension on a torus grid; zero coefficients are never stored.
struct Chain {
    TorusGrid grid;
    int dim = 0;
    std::map<std::int64_t, std::int64_t> coeffs;

    void add(std::int64_t cell, std::int64_t c);
    std::int64_t coef(std::int64_t cell) const;
    bool empty() const { return coeffs.empty(); }
    bool operator==(const Chain& o) const { return grid == o.grid && dim == o.dim && coeffs == o.coeffs; }
};

Chain zero_chain(const TorusGrid& g, int dim);
Chain operator+(const Chain& a, const Chain& b);
Chain operator-(const Chain& a, const Chain& b);
Chain operator*(std::int64_t s, const Chain& a);

/// Signed facet sum. Rejects 0-chains.
Chain chain_boundary(const Chain& c);
/// Sum of |coefficients| times h^dim.
double chain_mass(const Chain& c);
/// Sum of |coefficients|.
std::int64_t coefficient_l1(const Chain& c);
/// Sum of coefficients of a 0-chain.
std::int64_t augmentation(const Chain& c);

/// Homology class of a cycle: for each axis set A of size dim (increasing bitmask
/// order), the signed count of cells spanning A with base coordinate 0 along every axis
/// of A, i.e. the intersection number with the complementary coordinate subtorus.
/// Dimension 0 returns the augmentation. Throws NonzeroBoundary for non-cycles.
std::vector<std::int64_t> homology_class(const Chain& c);

/// T_alpha(u) = sum over k-cells sigma of deg(u, d sigma) [P(sigma)], an (n-k)-chain
/// on the dual grid; dual-cell orientations absorb the sign convention.
Chain jacobian_cycle(const GridMap& u);

/// Dual (n-1)-chain of branch-cut crossings of a circle map: each primal edge whose
/// raw angle difference disagrees with the wrapped one contributes its dual cell with
/// the crossing count. Its boundary equals jacobian_cycle(u).
Chain branch_cut_chain(const GridMap& u);

/// Homology class of branch_cut_chain(u) for a vortex-free circle map. For u = 2pi(q1 x + q2 y)
/// on T^2 it is (-q2, q1) up to the orientation convention; u = 2pi x gives (0, 1).
std::vector<std::int64_t> dual_current_class(const GridMap& u);

enum class FlatMethod { ExactFlow, Exhaustive };

struct FlatNormResult {
    double value = 0.0;
    Chain witness_S;        ///< (dim+1)-chain
    Chain witness_T_prime;  ///< dim-chain with T = T' + dS
    std::int64_t states = 0;  ///< search states visited (exhaustive)
};

struct ExhaustiveOptions {
    int max_cells = 300;       ///< cap on the number of (dim+1)-cells
    int coefficient_bound = 4; ///< |S coefficient| bound
    int beam_width = 4000;     ///< beam used to seed the upper bound
};

/// Flat norm min over integer S of M(T - dS) + M(S).
/// ExactFlow: 0-chains with zero augmentation, min-cost transport with disposal.
/// Exhaustive: frontier dynamic program over all bounded-coefficient S with exact
/// branch-and-bound pruning; throws SizeCap beyond `max_cells`.
FlatNormResult flat_norm(const Chain& T, FlatMethod method, const ExhaustiveOptions& opts = {});

/// Minimal-mass 1-chain S with dS = T for a balanced 0-chain (transport without disposal).
Chain min_filling(const Chain& T);

struct AlmgrenOptions {
    double eps0 = 0.5;  ///< isoperimetric threshold; fillings must have mass < eps0 / 2
};

/// Class in H_1 of the sum of minimal fillings S_i with dS_i = T_i - T_{i-1}.
/// Throws Fineness if some flat-norm step is >= delta and FillTooBig if a filling has
/// mass >= eps0/2. The sequence must start and end at the zero chain.
std::vector<std::int64_t> almgren_class(const std::vector<Chain>& seq, double delta, const AlmgrenOptions& opts = {});

/// Same with caller-supplied fillings (fillings[i] fills seq[i+1] - seq[i]).
std::vector<std::int64_t> almgren_class_with_fillings(const std::vector<Chain>& seq, const std::vector<Chain>& fillings,
                                                      double delta, const AlmgrenOptions& opts = {});

struct WidthQuery {
    TorusGrid grid;
    std::vector<std::int64_t> xi;  ///< class in H_1(T^2)
    double delta = 0.3;
    double mass_cap = 4.0;
    int class_clamp = 3;  ///< accumulated class components are clamped to this range
};

struct WidthResult {
    bool found = false;
    double width = std::numeric_limits<double>::infinity();
    double cap = 0.0;
    std::int64_t states = 0;
    std::vector<Chain> sequence;  ///< optimal sequence of 0-cycles, starting and ending at 0
};

/// Min over fine sequences of balanced 0-cycles sweeping out class xi of the maximal
/// mass, by threshold search over the state graph (chain, accumulated class). Moves
/// are T -> T - dS for 1-chains S of mass < delta.
WidthResult minmax_width(const WidthQuery& q);

/// L_{m,R}: min of minmax_width over integer classes with the same real class as xi
/// and components within the class clamp.
WidthResult minmax_width_real(const WidthQuery& q);

struct MassBoundRow {
    double p = 0.0;
    double mass = 0.0;
    double energy = 0.0;
    double lhs = 0.0;  ///< sigma_{k-1} M(T)
    double rhs = 0.0;  ///< lambda^{k/(k-1)} (k-p) E_p
    double ratio = 0.0;
    bool satisfied = true;
};

struct MassBoundReport {
    std::vector<MassBoundRow> rows;
    double tightest_ratio = 0.0;
    bool satisfied = true;
};

/// sigma_{k-1} M(T_alpha(u)) <= lambda^{k/(k-1)} (k-p) E_p(u) (1 + tolerance) for each
/// family member. `energy` supplies E_p (defaults to the cone-completed energy for
/// circle maps on T^2 and the stencil energy otherwise).
MassBoundReport mass_bound_check(const std::vector<std::pair<double, GridMap>>& family, int k, double tolerance,
                                 const std::function<double(const GridMap&, double)>& energy = {});

} // namespace tbar

#endif
