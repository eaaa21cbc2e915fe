#ifndef TBAR_COMPLEX_HPP
#define TBAR_COMPLEX_HPP

#include <array>
#include <cstdint>
#include <vector>

namespace tbar {

using Point = std::array<double, 3>;
using Index = std::array<int, 3>;

/// Periodic grid on the unit torus T^n with m cells per side, translated by `offset`.
///
/// The side length of every cell is h = 1/m; energies and masses use h as the
/// grid scale. Vertex indices run with the first coordinate fastest.
struct TorusGrid {
    int n = 2;
    int m = 3;
    Point offset{0.0, 0.0, 0.0};

    double h() const { return 1.0 / m; }
    std::int64_t num_vertices() const;
    std::int64_t vertex_index(const Index& b) const;
    Index vertex_base(std::int64_t idx) const;
    Index wrap(Index b) const;
    Point vertex_position(const Index& b) const;
    /// Same torus and offset with `factor` times as many cells per side.
    TorusGrid refined(int factor) const;
    /// Volume of one n-cell, h^n.
    double cell_volume() const;

    bool operator==(const TorusGrid& o) const { return n == o.n && m == o.m && offset == o.offset; }
    bool operator!=(const TorusGrid& o) const { return !(*this == o); }
};

/// Validating constructor: n in {2,3}, m >= 3, offset in [0,1/m)^n.
TorusGrid make_grid(int n, int m, Point offset = {0.0, 0.0, 0.0});

/// The grid whose vertices are the centers of the n-cells of `g`.
TorusGrid dual_grid(const TorusGrid& g);

/// Oriented cube: base vertex, set of spanning axes as a bitmask (bit a = axis a).
struct Cell {
    int dim = 0;
    Index base{0, 0, 0};
    unsigned axes = 0;
    int orientation = 1;
};

/// Sorted list of axes in a bitmask.
std::vector<int> axes_list(unsigned axes);
int popcount(unsigned axes);
/// Sign of the permutation that sorts the concatenation (first, second) of two disjoint sorted axis lists.
int shuffle_sign(unsigned first, unsigned second);

struct Incidence {
    std::int64_t index;
    int sign;
};

/// Periodic cubical complex on a TorusGrid. Cells of dimension j are indexed by
/// (rank of the axis set among j-subsets in increasing bitmask order) * m^n + vertex index.
class CubicalComplex {
public:
    explicit CubicalComplex(TorusGrid grid);

    const TorusGrid& grid() const { return grid_; }
    int n() const { return grid_.n; }
    std::int64_t num_cells(int dim) const;
    const std::vector<unsigned>& axis_sets(int dim) const { return axis_sets_[dim]; }
    int axis_rank(unsigned axes) const;

    std::int64_t cell_index(const Cell& c) const;
    Cell cell(int dim, std::int64_t idx) const;

    /// Oriented facets: the face dropping the i-th axis a_i (0-based) enters as
    /// (-1)^i ([b + e_{a_i}] - [b]).
    std::vector<Incidence> boundary(const Cell& c) const;
    std::vector<Incidence> boundary(int dim, std::int64_t idx) const { return boundary(cell(dim, idx)); }
    /// Cofaces with the sign with which `c` appears in their boundary.
    std::vector<Incidence> coboundary(const Cell& c) const;

    Point center(const Cell& c) const;

private:
    TorusGrid grid_;
    std::array<std::vector<unsigned>, 4> axis_sets_;
    std::array<int, 8> rank_of_{};
};

CubicalComplex build_torus_complex(int n, int m, Point offset = {0.0, 0.0, 0.0});

/// Dual (n-k)-cell of a k-cell sigma: the cube of side h through the center of sigma,
/// spanning the complementary axes. `cell` is expressed in `dual_grid(grid)`.
struct DualCell {
    Cell cell;
    TorusGrid grid;
    Point center;
    double measure = 0.0;
    int orientation = 1;
};

DualCell dual_cell(const CubicalComplex& complex, const Cell& sigma);

/// Result of phi_{j,s} on cell-local coordinates.
struct PhiResult {
    bool singular = false;
    std::array<double, 3> y{0.0, 0.0, 0.0};
};

/// phi_{j,s}(x) = delta * x / max(s, |x|_inf) for x in [-delta, delta]^j.
PhiResult phi_retraction(int j, double s, double delta, const std::array<double, 3>& x);

/// Output of the composite retraction Phi_j = phi_{j,0} o ... o phi_{n,0}.
struct SkeletonPoint {
    bool singular = false;
    Point point{0.0, 0.0, 0.0};       ///< position on the torus, in [0,1)^n
    Index base{0, 0, 0};              ///< base vertex of the (j-1)-cell containing the image
    unsigned free_axes = 0;           ///< axes spanned by that cell
    std::array<double, 3> local{0.0, 0.0, 0.0};  ///< coordinates in units of h relative to base, in [0,1]
};

/// Singular-point tolerance relative to the cell half-width.
inline constexpr double kSingularTol = 1e-12;

SkeletonPoint Phi_retraction(const CubicalComplex& complex, int j, const Point& x);
SkeletonPoint Phi_retraction(const TorusGrid& grid, int j, const Point& x);

/// Locate x in the grid: base vertex of the containing n-cell and local coordinates in [0,1).
void locate(const TorusGrid& grid, const Point& x, Index& base, std::array<double, 3>& local);

} // namespace tbar

#endif
