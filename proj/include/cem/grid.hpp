#ifndef CEM_GRID_HPP
#define CEM_GRID_HPP

#include <array>
#include <stdexcept>
#include <string>

namespace cem {

struct grid_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Comp { Ex, Ey, Ez, Hx, Hy, Hz };

const char* comp_name(Comp c);

/// Node classification. An axis on which a component carries integer
/// coordinates can place nodes on the domain faces; those are the Dirichlet
/// faces of that component. Half-integer axes never touch a face; the first
/// sample sits h/2 inside and the face condition is of Neumann type, enforced
/// through ghost values.
struct NodeClass {
    enum Kind { Interior, Dirichlet, Neumann } kind = Interior;
    // face id = 2*axis + (1 if the high face), -1 for interior nodes
    int face = -1;
};

/// Staggered (Yee) mesh family on the unit square/cube with uniform width
/// h = 1/N. Coordinates are derived from indices, never stored, so that
/// x_0 = 0 and x_N = 1 hold exactly.
class StaggeredGrid {
public:
    struct Mesh {
        std::array<int, 3> ext{1, 1, 1};   // nodes per axis
        std::array<bool, 3> half{false, false, false};  // half-integer staggering
    };

    static StaggeredGrid tm(int N);    // 2D TM: Ez, Hx, Hy
    static StaggeredGrid cube(int N);  // full 3D: all six components

    int dim() const { return dim_; }
    int N() const { return N_; }
    double h() const { return h_; }

    bool has(Comp c) const;
    const Mesh& mesh(Comp c) const;

    /// Coordinate of node index idx along axis (0,1,2); exact at endpoints.
    double coord(Comp c, int axis, int idx) const;

    NodeClass classify(Comp c, const std::array<int, 3>& idx) const;

    /// True when coordinates on this axis are integers (nodes reach the
    /// faces, Dirichlet); false for half-integer (Neumann) axes.
    bool dirichlet_axis(Comp c, int axis) const { return !mesh(c).half[axis]; }

private:
    StaggeredGrid() = default;
    int dim_ = 0;
    int N_ = 0;
    double h_ = 0.0;
    std::array<Mesh, 6> meshes_{};
    std::array<bool, 6> present_{};
};

}  // namespace cem

#endif
