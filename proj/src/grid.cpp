#include "cem/grid.hpp"

namespace cem {

const char* comp_name(Comp c) {
    switch (c) {
        case Comp::Ex: return "Ex";
        case Comp::Ey: return "Ey";
        case Comp::Ez: return "Ez";
        case Comp::Hx: return "Hx";
        case Comp::Hy: return "Hy";
        case Comp::Hz: return "Hz";
    }
    return "?";
}

static int idx(Comp c) { return static_cast<int>(c); }

StaggeredGrid StaggeredGrid::tm(int N) {
    if (N < 2) throw grid_error("TM grid needs N >= 2, got N=" + std::to_string(N));
    StaggeredGrid g;
    g.dim_ = 2;
    g.N_ = N;
    g.h_ = 1.0 / N;
    // Ez at (x_i, y_j), Hx at (x_i, y_{j+1/2}), Hy at (x_{i+1/2}, y_j)
    g.meshes_[idx(Comp::Ez)] = {{N + 1, N + 1, 1}, {false, false, false}};
    g.meshes_[idx(Comp::Hx)] = {{N + 1, N, 1}, {false, true, false}};
    g.meshes_[idx(Comp::Hy)] = {{N, N + 1, 1}, {true, false, false}};
    g.present_[idx(Comp::Ez)] = g.present_[idx(Comp::Hx)] = g.present_[idx(Comp::Hy)] = true;
    return g;
}

StaggeredGrid StaggeredGrid::cube(int N) {
    if (N < 2) throw grid_error("3D grid needs N >= 2, got N=" + std::to_string(N));
    StaggeredGrid g;
    g.dim_ = 3;
    g.N_ = N;
    g.h_ = 1.0 / N;
    const int n = N, p = N + 1;
    g.meshes_[idx(Comp::Ex)] = {{n, p, p}, {true, false, false}};
    g.meshes_[idx(Comp::Ey)] = {{p, n, p}, {false, true, false}};
    g.meshes_[idx(Comp::Ez)] = {{p, p, n}, {false, false, true}};
    g.meshes_[idx(Comp::Hx)] = {{p, n, n}, {false, true, true}};
    g.meshes_[idx(Comp::Hy)] = {{n, p, n}, {true, false, true}};
    g.meshes_[idx(Comp::Hz)] = {{n, n, p}, {true, true, false}};
    for (auto& f : g.present_) f = true;
    return g;
}

bool StaggeredGrid::has(Comp c) const { return present_[idx(c)]; }

const StaggeredGrid::Mesh& StaggeredGrid::mesh(Comp c) const {
    if (!present_[idx(c)])
        throw grid_error(std::string("component ") + comp_name(c) + " not present on this grid");
    return meshes_[idx(c)];
}

double StaggeredGrid::coord(Comp c, int axis, int i) const {
    const Mesh& m = mesh(c);
    if (axis < 0 || axis >= dim_) throw grid_error("axis out of range");
    if (i < 0 || i >= m.ext[axis]) throw grid_error("node index out of range");
    if (m.half[axis]) return (2.0 * i + 1.0) / (2.0 * N_);
    return double(i) / N_;
}

NodeClass StaggeredGrid::classify(Comp c, const std::array<int, 3>& id) const {
    const Mesh& m = mesh(c);
    for (int a = 0; a < dim_; ++a)
        if (id[a] < 0 || id[a] >= m.ext[a])
            throw grid_error("node index out of range for " + std::string(comp_name(c)));
    // A node lying on a face pins the value (Dirichlet); otherwise a node in
    // the first sample layer of a half-staggered axis is flagged as adjacent
    // to a Neumann face.
    for (int a = 0; a < dim_; ++a) {
        if (m.half[a]) continue;
        if (id[a] == 0) return {NodeClass::Dirichlet, 2 * a};
        if (id[a] == m.ext[a] - 1) return {NodeClass::Dirichlet, 2 * a + 1};
    }
    for (int a = 0; a < dim_; ++a) {
        if (!m.half[a]) continue;
        if (id[a] == 0) return {NodeClass::Neumann, 2 * a};
        if (id[a] == m.ext[a] - 1) return {NodeClass::Neumann, 2 * a + 1};
    }
    return {NodeClass::Interior, -1};
}

}  // namespace cem
