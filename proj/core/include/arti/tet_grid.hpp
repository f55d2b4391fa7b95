#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "arti/body_model.hpp"
#include "arti/fields.hpp"
#include "arti/geometry.hpp"

namespace arti {

/// Tetrahedralized lattice over a bounding cube: each of R^3 cells is split
/// into 6 tetrahedra (Kuhn/Freudenthal split), which conforms across cell
/// faces. Vertices are fixed lattice points.
struct TetGrid {
    int resolution = 0;
    Box3 bounds;
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 4>> tets;    // positively oriented
    std::vector<std::array<int, 2>> edges;   // unique sorted pairs, ascending
    std::vector<int> edge_tet_start;         // CSR offsets into edge_tets
    std::vector<int> edge_tets;              // tets incident to each edge

    int vertex_index(int ix, int iy, int iz) const {
        const int n = resolution + 1;
        return (iz * n + iy) * n + ix;
    }
    double edge_length(int e) const {
        return (vertices[edges[e][1]] - vertices[edges[e][0]]).norm();
    }
};

/// R >= 2; bounds must be a valid box. 6*R^3 tets, (R+1)^3 vertices.
TetGrid build_tet_grid(int resolution, const Box3& bounds);

/// Cubical lattice bounds: the posed guidance mesh's AABB inflated by 10%.
Box3 lattice_bounds(const std::vector<Vec3>& deformed_vertices);

/// Signed distance per lattice vertex plus the inputs that produced it.
struct GridSDF {
    std::vector<double> values;

    struct Provenance {
        std::vector<double> pose_theta;  // flat, empty for canonical grids
        std::vector<double> shape;
        std::uint64_t geometry_seed = 0;
        std::uint64_t texture_seed = 0;
    };
    Provenance provenance;
};

/// Generic population from any field (analytic oracles, fitting inits).
GridSDF populate_sdf(const TetGrid& grid, const std::function<double(const Vec3&)>& field,
                     int threads = 1);

/// Canonical-space population: d = fs.sdf(w_geo, vertex).
GridSDF populate_sdf(const TetGrid& grid, const FieldSet& fs, const VecX& w_geo, int threads = 1);

/// Deformed-space population: each lattice vertex is un-warped through the
/// posed body before querying the canonical field. Vertices whose inverse
/// warp degenerates are treated as far outside (d = +bounds diagonal).
GridSDF populate_sdf(const TetGrid& grid, const PosedBody& posed, const FieldSet& fs,
                     const VecX& w_geo, int threads = 1);

/// Edges whose endpoint signs differ, sign(d) = +1 for d >= 0. Returned as
/// ascending indices into grid.edges.
std::vector<int> crossing_edges(const TetGrid& grid, const GridSDF& d);

/// Surface extracted by marching tetrahedra. One vertex per sign-crossing
/// edge (shared across tets), at the linear zero of d along the edge.
struct ExtractedMesh {
    struct ParentEdge {
        int i = 0;       // grid vertex indices, i < j
        int j = 0;
        double t = 0.0;  // vertex = v_i + t (v_j - v_i), t in (0,1)
    };

    std::vector<Vec3> vertices;
    std::vector<Face> faces;
    std::vector<ParentEdge> parent_edges;

    // Canonical correspondence cache, filled on demand by
    // compute_canonical(); empty until then.
    std::vector<Vec3> canonical;
    std::vector<int> nearest_guide;

    TriMesh mesh() const { return {vertices, faces}; }
    bool has_canonical() const { return canonical.size() == vertices.size(); }

    /// Un-warp every vertex (identity when posed == nullptr). Degenerate
    /// blends keep the deformed position and record guide -1.
    void compute_canonical(const PosedBody* posed);
};

/// Faces are oriented so geometric normals point toward positive d.
ExtractedMesh marching_tetrahedra(const TetGrid& grid, const GridSDF& d);

/// Closed-form sensitivities of each extracted vertex to its parent edge's
/// endpoint distances.
struct VertexJacobian {
    Vec3 wrt_di = Vec3::Zero();
    Vec3 wrt_dj = Vec3::Zero();
};
std::vector<VertexJacobian> mt_vertex_jacobian(const ExtractedMesh& mesh, const TetGrid& grid,
                                               const GridSDF& d);

} // namespace arti
