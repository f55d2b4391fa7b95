#pragma once

#include <vector>

#include "arti/geometry.hpp"
#include "arti/trimesh.hpp"

namespace arti {

/// Signed distance queries against a triangle mesh. Nearest triangles are
/// found through an AABB tree; the sign comes from the angle-weighted
/// pseudo-normal of the closest feature (negative inside). The sign is only
/// meaningful for closed orientable meshes.
class MeshDistance {
public:
    explicit MeshDistance(TriMesh mesh);

    struct Result {
        double distance = 0.0; // signed, negative inside
        Vec3 closest = Vec3::Zero();
        Vec3 gradient = Vec3::Zero(); // unit direction of increasing distance
    };

    Result query(const Vec3& x) const;
    double signed_distance(const Vec3& x) const { return query(x).distance; }

    const TriMesh& mesh() const { return mesh_; }

private:
    struct Node {
        Box3 box;
        int left = -1, right = -1; // interior
        int begin = 0, end = 0;    // leaf triangle range in order_
    };

    int build(int begin, int end, std::vector<Vec3>& centroids);

    TriMesh mesh_;
    std::vector<Vec3> face_normals_;
    std::vector<Vec3> vertex_pseudo_normals_;
    std::vector<std::array<int, 2>> edge_keys_;  // sorted pairs, ascending
    std::vector<Vec3> edge_pseudo_normals_;      // parallel to edge_keys_
    std::vector<int> order_;                     // triangle order for leaves
    std::vector<Node> nodes_;
    int root_ = -1;
};

} // namespace arti
