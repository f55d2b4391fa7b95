#pragma once

#include <memory>
#include <string>
#include <vector>

#include "arti/geometry.hpp"
#include "arti/point_grid.hpp"
#include "arti/trimesh.hpp"

namespace arti {

/// Skinned parametric body: rest mesh, joint hierarchy, per-vertex skinning
/// weights, optional linear shape bases for vertices and joints.
struct BodyModel {
    std::vector<Vec3> rest_vertices;
    std::vector<Face> faces;
    std::vector<int> joint_parents; // root = -1
    std::vector<Vec3> rest_joints;
    // Sparse per-vertex weights as (joint, weight) pairs, nonnegative, sum 1.
    std::vector<std::vector<std::pair<int, double>>> skinning_weights;
    // shape_basis[k][v] displaces vertex v per unit of shape coefficient k.
    std::vector<std::vector<Vec3>> shape_basis;
    std::vector<std::vector<Vec3>> joint_shape_basis;

    int joint_count() const { return static_cast<int>(rest_joints.size()); }
    int vertex_count() const { return static_cast<int>(rest_vertices.size()); }
    int shape_rank() const { return static_cast<int>(shape_basis.size()); }

    TriMesh rest_mesh() const { return {rest_vertices, faces}; }

    /// Checks every invariant; throws std::runtime_error on violation.
    void validate() const;
};

/// Pose (axis-angle per joint plus root translation) and shape coefficients.
struct PoseShapeParams {
    std::vector<Vec3> joint_rotations; // length N_j
    Vec3 root_translation = Vec3::Zero();
    VecX shape = VecX();

    static PoseShapeParams rest(const BodyModel& model) {
        PoseShapeParams p;
        p.joint_rotations.assign(model.joint_count(), Vec3::Zero());
        return p;
    }

    /// Flat theta layout: 3 per joint then the 3 translation entries.
    static PoseShapeParams from_flat(const BodyModel& model, const std::vector<double>& theta,
                                     const std::vector<double>& beta);
};

/// Per-joint canonical-to-deformed rigid transforms.
struct BoneTransforms {
    std::vector<Affine3> bones; // B_i
    const Mat3& rotation(int i) const { return bones[i].linear; }
    int size() const { return static_cast<int>(bones.size()); }
};

BodyModel load_body_model(const std::string& path);

/// B_i = G_i(pose, shape) * G_i(rest)^-1, composed down the parent chain.
/// Rest pose yields identities.
BoneTransforms forward_kinematics(const BodyModel& model, const PoseShapeParams& params);

/// Shape-adjusted rest vertices (rest + shape_basis * beta).
std::vector<Vec3> shaped_rest_vertices(const BodyModel& model, const VecX& shape);

/// Linear blend skinning of the guidance mesh: v_d = (sum_i s_i B_i) v_c.
std::vector<Vec3> deform_guidance_mesh(const BodyModel& model, const BoneTransforms& transforms,
                                       const VecX& shape = VecX());

/// Weighted bone blend for one vertex: M = sum_i s_i B_i.
Affine3 blend_transform(const BodyModel& model, int vertex, const BoneTransforms& transforms);

/// Immutable per-pose context: bone transforms, deformed guidance vertices,
/// and a nearest-vertex index over them. Queries are pure and concurrent-safe.
class PosedBody {
public:
    PosedBody(const BodyModel& model, const PoseShapeParams& params);

    const BodyModel& model() const { return *model_; }
    const BoneTransforms& transforms() const { return transforms_; }
    const std::vector<Vec3>& deformed_vertices() const { return deformed_; }
    bool is_rest_pose() const { return rest_pose_; }

    /// Nearest deformed guidance vertex; ties go to the lowest index.
    int nearest_vertex(const Vec3& deformed_point) const;

    struct Warp {
        Vec3 canonical;
        int nearest = -1;
        Affine3 blend;
    };
    /// Un-warp a deformed-space point through the nearest vertex's blended
    /// bone transform. Throws std::runtime_error on a degenerate blend
    /// (|det| < 1e-8).
    Warp inverse_warp(const Vec3& deformed_point) const;

    /// Push a canonical normal to deformed space through the blended
    /// rotations of vertex `nearest`; output is unit length.
    Vec3 skin_normal(const Vec3& canonical_normal, int nearest) const;

private:
    const BodyModel* model_;
    BoneTransforms transforms_;
    std::vector<Vec3> deformed_;
    std::unique_ptr<PointGrid> index_;
    bool rest_pose_ = false;
};

} // namespace arti
