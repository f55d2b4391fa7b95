#include "arti/body_model.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace arti {

namespace {

using nlohmann::json;

std::vector<Vec3> parse_flat_vec3(const json& arr, const char* what) {
    if (!arr.is_array() || arr.size() % 3 != 0)
        throw std::runtime_error(std::string(what) + " must be a flat xyz array");
    std::vector<Vec3> out(arr.size() / 3);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = Vec3(arr[3 * i].get<double>(), arr[3 * i + 1].get<double>(),
                      arr[3 * i + 2].get<double>());
    return out;
}

std::vector<std::vector<Vec3>> parse_basis(const json& arr, std::size_t count, const char* what) {
    std::vector<std::vector<Vec3>> basis;
    for (const auto& row : arr) {
        auto vecs = parse_flat_vec3(row, what);
        if (vecs.size() != count)
            throw std::runtime_error(std::string(what) + " rank entry has wrong length");
        basis.push_back(std::move(vecs));
    }
    return basis;
}

} // namespace

void BodyModel::validate() const {
    const int nv = vertex_count();
    const int nj = joint_count();
    if (nv == 0) throw std::runtime_error("body model has no vertices");
    if (nj == 0) throw std::runtime_error("body model has no joints");
    if (static_cast<int>(joint_parents.size()) != nj)
        throw std::runtime_error("joint_parents length mismatch");
    if (static_cast<int>(skinning_weights.size()) != nv)
        throw std::runtime_error("skinning_weights length mismatch");

    for (const Face& f : faces)
        for (int idx : f)
            if (idx < 0 || idx >= nv) throw std::runtime_error("face index out of range");

    int roots = 0;
    for (int j = 0; j < nj; ++j) {
        const int p = joint_parents[j];
        if (p == -1) {
            ++roots;
        } else if (p < 0 || p >= nj) {
            throw std::runtime_error("joint parent index out of range");
        }
    }
    if (roots != 1) throw std::runtime_error("joint hierarchy must have exactly one root");
    for (int j = 0; j < nj; ++j) {
        int cur = j, steps = 0;
        while (cur != -1) {
            cur = joint_parents[cur];
            if (++steps > nj) throw std::runtime_error("cyclic joint hierarchy");
        }
    }

    for (int v = 0; v < nv; ++v) {
        double sum = 0.0;
        for (const auto& [joint, weight] : skinning_weights[v]) {
            if (joint < 0 || joint >= nj)
                throw std::runtime_error("skinning weight joint index out of range");
            if (weight < 0.0) throw std::runtime_error("weights not normalized");
            sum += weight;
        }
        if (std::abs(sum - 1.0) > 1e-4) throw std::runtime_error("weights not normalized");
    }

    for (const auto& basis : shape_basis)
        if (static_cast<int>(basis.size()) != nv)
            throw std::runtime_error("shape_basis length mismatch");
    for (const auto& basis : joint_shape_basis)
        if (static_cast<int>(basis.size()) != nj)
            throw std::runtime_error("joint_shape_basis length mismatch");
    if (!joint_shape_basis.empty() && joint_shape_basis.size() != shape_basis.size())
        throw std::runtime_error("shape bases must share a rank");
}

BodyModel load_body_model(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw std::runtime_error("cannot open body model file: " + path);
    json doc;
    try {
        doc = json::parse(file);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("body model parse failure: " + std::string(e.what()));
    }

    BodyModel model;
    model.rest_vertices = parse_flat_vec3(doc.at("vertices"), "vertices");
    const auto& faces = doc.at("faces");
    if (faces.size() % 3 != 0) throw std::runtime_error("faces must be a flat index triple array");
    for (std::size_t i = 0; i < faces.size(); i += 3)
        model.faces.push_back({faces[i].get<int>(), faces[i + 1].get<int>(),
                               faces[i + 2].get<int>()});
    for (const auto& p : doc.at("joint_parents")) model.joint_parents.push_back(p.get<int>());
    model.rest_joints = parse_flat_vec3(doc.at("rest_joints"), "rest_joints");
    for (const auto& row : doc.at("skinning_weights")) {
        std::vector<std::pair<int, double>> weights;
        for (const auto& pair : row) {
            if (!pair.is_array() || pair.size() != 2)
                throw std::runtime_error("skinning weight entries must be [joint, weight] pairs");
            weights.emplace_back(pair[0].get<int>(), pair[1].get<double>());
        }
        model.skinning_weights.push_back(std::move(weights));
    }
    if (doc.contains("shape_basis"))
        model.shape_basis =
            parse_basis(doc["shape_basis"], model.rest_vertices.size(), "shape_basis");
    if (doc.contains("joint_shape_basis"))
        model.joint_shape_basis =
            parse_basis(doc["joint_shape_basis"], model.rest_joints.size(), "joint_shape_basis");

    model.validate();
    return model;
}

PoseShapeParams PoseShapeParams::from_flat(const BodyModel& model,
                                           const std::vector<double>& theta,
                                           const std::vector<double>& beta) {
    const int nj = model.joint_count();
    if (static_cast<int>(theta.size()) != 3 * nj + 3)
        throw std::runtime_error("theta must have length 3*N_j + 3");
    for (double v : theta)
        if (!std::isfinite(v)) throw std::runtime_error("theta entries must be finite");
    PoseShapeParams p;
    p.joint_rotations.resize(nj);
    for (int j = 0; j < nj; ++j)
        p.joint_rotations[j] = Vec3(theta[3 * j], theta[3 * j + 1], theta[3 * j + 2]);
    p.root_translation = Vec3(theta[3 * nj], theta[3 * nj + 1], theta[3 * nj + 2]);
    if (!beta.empty()) {
        if (static_cast<int>(beta.size()) != model.shape_rank())
            throw std::runtime_error("beta length must equal the shape-basis rank");
        p.shape = Eigen::Map<const VecX>(beta.data(), static_cast<Eigen::Index>(beta.size()));
    }
    return p;
}

namespace {

std::vector<Vec3> shaped_joints(const BodyModel& model, const VecX& shape) {
    std::vector<Vec3> joints = model.rest_joints;
    for (Eigen::Index k = 0; k < shape.size(); ++k) {
        if (k >= static_cast<Eigen::Index>(model.joint_shape_basis.size())) break;
        for (std::size_t j = 0; j < joints.size(); ++j)
            joints[j] += shape[k] * model.joint_shape_basis[k][j];
    }
    return joints;
}

} // namespace

BoneTransforms forward_kinematics(const BodyModel& model, const PoseShapeParams& params) {
    const int nj = model.joint_count();
    if (static_cast<int>(params.joint_rotations.size()) != nj)
        throw std::runtime_error("pose joint count mismatch");
    if (params.shape.size() != 0 && params.shape.size() != model.shape_rank())
        throw std::runtime_error("beta length must equal the shape-basis rank");

    const std::vector<Vec3> joints = shaped_joints(model, params.shape);

    // Evaluate parents before children. joint_parents is acyclic, so a simple
    // worklist pass terminates.
    std::vector<Affine3> global(nj);
    std::vector<bool> done(nj, false);
    int remaining = nj;
    while (remaining > 0) {
        for (int j = 0; j < nj; ++j) {
            if (done[j]) continue;
            const int p = model.joint_parents[j];
            if (p != -1 && !done[p]) continue;
            Affine3 local;
            local.linear = axis_angle_to_matrix(params.joint_rotations[j]);
            if (p == -1) {
                local.translation = joints[j] + params.root_translation;
                global[j] = local;
            } else {
                local.translation = joints[j] - joints[p];
                global[j] = global[p].compose(local);
            }
            done[j] = true;
            --remaining;
        }
    }

    BoneTransforms out;
    out.bones.resize(nj);
    for (int j = 0; j < nj; ++j) {
        // B = G * G_rest^-1 with G_rest = [I | joint].
        out.bones[j].linear = global[j].linear;
        out.bones[j].translation = global[j].translation - global[j].linear * joints[j];
    }
    return out;
}

std::vector<Vec3> shaped_rest_vertices(const BodyModel& model, const VecX& shape) {
    std::vector<Vec3> verts = model.rest_vertices;
    for (Eigen::Index k = 0; k < shape.size(); ++k) {
        if (k >= static_cast<Eigen::Index>(model.shape_basis.size())) break;
        for (std::size_t v = 0; v < verts.size(); ++v)
            verts[v] += shape[k] * model.shape_basis[k][v];
    }
    return verts;
}

std::vector<Vec3> deform_guidance_mesh(const BodyModel& model, const BoneTransforms& transforms,
                                       const VecX& shape) {
    const std::vector<Vec3> rest = shaped_rest_vertices(model, shape);
    std::vector<Vec3> out(rest.size());
    for (std::size_t v = 0; v < rest.size(); ++v) {
        Mat3 linear = Mat3::Zero();
        Vec3 translation = Vec3::Zero();
        for (const auto& [joint, weight] : model.skinning_weights[v]) {
            linear += weight * transforms.bones[joint].linear;
            translation += weight * transforms.bones[joint].translation;
        }
        out[v] = linear * rest[v] + translation;
    }
    return out;
}

Affine3 blend_transform(const BodyModel& model, int vertex, const BoneTransforms& transforms) {
    Affine3 blend;
    blend.linear = Mat3::Zero();
    blend.translation = Vec3::Zero();
    for (const auto& [joint, weight] : model.skinning_weights[vertex]) {
        blend.linear += weight * transforms.bones[joint].linear;
        blend.translation += weight * transforms.bones[joint].translation;
    }
    return blend;
}

PosedBody::PosedBody(const BodyModel& model, const PoseShapeParams& params) : model_(&model) {
    transforms_ = forward_kinematics(model, params);
    deformed_ = deform_guidance_mesh(model, transforms_, params.shape);

    rest_pose_ = params.root_translation.isZero(0.0) && params.shape.size() == 0;
    for (const Vec3& r : params.joint_rotations)
        rest_pose_ = rest_pose_ && r.isZero(0.0);

    TriMesh deformed_mesh{deformed_, model.faces};
    double cell = deformed_mesh.median_edge_length();
    if (!(cell > 0.0)) cell = 0.0; // PointGrid falls back to a density default
    index_ = std::make_unique<PointGrid>(deformed_, cell);
}

int PosedBody::nearest_vertex(const Vec3& deformed_point) const {
    return index_->nearest(deformed_point);
}

PosedBody::Warp PosedBody::inverse_warp(const Vec3& deformed_point) const {
    Warp w;
    w.nearest = nearest_vertex(deformed_point);
    w.blend = blend_transform(*model_, w.nearest, transforms_);
    if (std::abs(w.blend.det()) < 1e-8)
        throw std::runtime_error("degenerate blend transform");
    w.canonical = w.blend.inverse().apply(deformed_point);
    return w;
}

Vec3 PosedBody::skin_normal(const Vec3& canonical_normal, int nearest) const {
    if (canonical_normal.norm() == 0.0)
        throw std::invalid_argument("skin_normal requires a nonzero normal");
    Mat3 rotation = Mat3::Zero();
    for (const auto& [joint, weight] : model_->skinning_weights[nearest])
        rotation += weight * transforms_.bones[joint].linear;
    const Vec3 n = rotation * canonical_normal;
    const double len = n.norm();
    if (len < 1e-8) throw std::runtime_error("blended rotation collapsed the normal");
    return n / len;
}

} // namespace arti
