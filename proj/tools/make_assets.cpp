// Emits the deterministic test body models (capsule_biped.json,
// capsule_quad.json) from the same capsule geometry the library uses, so the
// assets can never drift from the C++ mesh builders.
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "arti/geometry.hpp"
#include "arti/trimesh.hpp"

using arti::TriMesh;
using arti::Vec3;
using nlohmann::ordered_json;

namespace {

ordered_json flat_vec3(const std::vector<Vec3>& vs) {
    ordered_json arr = ordered_json::array();
    for (const Vec3& v : vs) {
        arr.push_back(v.x());
        arr.push_back(v.y());
        arr.push_back(v.z());
    }
    return arr;
}

ordered_json flat_faces(const TriMesh& mesh) {
    ordered_json arr = ordered_json::array();
    for (const auto& f : mesh.faces)
        for (int idx : f) arr.push_back(idx);
    return arr;
}

// Piecewise-linear hat weights over a chain of joints ordered by y. Each
// vertex blends the two joints bracketing its height; the complement is
// computed as 1 - w so parsed weights sum to 1 within an ulp.
ordered_json chain_weights(const std::vector<Vec3>& vertices, const std::vector<double>& joint_y) {
    ordered_json rows = ordered_json::array();
    const int nj = static_cast<int>(joint_y.size());
    for (const Vec3& v : vertices) {
        const double y = v.y();
        ordered_json row = ordered_json::array();
        if (y <= joint_y.front()) {
            row.push_back({0, 1.0});
        } else if (y >= joint_y.back()) {
            row.push_back({nj - 1, 1.0});
        } else {
            int k = 0;
            while (k + 2 < nj && y >= joint_y[k + 1]) ++k;
            const double t = (y - joint_y[k]) / (joint_y[k + 1] - joint_y[k]);
            if (t <= 0.0) {
                row.push_back({k, 1.0});
            } else if (t >= 1.0) {
                row.push_back({k + 1, 1.0});
            } else {
                row.push_back({k, 1.0 - t});
                row.push_back({k + 1, t});
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_doc(const ordered_json& doc, const std::string& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        std::fprintf(stderr, "cannot write %s\n", path.c_str());
        std::exit(1);
    }
    file << doc.dump(1) << "\n";
    std::printf("wrote %s\n", path.c_str());
}

void make_biped(const std::string& path) {
    const TriMesh capsule = arti::make_capsule(0.25, 0.5, 14, 9);
    const std::vector<double> joint_y = {-0.4, 0.2};

    ordered_json doc;
    doc["vertices"] = flat_vec3(capsule.vertices);
    doc["faces"] = flat_faces(capsule);
    doc["joint_parents"] = {-1, 0};
    doc["rest_joints"] = {0.0, joint_y[0], 0.0, 0.0, joint_y[1], 0.0};
    doc["skinning_weights"] = chain_weights(capsule.vertices, joint_y);

    // One shape direction: radial girth change plus a slight joint spread, so
    // the shape pathways through FK and guidance deformation are exercised.
    std::vector<Vec3> girth(capsule.vertices.size());
    for (std::size_t i = 0; i < capsule.vertices.size(); ++i) {
        const Vec3& v = capsule.vertices[i];
        girth[i] = Vec3(0.2 * v.x(), 0.0, 0.2 * v.z());
    }
    doc["shape_basis"] = ordered_json::array({flat_vec3(girth)});
    doc["joint_shape_basis"] =
        ordered_json::array({ordered_json({0.0, -0.05, 0.0, 0.0, 0.05, 0.0})});
    write_doc(doc, path);
}

void make_quad(const std::string& path) {
    const TriMesh capsule = arti::make_capsule(0.2, 0.65, 18, 10);
    const std::vector<double> joint_y = {-0.6, -0.2, 0.2, 0.6};

    ordered_json doc;
    doc["vertices"] = flat_vec3(capsule.vertices);
    doc["faces"] = flat_faces(capsule);
    doc["joint_parents"] = {-1, 0, 1, 2};
    ordered_json joints = ordered_json::array();
    for (double y : joint_y) {
        joints.push_back(0.0);
        joints.push_back(y);
        joints.push_back(0.0);
    }
    doc["rest_joints"] = joints;
    doc["skinning_weights"] = chain_weights(capsule.vertices, joint_y);
    write_doc(doc, path);
}

} // namespace

int main(int argc, char** argv) {
    const std::string dir = argc > 1 ? argv[1] : "assets";
    make_biped(dir + "/capsule_biped.json");
    make_quad(dir + "/capsule_quad.json");
    return 0;
}
