#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "arti/geometry.hpp"

namespace arti {

/// Plain indexed triangle mesh. Faces are CCW seen from outside.
struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<Face> faces;

    bool empty() const { return faces.empty(); }
    Vec3 face_normal(int f) const; // unit, zero for degenerate faces
    double face_area(int f) const;
    Vec3 face_centroid(int f) const;
    Box3 bounds() const { return bounding_box(vertices); }

    /// Unique undirected edges as sorted index pairs.
    std::vector<std::array<int, 2>> unique_edges() const;
    double median_edge_length() const;

    /// Every edge used by exactly two faces, once per direction.
    bool is_closed_orientable() const;
};

/// Icosphere of given radius: icosahedron subdivided `subdivisions` times,
/// vertices projected onto the sphere.
TriMesh make_icosphere(double radius, int subdivisions);

/// Axis-aligned unit data for tests: two-triangle rectangle in the plane
/// z = z0 spanning [x0,x1]x[y0,y1], facing +z.
TriMesh make_quad(double x0, double x1, double y0, double y1, double z0);

/// Capsule along the y axis: cylinder of the given half-length capped by
/// hemispheres. rings counts latitude rings including both poles.
TriMesh make_capsule(double radius, double half_length, int rings, int segments);

void write_obj(const TriMesh& mesh, const std::string& path);

/// PLY with optional per-vertex normals and colors (ascii, deterministic).
void write_ply(const TriMesh& mesh, const std::string& path,
               const std::vector<Vec3>* normals = nullptr,
               const std::vector<Vec3>* colors = nullptr);

} // namespace arti
