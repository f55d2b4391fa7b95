#include "arti/trimesh.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

namespace arti {

Vec3 TriMesh::face_normal(int f) const {
    const Face& t = faces[f];
    const Vec3 n = (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]);
    const double len = n.norm();
    return len > 0.0 ? Vec3(n / len) : Vec3::Zero();
}

double TriMesh::face_area(int f) const {
    const Face& t = faces[f];
    return 0.5 * (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]).norm();
}

Vec3 TriMesh::face_centroid(int f) const {
    const Face& t = faces[f];
    return (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]) / 3.0;
}

std::vector<std::array<int, 2>> TriMesh::unique_edges() const {
    std::vector<std::array<int, 2>> edges;
    edges.reserve(faces.size() * 3);
    for (const Face& t : faces) {
        for (int k = 0; k < 3; ++k) {
            int a = t[k], b = t[(k + 1) % 3];
            if (a > b) std::swap(a, b);
            edges.push_back({a, b});
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

double TriMesh::median_edge_length() const {
    const auto edges = unique_edges();
    if (edges.empty()) return 0.0;
    std::vector<double> lengths;
    lengths.reserve(edges.size());
    for (const auto& e : edges)
        lengths.push_back((vertices[e[0]] - vertices[e[1]]).norm());
    const std::size_t mid = lengths.size() / 2;
    std::nth_element(lengths.begin(), lengths.begin() + mid, lengths.end());
    return lengths[mid];
}

bool TriMesh::is_closed_orientable() const {
    if (faces.empty()) return false;
    // Count directed edges; closed orientable means every undirected edge is
    // used exactly once in each direction.
    std::map<std::pair<int, int>, int> directed;
    for (const Face& t : faces) {
        for (int k = 0; k < 3; ++k) {
            const int a = t[k], b = t[(k + 1) % 3];
            if (a == b) return false;
            if (++directed[{a, b}] > 1) return false;
        }
    }
    for (const auto& [edge, count] : directed) {
        auto it = directed.find({edge.second, edge.first});
        if (it == directed.end() || it->second != 1) return false;
    }
    return true;
}

namespace {

int midpoint(std::map<std::pair<int, int>, int>& cache, std::vector<Vec3>& verts,
             int a, int b, double radius) {
    const auto key = std::minmax(a, b);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    Vec3 m = 0.5 * (verts[a] + verts[b]);
    m = m / m.norm() * radius;
    const int idx = static_cast<int>(verts.size());
    verts.push_back(m);
    cache.emplace(key, idx);
    return idx;
}

} // namespace

TriMesh make_icosphere(double radius, int subdivisions) {
    if (radius <= 0.0) throw std::invalid_argument("icosphere radius must be positive");
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;

    TriMesh mesh;
    mesh.vertices = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
    };
    for (Vec3& v : mesh.vertices) v = v / v.norm() * radius;
    mesh.faces = {
        {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
        {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
        {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1},
    };

    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<int, int>, int> cache;
        std::vector<Face> next;
        next.reserve(mesh.faces.size() * 4);
        for (const Face& t : mesh.faces) {
            const int ab = midpoint(cache, mesh.vertices, t[0], t[1], radius);
            const int bc = midpoint(cache, mesh.vertices, t[1], t[2], radius);
            const int ca = midpoint(cache, mesh.vertices, t[2], t[0], radius);
            next.push_back({t[0], ab, ca});
            next.push_back({t[1], bc, ab});
            next.push_back({t[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        mesh.faces = std::move(next);
    }
    return mesh;
}

TriMesh make_quad(double x0, double x1, double y0, double y1, double z0) {
    TriMesh mesh;
    mesh.vertices = {{x0, y0, z0}, {x1, y0, z0}, {x1, y1, z0}, {x0, y1, z0}};
    mesh.faces = {{0, 1, 2}, {0, 2, 3}};
    return mesh;
}

TriMesh make_capsule(double radius, double half_length, int rings, int segments) {
    if (rings < 4 || segments < 3)
        throw std::invalid_argument("capsule needs rings >= 4 and segments >= 3");
    TriMesh mesh;
    // Rings are spaced evenly along the meridian arc (south cap, cylinder,
    // north cap) so the cylinder gets real coverage, not one tall band.
    const int lat = rings; // interior rings, poles added separately
    const double arc = kPi * radius + 2.0 * half_length;
    const double cap = 0.5 * kPi * radius;
    mesh.vertices.push_back({0, -(half_length + radius), 0}); // south pole
    for (int i = 0; i < lat; ++i) {
        const double s = (i + 1.0) / (lat + 1.0) * arc;
        double y, r;
        if (s < cap) {
            const double phi = s / radius;
            y = -half_length - radius * std::cos(phi);
            r = radius * std::sin(phi);
        } else if (s <= cap + 2.0 * half_length) {
            y = -half_length + (s - cap);
            r = radius;
        } else {
            const double phi = (s - cap - 2.0 * half_length) / radius;
            y = half_length + radius * std::sin(phi);
            r = radius * std::cos(phi);
        }
        for (int j = 0; j < segments; ++j) {
            const double a = kTwoPi * j / segments;
            mesh.vertices.push_back({r * std::cos(a), y, r * std::sin(a)});
        }
    }
    mesh.vertices.push_back({0, half_length + radius, 0}); // north pole
    const int north = static_cast<int>(mesh.vertices.size()) - 1;

    auto ring_vertex = [&](int ring, int j) { return 1 + ring * segments + (j % segments); };
    for (int j = 0; j < segments; ++j)
        mesh.faces.push_back({0, ring_vertex(0, j), ring_vertex(0, j + 1)});
    for (int i = 0; i + 1 < lat; ++i) {
        for (int j = 0; j < segments; ++j) {
            const int a = ring_vertex(i, j), b = ring_vertex(i, j + 1);
            const int c = ring_vertex(i + 1, j), d = ring_vertex(i + 1, j + 1);
            mesh.faces.push_back({a, c, b});
            mesh.faces.push_back({b, c, d});
        }
    }
    for (int j = 0; j < segments; ++j)
        mesh.faces.push_back({north, ring_vertex(lat - 1, j + 1), ring_vertex(lat - 1, j)});
    return mesh;
}

namespace {

void append_number(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

} // namespace

void write_obj(const TriMesh& mesh, const std::string& path) {
    std::string out;
    out.reserve(mesh.vertices.size() * 48 + mesh.faces.size() * 24);
    for (const Vec3& v : mesh.vertices) {
        out += "v ";
        append_number(out, v.x());
        out += ' ';
        append_number(out, v.y());
        out += ' ';
        append_number(out, v.z());
        out += '\n';
    }
    char buf[64];
    for (const Face& f : mesh.faces) {
        std::snprintf(buf, sizeof(buf), "f %d %d %d\n", f[0] + 1, f[1] + 1, f[2] + 1);
        out += buf;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open for writing: " + path);
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
}

void write_ply(const TriMesh& mesh, const std::string& path,
               const std::vector<Vec3>* normals, const std::vector<Vec3>* colors) {
    std::string out = "ply\nformat ascii 1.0\n";
    out += "element vertex " + std::to_string(mesh.vertices.size()) + "\n";
    out += "property double x\nproperty double y\nproperty double z\n";
    if (normals) out += "property double nx\nproperty double ny\nproperty double nz\n";
    if (colors) out += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    out += "element face " + std::to_string(mesh.faces.size()) + "\n";
    out += "property list uchar int vertex_indices\nend_header\n";

    auto to_byte = [](double c) {
        const double q = std::round(std::clamp(c, 0.0, 1.0) * 255.0);
        return static_cast<int>(q);
    };
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const Vec3& v = mesh.vertices[i];
        append_number(out, v.x());
        out += ' ';
        append_number(out, v.y());
        out += ' ';
        append_number(out, v.z());
        if (normals) {
            const Vec3& n = (*normals)[i];
            for (int k = 0; k < 3; ++k) {
                out += ' ';
                append_number(out, n[k]);
            }
        }
        if (colors) {
            const Vec3& c = (*colors)[i];
            char buf[16];
            std::snprintf(buf, sizeof(buf), " %d %d %d", to_byte(c.x()), to_byte(c.y()),
                          to_byte(c.z()));
            out += buf;
        }
        out += '\n';
    }
    char buf[64];
    for (const Face& f : mesh.faces) {
        std::snprintf(buf, sizeof(buf), "3 %d %d %d\n", f[0], f[1], f[2]);
        out += buf;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open for writing: " + path);
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
}

} // namespace arti
