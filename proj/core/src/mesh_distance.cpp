#include "arti/mesh_distance.hpp"

#include <algorithm>
#include <stdexcept>

namespace arti {

namespace {

enum class Feature { FaceInterior, VertexA, VertexB, VertexC, EdgeAB, EdgeBC, EdgeCA };

// Ericson-style closest point on a triangle with feature classification.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c,
                               Feature& feature) {
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) {
        feature = Feature::VertexA;
        return a;
    }
    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) {
        feature = Feature::VertexB;
        return b;
    }
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
        feature = Feature::EdgeAB;
        return a + (d1 / (d1 - d3)) * ab;
    }
    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) {
        feature = Feature::VertexC;
        return c;
    }
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
        feature = Feature::EdgeCA;
        return a + (d2 / (d2 - d6)) * ac;
    }
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        feature = Feature::EdgeBC;
        return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
    }
    const double denom = 1.0 / (va + vb + vc);
    feature = Feature::FaceInterior;
    return a + ab * (vb * denom) + ac * (vc * denom);
}

double corner_angle(const Vec3& at, const Vec3& p1, const Vec3& p2) {
    const Vec3 u = p1 - at, v = p2 - at;
    const double nu = u.norm(), nv = v.norm();
    if (nu == 0.0 || nv == 0.0) return 0.0;
    const double c = std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
    return std::acos(c);
}

} // namespace

MeshDistance::MeshDistance(TriMesh mesh) : mesh_(std::move(mesh)) {
    const std::size_t nf = mesh_.faces.size();
    if (nf == 0) throw std::invalid_argument("mesh distance requires a non-empty mesh");

    face_normals_.resize(nf);
    vertex_pseudo_normals_.assign(mesh_.vertices.size(), Vec3::Zero());
    std::vector<std::pair<std::array<int, 2>, Vec3>> edge_acc;
    edge_acc.reserve(nf * 3);

    for (std::size_t f = 0; f < nf; ++f) {
        const Face& t = mesh_.faces[f];
        const Vec3 n = mesh_.face_normal(static_cast<int>(f));
        face_normals_[f] = n;
        for (int k = 0; k < 3; ++k) {
            const int i0 = t[k], i1 = t[(k + 1) % 3], i2 = t[(k + 2) % 3];
            const double ang =
                corner_angle(mesh_.vertices[i0], mesh_.vertices[i1], mesh_.vertices[i2]);
            vertex_pseudo_normals_[i0] += ang * n;
            std::array<int, 2> key{std::min(i0, i1), std::max(i0, i1)};
            edge_acc.emplace_back(key, n);
        }
    }
    std::sort(edge_acc.begin(), edge_acc.end(),
              [](const auto& l, const auto& r) { return l.first < r.first; });
    for (std::size_t i = 0; i < edge_acc.size();) {
        Vec3 sum = Vec3::Zero();
        std::size_t j = i;
        while (j < edge_acc.size() && edge_acc[j].first == edge_acc[i].first) {
            sum += edge_acc[j].second;
            ++j;
        }
        edge_keys_.push_back(edge_acc[i].first);
        edge_pseudo_normals_.push_back(sum);
        i = j;
    }

    order_.resize(nf);
    for (std::size_t f = 0; f < nf; ++f) order_[f] = static_cast<int>(f);
    std::vector<Vec3> centroids(nf);
    for (std::size_t f = 0; f < nf; ++f) centroids[f] = mesh_.face_centroid(static_cast<int>(f));
    nodes_.reserve(2 * nf);
    root_ = build(0, static_cast<int>(nf), centroids);
}

int MeshDistance::build(int begin, int end, std::vector<Vec3>& centroids) {
    Node node;
    node.box = Box3::empty();
    Box3 cbox = Box3::empty();
    for (int i = begin; i < end; ++i) {
        const Face& t = mesh_.faces[order_[i]];
        for (int k = 0; k < 3; ++k) node.box.expand(mesh_.vertices[t[k]]);
        cbox.expand(centroids[order_[i]]);
    }
    constexpr int kLeafSize = 4;
    if (end - begin <= kLeafSize) {
        node.begin = begin;
        node.end = end;
        nodes_.push_back(node);
        return static_cast<int>(nodes_.size()) - 1;
    }
    int axis = 0;
    const Vec3 ext = cbox.extent();
    if (ext.y() > ext.x()) axis = 1;
    if (ext.z() > ext[axis]) axis = 2;
    const int mid = (begin + end) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](int l, int r) {
                         if (centroids[l][axis] != centroids[r][axis])
                             return centroids[l][axis] < centroids[r][axis];
                         return l < r;
                     });
    const int idx = static_cast<int>(nodes_.size());
    nodes_.push_back(node); // placeholder; children appended after
    const int left = build(begin, mid, centroids);
    const int right = build(mid, end, centroids);
    nodes_[idx].left = left;
    nodes_[idx].right = right;
    return idx;
}

MeshDistance::Result MeshDistance::query(const Vec3& x) const {
    double best_sq = std::numeric_limits<double>::infinity();
    Vec3 best_point = Vec3::Zero();
    int best_tri = -1;
    Feature best_feature = Feature::FaceInterior;

    // Manual stack, nearer child first.
    int stack[64];
    int top = 0;
    stack[top++] = root_;
    while (top > 0) {
        const Node& node = nodes_[stack[--top]];
        if (node.box.sq_dist(x) >= best_sq) continue;
        if (node.left < 0) {
            for (int i = node.begin; i < node.end; ++i) {
                const int f = order_[i];
                const Face& t = mesh_.faces[f];
                Feature feature;
                const Vec3 cp = closest_point_on_triangle(x, mesh_.vertices[t[0]],
                                                          mesh_.vertices[t[1]],
                                                          mesh_.vertices[t[2]], feature);
                const double sq = (x - cp).squaredNorm();
                if (sq < best_sq) {
                    best_sq = sq;
                    best_point = cp;
                    best_tri = f;
                    best_feature = feature;
                }
            }
        } else {
            const double dl = nodes_[node.left].box.sq_dist(x);
            const double dr = nodes_[node.right].box.sq_dist(x);
            // Push farther child first so the nearer one is popped next.
            if (dl <= dr) {
                if (dr < best_sq) stack[top++] = node.right;
                if (dl < best_sq) stack[top++] = node.left;
            } else {
                if (dl < best_sq) stack[top++] = node.left;
                if (dr < best_sq) stack[top++] = node.right;
            }
        }
    }

    const Face& t = mesh_.faces[best_tri];
    Vec3 pseudo;
    switch (best_feature) {
        case Feature::FaceInterior: pseudo = face_normals_[best_tri]; break;
        case Feature::VertexA: pseudo = vertex_pseudo_normals_[t[0]]; break;
        case Feature::VertexB: pseudo = vertex_pseudo_normals_[t[1]]; break;
        case Feature::VertexC: pseudo = vertex_pseudo_normals_[t[2]]; break;
        default: {
            int a, b;
            if (best_feature == Feature::EdgeAB) {
                a = t[0]; b = t[1];
            } else if (best_feature == Feature::EdgeBC) {
                a = t[1]; b = t[2];
            } else {
                a = t[2]; b = t[0];
            }
            const std::array<int, 2> key{std::min(a, b), std::max(a, b)};
            const auto it = std::lower_bound(edge_keys_.begin(), edge_keys_.end(), key);
            pseudo = edge_pseudo_normals_[it - edge_keys_.begin()];
            break;
        }
    }

    Result r;
    const Vec3 offset = x - best_point;
    const double dist = std::sqrt(best_sq);
    const double sign = offset.dot(pseudo) >= 0.0 ? 1.0 : -1.0;
    r.distance = sign * dist;
    r.closest = best_point;
    if (dist > 1e-12) {
        r.gradient = sign * offset / dist;
    } else {
        const double pn = pseudo.norm();
        r.gradient = pn > 0.0 ? Vec3(pseudo / pn) : face_normals_[best_tri];
    }
    return r;
}

} // namespace arti
