#include "arti/tet_grid.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include "arti/threading.hpp"

namespace arti {

namespace {

// Kuhn split: the six monotone paths 0 -> 7 through cube corners (bit 0 = x,
// bit 1 = y, bit 2 = z); every tet contains the main diagonal 0-7.
constexpr int kCubeTets[6][4] = {
    {0, 1, 3, 7}, {0, 1, 5, 7}, {0, 2, 3, 7},
    {0, 2, 6, 7}, {0, 4, 5, 7}, {0, 4, 6, 7},
};

double signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    return (b - a).cross(c - a).dot(d - a) / 6.0;
}

std::uint64_t pack_edge(int i, int j) {
    return (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint32_t>(j);
}

} // namespace

TetGrid build_tet_grid(int resolution, const Box3& bounds) {
    if (resolution < 2) throw std::invalid_argument("tet grid resolution must be at least 2");
    if (!bounds.valid() || !(bounds.extent().minCoeff() > 0.0))
        throw std::invalid_argument("tet grid bounds must be a non-empty box");

    TetGrid grid;
    grid.resolution = resolution;
    grid.bounds = bounds;

    const int n = resolution + 1;
    grid.vertices.resize(static_cast<std::size_t>(n) * n * n);
    for (int iz = 0; iz < n; ++iz)
        for (int iy = 0; iy < n; ++iy)
            for (int ix = 0; ix < n; ++ix) {
                const Vec3 f(static_cast<double>(ix) / resolution,
                             static_cast<double>(iy) / resolution,
                             static_cast<double>(iz) / resolution);
                grid.vertices[grid.vertex_index(ix, iy, iz)] =
                    bounds.lo + f.cwiseProduct(bounds.extent());
            }

    grid.tets.reserve(6ull * resolution * resolution * resolution);
    for (int iz = 0; iz < resolution; ++iz)
        for (int iy = 0; iy < resolution; ++iy)
            for (int ix = 0; ix < resolution; ++ix) {
                int corner[8];
                for (int c = 0; c < 8; ++c)
                    corner[c] = grid.vertex_index(ix + (c & 1), iy + ((c >> 1) & 1),
                                                  iz + ((c >> 2) & 1));
                for (const auto& t : kCubeTets) {
                    std::array<int, 4> tet = {corner[t[0]], corner[t[1]], corner[t[2]],
                                              corner[t[3]]};
                    if (signed_volume(grid.vertices[tet[0]], grid.vertices[tet[1]],
                                      grid.vertices[tet[2]], grid.vertices[tet[3]]) < 0.0)
                        std::swap(tet[2], tet[3]);
                    grid.tets.push_back(tet);
                }
            }

    // Unique sorted edge list + CSR incident-tet references.
    std::vector<std::array<int, 2>> all;
    all.reserve(grid.tets.size() * 6);
    for (const auto& tet : grid.tets)
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b)
                all.push_back({std::min(tet[a], tet[b]), std::max(tet[a], tet[b])});
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    grid.edges = std::move(all);

    std::unordered_map<std::uint64_t, int> edge_index;
    edge_index.reserve(grid.edges.size() * 2);
    for (std::size_t e = 0; e < grid.edges.size(); ++e)
        edge_index.emplace(pack_edge(grid.edges[e][0], grid.edges[e][1]), static_cast<int>(e));

    std::vector<int> counts(grid.edges.size() + 1, 0);
    auto for_each_tet_edge = [&](auto&& fn) {
        for (std::size_t t = 0; t < grid.tets.size(); ++t) {
            const auto& tet = grid.tets[t];
            for (int a = 0; a < 4; ++a)
                for (int b = a + 1; b < 4; ++b) {
                    const int e = edge_index.at(
                        pack_edge(std::min(tet[a], tet[b]), std::max(tet[a], tet[b])));
                    fn(e, static_cast<int>(t));
                }
        }
    };
    for_each_tet_edge([&](int e, int) { ++counts[e + 1]; });
    for (std::size_t e = 1; e < counts.size(); ++e) counts[e] += counts[e - 1];
    grid.edge_tet_start = counts;
    grid.edge_tets.resize(grid.edge_tet_start.back());
    std::vector<int> cursor = grid.edge_tet_start;
    for_each_tet_edge([&](int e, int t) { grid.edge_tets[cursor[e]++] = t; });
    return grid;
}

Box3 lattice_bounds(const std::vector<Vec3>& deformed_vertices) {
    const Box3 aabb = bounding_box(deformed_vertices).inflated(1.1);
    return Box3::cube(aabb.center(), 0.5 * aabb.extent().maxCoeff());
}

GridSDF populate_sdf(const TetGrid& grid, const std::function<double(const Vec3&)>& field,
                     int threads) {
    GridSDF d;
    d.values.resize(grid.vertices.size());
    parallel_for(grid.vertices.size(), threads,
                 [&](std::size_t v) { d.values[v] = field(grid.vertices[v]); });
    return d;
}

GridSDF populate_sdf(const TetGrid& grid, const FieldSet& fs, const VecX& w_geo, int threads) {
    return populate_sdf(
        grid, [&](const Vec3& x) { return fs.sdf(w_geo, x); }, threads);
}

GridSDF populate_sdf(const TetGrid& grid, const PosedBody& posed, const FieldSet& fs,
                     const VecX& w_geo, int threads) {
    const double far = grid.bounds.diagonal();
    return populate_sdf(
        grid,
        [&](const Vec3& x) {
            try {
                return fs.sdf(w_geo, posed.inverse_warp(x).canonical);
            } catch (const std::runtime_error&) {
                return far;  // degenerate blend: treat as far outside
            }
        },
        threads);
}

std::vector<int> crossing_edges(const TetGrid& grid, const GridSDF& d) {
    if (d.values.size() != grid.vertices.size())
        throw std::invalid_argument("grid SDF length mismatch");
    std::vector<int> out;
    for (std::size_t e = 0; e < grid.edges.size(); ++e) {
        const bool neg_i = d.values[grid.edges[e][0]] < 0.0;
        const bool neg_j = d.values[grid.edges[e][1]] < 0.0;
        if (neg_i != neg_j) out.push_back(static_cast<int>(e));
    }
    return out;
}

void ExtractedMesh::compute_canonical(const PosedBody* posed) {
    canonical.resize(vertices.size());
    nearest_guide.assign(vertices.size(), -1);
    for (std::size_t v = 0; v < vertices.size(); ++v) {
        if (!posed) {
            canonical[v] = vertices[v];
            continue;
        }
        try {
            const PosedBody::Warp w = posed->inverse_warp(vertices[v]);
            canonical[v] = w.canonical;
            nearest_guide[v] = w.nearest;
        } catch (const std::runtime_error&) {
            canonical[v] = vertices[v];
        }
    }
}

ExtractedMesh marching_tetrahedra(const TetGrid& grid, const GridSDF& d) {
    const std::vector<int> s_e = crossing_edges(grid, d);

    ExtractedMesh out;
    out.vertices.resize(s_e.size());
    out.parent_edges.resize(s_e.size());
    std::unordered_map<std::uint64_t, int> edge_vertex;
    edge_vertex.reserve(s_e.size() * 2);
    for (std::size_t k = 0; k < s_e.size(); ++k) {
        const int i = grid.edges[s_e[k]][0];
        const int j = grid.edges[s_e[k]][1];
        const double t = d.values[i] / (d.values[i] - d.values[j]);
        out.vertices[k] = grid.vertices[i] + t * (grid.vertices[j] - grid.vertices[i]);
        out.parent_edges[k] = {i, j, t};
        edge_vertex.emplace(pack_edge(i, j), static_cast<int>(k));
    }

    auto crossing_vertex = [&](int a, int b) {
        return edge_vertex.at(pack_edge(std::min(a, b), std::max(a, b)));
    };
    auto emit = [&](int v0, int v1, int v2, const Vec3& toward_positive) {
        const Vec3 n = (out.vertices[v1] - out.vertices[v0])
                           .cross(out.vertices[v2] - out.vertices[v0]);
        if (n.dot(toward_positive) < 0.0)
            out.faces.push_back({v0, v2, v1});
        else
            out.faces.push_back({v0, v1, v2});
    };

    for (const auto& tet : grid.tets) {
        int neg[4], pos[4], n_neg = 0, n_pos = 0;
        for (int v : tet)
            (d.values[v] < 0.0 ? neg[n_neg++] : pos[n_pos++]) = v;
        if (n_neg == 0 || n_pos == 0) continue;

        // Orientation reference: from the negative side toward the positive.
        Vec3 c_pos = Vec3::Zero(), c_neg = Vec3::Zero();
        for (int k = 0; k < n_pos; ++k) c_pos += grid.vertices[pos[k]];
        for (int k = 0; k < n_neg; ++k) c_neg += grid.vertices[neg[k]];
        const Vec3 toward_positive = c_pos / n_pos - c_neg / n_neg;

        if (n_neg == 1) {
            emit(crossing_vertex(neg[0], pos[0]), crossing_vertex(neg[0], pos[1]),
                 crossing_vertex(neg[0], pos[2]), toward_positive);
        } else if (n_neg == 3) {
            emit(crossing_vertex(neg[0], pos[0]), crossing_vertex(neg[1], pos[0]),
                 crossing_vertex(neg[2], pos[0]), toward_positive);
        } else {
            // Two crossings per negative vertex form a quad; split it on the
            // (neg0-pos0, neg1-pos1) diagonal.
            const int ac = crossing_vertex(neg[0], pos[0]);
            const int ad = crossing_vertex(neg[0], pos[1]);
            const int bc = crossing_vertex(neg[1], pos[0]);
            const int bd = crossing_vertex(neg[1], pos[1]);
            emit(ac, ad, bd, toward_positive);
            emit(ac, bd, bc, toward_positive);
        }
    }
    return out;
}

std::vector<VertexJacobian> mt_vertex_jacobian(const ExtractedMesh& mesh, const TetGrid& grid,
                                               const GridSDF& d) {
    std::vector<VertexJacobian> out(mesh.vertices.size());
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
        const auto& pe = mesh.parent_edges[v];
        const double di = d.values[pe.i];
        const double dj = d.values[pe.j];
        const double denom = (di - dj) * (di - dj);
        const Vec3 dir = grid.vertices[pe.j] - grid.vertices[pe.i];
        out[v].wrt_di = (-dj / denom) * dir;
        out[v].wrt_dj = (di / denom) * dir;
    }
    return out;
}

} // namespace arti
