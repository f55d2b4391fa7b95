#include "arti/point_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace arti {

PointGrid::PointGrid(const std::vector<Vec3>& points, double cell_size) : points_(points) {
    if (points_.empty()) throw std::invalid_argument("point grid requires at least one point");

    Box3 box = bounding_box(points_);
    if (cell_size <= 0.0) {
        const double diag = box.diagonal();
        const double n = static_cast<double>(points_.size());
        cell_size = diag > 0.0 ? diag / std::max(1.0, std::cbrt(n)) : 1.0;
    }
    cell_ = cell_size;
    origin_ = box.lo;
    for (int a = 0; a < 3; ++a) {
        const double span = box.hi[a] - box.lo[a];
        dims_[a] = std::max(1, static_cast<int>(std::floor(span / cell_)) + 1);
    }

    const std::size_t ncells =
        static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
    std::vector<int> counts(ncells + 1, 0);
    std::vector<int> cell_of(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) {
        int c[3];
        for (int a = 0; a < 3; ++a) {
            const auto raw = static_cast<std::int64_t>(
                std::floor((points_[i][a] - origin_[a]) / cell_));
            c[a] = static_cast<int>(std::clamp<std::int64_t>(raw, 0, dims_[a] - 1));
        }
        const int id = (c[2] * dims_[1] + c[1]) * dims_[0] + c[0];
        cell_of[i] = id;
        ++counts[id + 1];
    }
    for (std::size_t i = 1; i <= ncells; ++i) counts[i] += counts[i - 1];
    cell_start_ = counts;
    cell_items_.resize(points_.size());
    std::vector<int> cursor(cell_start_.begin(), cell_start_.end() - 1);
    for (std::size_t i = 0; i < points_.size(); ++i)
        cell_items_[cursor[cell_of[i]]++] = static_cast<int>(i); // ascending index per cell
}

std::int64_t PointGrid::cell_index(const Vec3& p, int axis) const {
    return static_cast<std::int64_t>(std::floor((p[axis] - origin_[axis]) / cell_));
}

int PointGrid::nearest(const Vec3& query) const {
    double sq;
    return nearest(query, sq);
}

int PointGrid::nearest(const Vec3& query, double& sq_dist_out) const {
    int qc[3];
    for (int a = 0; a < 3; ++a)
        qc[a] = static_cast<int>(std::clamp<std::int64_t>(cell_index(query, a), 0, dims_[a] - 1));

    int best = -1;
    double best_sq = std::numeric_limits<double>::infinity();
    const int max_ring = std::max({dims_[0], dims_[1], dims_[2]});

    for (int ring = 0; ring <= max_ring; ++ring) {
        // Cells beyond this ring are at least (ring - 1) * cell_ away. Once a
        // candidate beats that bound the scan can stop.
        if (best >= 0) {
            const double safe = (ring - 1) * cell_;
            if (safe > 0.0 && best_sq <= safe * safe) break;
        }
        for (int dz = -ring; dz <= ring; ++dz) {
            const int z = qc[2] + dz;
            if (z < 0 || z >= dims_[2]) continue;
            for (int dy = -ring; dy <= ring; ++dy) {
                const int y = qc[1] + dy;
                if (y < 0 || y >= dims_[1]) continue;
                const bool shell_zy =
                    std::abs(dz) == ring || std::abs(dy) == ring;
                const int step = shell_zy ? 1 : 2 * ring;
                for (int dx = -ring; dx <= ring; dx += std::max(1, step)) {
                    const int x = qc[0] + dx;
                    if (x < 0 || x >= dims_[0]) continue;
                    const int id = (z * dims_[1] + y) * dims_[0] + x;
                    for (int k = cell_start_[id]; k < cell_start_[id + 1]; ++k) {
                        const int idx = cell_items_[k];
                        const double sq = (points_[idx] - query).squaredNorm();
                        if (sq < best_sq || (sq == best_sq && idx < best)) {
                            best_sq = sq;
                            best = idx;
                        }
                    }
                }
            }
        }
    }
    sq_dist_out = best_sq;
    return best;
}

} // namespace arti
