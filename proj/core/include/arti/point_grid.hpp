#pragma once

#include <cstdint>
#include <vector>

#include "arti/geometry.hpp"

namespace arti {

/// Uniform grid over a point set for exact nearest-neighbor queries.
/// Ties are broken toward the lowest point index, matching an exhaustive
/// scan with the same rule.
class PointGrid {
public:
    /// cell_size <= 0 picks a density-based default.
    explicit PointGrid(const std::vector<Vec3>& points, double cell_size = 0.0);

    int nearest(const Vec3& query) const;
    int nearest(const Vec3& query, double& sq_dist_out) const;

    std::size_t size() const { return points_.size(); }
    double cell_size() const { return cell_; }

private:
    std::int64_t cell_index(const Vec3& p, int axis) const;

    std::vector<Vec3> points_;
    Vec3 origin_ = Vec3::Zero();
    double cell_ = 1.0;
    int dims_[3] = {1, 1, 1};
    std::vector<int> cell_start_; // CSR offsets, dims x*y*z + 1
    std::vector<int> cell_items_; // point indices, ascending inside each cell
};

} // namespace arti
