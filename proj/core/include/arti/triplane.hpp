#pragma once

#include <cstdint>
#include <vector>

#include "arti/geometry.hpp"

namespace arti {

/// Three axis-aligned feature planes (XY, XZ, YZ) spanning a cubic region.
/// Each plane is an N x N grid of C-channel float32 features; queries project
/// the point onto each plane, bilinearly interpolate, and sum the three
/// results (aggregation is switchable to concatenation).
class TriPlane {
public:
    enum Aggregation { kSum, kConcat };

    struct Tap {
        int plane = 0;  // 0 = XY, 1 = XZ, 2 = YZ
        int node = 0;   // row-major node index (v * N + u)
        double weight = 0.0;
    };

    /// Zero-initialized planes.
    TriPlane(int resolution, int channels, const Box3& bounds,
             Aggregation aggregation = kSum);

    /// Seeded Gaussian init (standard normal per feature).
    static TriPlane random(int resolution, int channels, const Box3& bounds,
                           std::uint64_t seed, Aggregation aggregation = kSum);

    int resolution() const { return n_; }
    int channels() const { return c_; }
    /// Channels of the vector sample() returns (C for sum, 3C for concat).
    int feature_size() const { return aggregation_ == kSum ? c_ : 3 * c_; }
    const Box3& bounds() const { return bounds_; }
    Aggregation aggregation() const { return aggregation_; }
    double cell_size() const;

    float at(int plane, int row, int col, int channel) const;
    void set(int plane, int row, int col, int channel, float value);
    const std::vector<float>& plane_data(int plane) const { return planes_[plane]; }
    std::vector<float>& plane_data(int plane) { return planes_[plane]; }

    VecX sample(const Vec3& x) const;

    /// Jacobian rows follow sample()'s channels; columns are world x,y,z.
    /// taps gets 12 entries (4 bilinear corners x 3 planes); the 4 weights of
    /// each plane sum to 1.
    VecX sample_with_grad(const Vec3& x, Eigen::Matrix<double, Eigen::Dynamic, 3>& jacobian,
                          std::vector<Tap>* taps = nullptr) const;

private:
    int n_ = 0;
    int c_ = 0;
    Box3 bounds_;
    Aggregation aggregation_ = kSum;
    std::vector<float> planes_[3];  // row-major (v * N + u) * C + channel
};

} // namespace arti
