#include "arti/triplane.hpp"

#include <cmath>
#include <stdexcept>

#include "arti/rng.hpp"

namespace arti {

namespace {

// Which world axes feed each plane's (u, v) coordinates.
constexpr int kPlaneAxes[3][2] = {{0, 1}, {0, 2}, {1, 2}};

struct PlaneCoord {
    int cell = 0;       // lower node of the containing cell, in [0, N-2]
    double frac = 0.0;  // position within the cell, in [0, 1]
    bool interior = true;  // false when the raw coordinate was clamped
};

// Map a world coordinate to grid space [0, N-1] and pick the containing
// cell. Points exactly on a shared node belong to the LOWER cell so the
// (discontinuous) gradient is deterministic there; the value is continuous
// either way.
PlaneCoord locate(double world, double lo, double hi, int n) {
    PlaneCoord pc;
    const double g = (world - lo) / (hi - lo) * (n - 1);
    if (g <= 0.0) {
        pc.cell = 0;
        pc.frac = 0.0;
        pc.interior = g >= 0.0;
        return pc;
    }
    if (g >= n - 1) {
        pc.cell = n - 2;
        pc.frac = 1.0;
        pc.interior = g <= n - 1;
        return pc;
    }
    int cell = static_cast<int>(std::ceil(g)) - 1;
    if (cell < 0) cell = 0;
    if (cell > n - 2) cell = n - 2;
    pc.cell = cell;
    pc.frac = g - cell;
    return pc;
}

} // namespace

TriPlane::TriPlane(int resolution, int channels, const Box3& bounds, Aggregation aggregation)
    : n_(resolution), c_(channels), bounds_(bounds), aggregation_(aggregation) {
    if (resolution < 2) throw std::invalid_argument("triplane resolution must be at least 2");
    if (channels < 1) throw std::invalid_argument("triplane channel count must be at least 1");
    if (!bounds.valid()) throw std::invalid_argument("triplane bounds must be non-empty");
    for (auto& plane : planes_)
        plane.assign(static_cast<std::size_t>(n_) * n_ * c_, 0.0f);
}

TriPlane TriPlane::random(int resolution, int channels, const Box3& bounds, std::uint64_t seed,
                          Aggregation aggregation) {
    TriPlane tp(resolution, channels, bounds, aggregation);
    Rng rng(seed);
    for (auto& plane : tp.planes_)
        for (float& f : plane) f = static_cast<float>(rng.normal());
    return tp;
}

double TriPlane::cell_size() const { return bounds_.extent().x() / (n_ - 1); }

float TriPlane::at(int plane, int row, int col, int channel) const {
    return planes_[plane][(static_cast<std::size_t>(row) * n_ + col) * c_ + channel];
}

void TriPlane::set(int plane, int row, int col, int channel, float value) {
    planes_[plane][(static_cast<std::size_t>(row) * n_ + col) * c_ + channel] = value;
}

VecX TriPlane::sample(const Vec3& x) const {
    Eigen::Matrix<double, Eigen::Dynamic, 3> jac;
    return sample_with_grad(x, jac, nullptr);
}

VecX TriPlane::sample_with_grad(const Vec3& x, Eigen::Matrix<double, Eigen::Dynamic, 3>& jacobian,
                                std::vector<Tap>* taps) const {
    const Vec3 lo = bounds_.lo;
    const Vec3 hi = bounds_.hi;
    VecX feature = VecX::Zero(feature_size());
    jacobian.setZero(feature_size(), 3);
    if (taps) {
        taps->clear();
        taps->reserve(12);
    }

    for (int p = 0; p < 3; ++p) {
        const int au = kPlaneAxes[p][0];
        const int av = kPlaneAxes[p][1];
        const PlaneCoord u = locate(x[au], lo[au], hi[au], n_);
        const PlaneCoord v = locate(x[av], lo[av], hi[av], n_);

        const double w00 = (1.0 - u.frac) * (1.0 - v.frac);
        const double w10 = u.frac * (1.0 - v.frac);
        const double w01 = (1.0 - u.frac) * v.frac;
        const double w11 = u.frac * v.frac;
        if (taps) {
            taps->push_back({p, v.cell * n_ + u.cell, w00});
            taps->push_back({p, v.cell * n_ + u.cell + 1, w10});
            taps->push_back({p, (v.cell + 1) * n_ + u.cell, w01});
            taps->push_back({p, (v.cell + 1) * n_ + u.cell + 1, w11});
        }

        // Grid-space derivative scale per world unit; zero where the query
        // was clamped to the boundary (the field is constant outside).
        const double du_scale = u.interior ? (n_ - 1) / (hi[au] - lo[au]) : 0.0;
        const double dv_scale = v.interior ? (n_ - 1) / (hi[av] - lo[av]) : 0.0;

        const int offset = aggregation_ == kSum ? 0 : p * c_;
        for (int ch = 0; ch < c_; ++ch) {
            const double f00 = at(p, v.cell, u.cell, ch);
            const double f10 = at(p, v.cell, u.cell + 1, ch);
            const double f01 = at(p, v.cell + 1, u.cell, ch);
            const double f11 = at(p, v.cell + 1, u.cell + 1, ch);
            feature[offset + ch] += w00 * f00 + w10 * f10 + w01 * f01 + w11 * f11;
            const double dfu = (1.0 - v.frac) * (f10 - f00) + v.frac * (f11 - f01);
            const double dfv = (1.0 - u.frac) * (f01 - f00) + u.frac * (f11 - f10);
            jacobian(offset + ch, au) += dfu * du_scale;
            jacobian(offset + ch, av) += dfv * dv_scale;
        }
    }
    return feature;
}

} // namespace arti
