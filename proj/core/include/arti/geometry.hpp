#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cmath>
#include <limits>
#include <vector>

namespace arti {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using VecX = Eigen::VectorXd;

using Face = std::array<int, 3>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Axis-aligned box. Most callers use cubical boxes; nothing here assumes it.
struct Box3 {
    Vec3 lo{0, 0, 0};
    Vec3 hi{0, 0, 0};

    static Box3 cube(const Vec3& center, double half) {
        return {center - Vec3::Constant(half), center + Vec3::Constant(half)};
    }
    static Box3 empty() {
        const double inf = std::numeric_limits<double>::infinity();
        return {Vec3::Constant(inf), Vec3::Constant(-inf)};
    }

    Vec3 extent() const { return hi - lo; }
    Vec3 center() const { return 0.5 * (lo + hi); }
    double diagonal() const { return extent().norm(); }
    bool valid() const { return (hi.array() >= lo.array()).all(); }

    void expand(const Vec3& p) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    Box3 inflated(double factor) const {
        const Vec3 c = center();
        const Vec3 h = 0.5 * extent() * factor;
        return {c - h, c + h};
    }
    Vec3 clamp(const Vec3& p) const { return p.cwiseMax(lo).cwiseMin(hi); }
    bool contains(const Vec3& p) const {
        return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
    }
    /// Squared distance from p to the box (0 inside).
    double sq_dist(const Vec3& p) const {
        const Vec3 d = (lo - p).cwiseMax(0.0).cwiseMax(p - hi);
        return d.squaredNorm();
    }
};

inline Box3 bounding_box(const std::vector<Vec3>& pts) {
    Box3 b = Box3::empty();
    for (const Vec3& p : pts) b.expand(p);
    return b;
}

/// Axis-angle to rotation matrix. Zero-norm vectors map to the identity.
inline Mat3 axis_angle_to_matrix(const Vec3& aa) {
    const double angle = aa.norm();
    if (angle < 1e-300) return Mat3::Identity();
    return Eigen::AngleAxisd(angle, aa / angle).toRotationMatrix();
}

/// Rigid/affine transform as rotation-ish 3x3 plus translation. Kept separate
/// from Mat4 so inverses and compositions stay exact for pure translations.
struct Affine3 {
    Mat3 linear = Mat3::Identity();
    Vec3 translation = Vec3::Zero();

    static Affine3 identity() { return {}; }

    Vec3 apply(const Vec3& p) const { return linear * p + translation; }
    Vec3 apply_vector(const Vec3& v) const { return linear * v; }

    Affine3 compose(const Affine3& rhs) const {
        // this ∘ rhs
        return {linear * rhs.linear, linear * rhs.translation + translation};
    }
    Affine3 inverse() const {
        const Mat3 inv = linear.inverse();
        return {inv, -(inv * translation)};
    }
    double det() const { return linear.determinant(); }

    Mat4 matrix() const {
        Mat4 m = Mat4::Identity();
        m.topLeftCorner<3, 3>() = linear;
        m.topRightCorner<3, 1>() = translation;
        return m;
    }
};

} // namespace arti
