#pragma once

#include "arti/geometry.hpp"

namespace arti {

/// Orbit camera: positioned on a sphere of `radius` about the origin,
/// looking at the origin with +y up. Azimuth 0, elevation 0 places the
/// camera at (0, 0, radius) looking down -z; azimuth rotates about +y,
/// elevation lifts toward +y. Perspective projection with vertical FOV in
/// degrees, near 0.05, far 100.
struct Camera {
    double radius = 2.3;
    double azimuth = 0.0;    // radians, reduced mod 2*pi
    double elevation = 0.0;  // radians, |elevation| < pi/2
    double fov_deg = 49.13;
    int width = 256;
    int height = 256;
    double near_plane = 0.05;
    double far_plane = 100.0;

    Vec3 position() const;

    /// World -> view. In view space the camera looks down -z, +x right,
    /// +y up; visible points have negative z.
    Affine3 view() const;

    double tan_half_fov() const { return std::tan(0.5 * fov_deg * kPi / 180.0); }
    double aspect() const { return static_cast<double>(width) / height; }

    /// View-space point -> pixel coordinates (origin top-left, y down) and
    /// positive view-axis distance. Returns false behind the camera.
    bool project(const Vec3& view_point, Vec2& pixel, double& depth) const;
};

Camera make_camera(double radius, double azimuth, double elevation, double fov_deg, int width,
                   int height);

} // namespace arti
