#include "arti/camera.hpp"

#include <cmath>
#include <stdexcept>

namespace arti {

namespace {

// Reduce to [0, 2*pi). fmod is exact, so azimuth values that differ by an
// exactly-representable multiple of 2*pi produce bit-identical cameras.
double reduce_angle(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    return r;
}

} // namespace

Vec3 Camera::position() const {
    const double az = reduce_angle(azimuth);
    const double ca = std::cos(az), sa = std::sin(az);
    const double ce = std::cos(elevation), se = std::sin(elevation);
    return radius * Vec3(sa * ce, se, ca * ce);
}

Affine3 Camera::view() const {
    const Vec3 pos = position();
    const Vec3 z_cam = pos.normalized();  // camera looks down -z_cam
    const Vec3 up(0.0, 1.0, 0.0);
    const Vec3 x_cam = up.cross(z_cam).normalized();
    const Vec3 y_cam = z_cam.cross(x_cam);
    Affine3 v;
    v.linear.row(0) = x_cam;
    v.linear.row(1) = y_cam;
    v.linear.row(2) = z_cam;
    v.translation = -(v.linear * pos);
    return v;
}

bool Camera::project(const Vec3& view_point, Vec2& pixel, double& depth) const {
    depth = -view_point.z();
    if (depth <= 0.0) return false;
    const double t = tan_half_fov();
    const double x_ndc = view_point.x() / (depth * t * aspect());
    const double y_ndc = view_point.y() / (depth * t);
    pixel.x() = (x_ndc + 1.0) * 0.5 * width;
    pixel.y() = (1.0 - y_ndc) * 0.5 * height;
    return true;
}

Camera make_camera(double radius, double azimuth, double elevation, double fov_deg, int width,
                   int height) {
    if (!(radius > 0.0)) throw std::invalid_argument("camera radius must be positive");
    if (!(fov_deg > 0.0 && fov_deg < 180.0))
        throw std::invalid_argument("camera fov must lie in (0, 180) degrees");
    if (width < 1 || height < 1)
        throw std::invalid_argument("camera resolution must be at least 1x1");
    if (!(std::abs(elevation) < 0.5 * kPi))
        throw std::invalid_argument("camera elevation must satisfy |elevation| < pi/2");
    Camera c;
    c.radius = radius;
    c.azimuth = azimuth;
    c.elevation = elevation;
    c.fov_deg = fov_deg;
    c.width = width;
    c.height = height;
    return c;
}

} // namespace arti
