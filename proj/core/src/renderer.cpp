#include "arti/renderer.hpp"

#include <atomic>
#include <cmath>

#include "arti/threading.hpp"

namespace arti {

namespace {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

struct ProjectedFace {
    Vec2 p[3];
    double inv_depth[3];
    int v[3];
    int min_row = 0, max_row = -1;  // inclusive pixel-row range
    int min_col = 0, max_col = -1;
    double area2 = 0.0;  // negative for front faces (pixel y points down)
};

} // namespace

std::size_t RenderBuffers::covered_count() const {
    std::size_t n = 0;
    for (std::uint8_t m : mask) n += m;
    return n;
}

RenderBuffers rasterize(const TriMesh& mesh, const Camera& camera, int threads) {
    RenderBuffers buf;
    buf.width = camera.width;
    buf.height = camera.height;
    const std::size_t pixels = buf.pixel_count();
    buf.mask.assign(pixels, 0);
    buf.depth.assign(pixels, std::numeric_limits<double>::infinity());
    buf.coord.assign(pixels, Vec3::Zero());
    buf.face_id.assign(pixels, -1);
    buf.bary.assign(pixels, Vec3::Zero());
    buf.rgb.assign(pixels, Vec3::Zero());
    buf.normal.assign(pixels, Vec3::Zero());
    if (mesh.empty()) return buf;

    const Affine3 view = camera.view();
    std::vector<Vec2> pixel(mesh.vertices.size());
    std::vector<double> depth(mesh.vertices.size());
    std::vector<bool> projectable(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
        projectable[i] = camera.project(view.apply(mesh.vertices[i]), pixel[i], depth[i]);

    // Front faces wind clockwise in pixel coordinates (the y flip reverses
    // the world CCW orientation), so area2 < 0; nonnegative area is a back
    // face or degenerate.
    std::vector<ProjectedFace> faces;
    faces.reserve(mesh.faces.size());
    std::vector<int> face_ids;
    face_ids.reserve(mesh.faces.size());
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const Face& face = mesh.faces[f];
        bool usable = true;
        for (int k = 0; k < 3; ++k)
            usable = usable && projectable[face[k]] && depth[face[k]] > camera.near_plane &&
                     depth[face[k]] <= camera.far_plane;
        if (!usable) {
            ++buf.diagnostics.clipped_faces;
            continue;
        }
        ProjectedFace pf;
        for (int k = 0; k < 3; ++k) {
            pf.p[k] = pixel[face[k]];
            pf.inv_depth[k] = 1.0 / depth[face[k]];
            pf.v[k] = face[k];
        }
        pf.area2 = cross2(pf.p[1] - pf.p[0], pf.p[2] - pf.p[0]);
        if (!(pf.area2 < -1e-12)) continue;  // back face or tiny projection

        const double ymin = std::min({pf.p[0].y(), pf.p[1].y(), pf.p[2].y()});
        const double ymax = std::max({pf.p[0].y(), pf.p[1].y(), pf.p[2].y()});
        const double xmin = std::min({pf.p[0].x(), pf.p[1].x(), pf.p[2].x()});
        const double xmax = std::max({pf.p[0].x(), pf.p[1].x(), pf.p[2].x()});
        pf.min_row = std::max(0, static_cast<int>(std::floor(ymin - 0.5)));
        pf.max_row = std::min(camera.height - 1, static_cast<int>(std::ceil(ymax - 0.5)));
        pf.min_col = std::max(0, static_cast<int>(std::floor(xmin - 0.5)));
        pf.max_col = std::min(camera.width - 1, static_cast<int>(std::ceil(xmax - 0.5)));
        if (pf.min_row > pf.max_row || pf.min_col > pf.max_col) continue;
        faces.push_back(pf);
        face_ids.push_back(static_cast<int>(f));
    }

    // Row bands only write their own pixels, so the output cannot depend on
    // the band partition or scheduling.
    parallel_chunks(static_cast<std::size_t>(camera.height), threads,
                    [&](std::size_t row_begin, std::size_t row_end) {
        for (std::size_t fi = 0; fi < faces.size(); ++fi) {
            const ProjectedFace& pf = faces[fi];
            const int fid = face_ids[fi];
            const int r0 = std::max(pf.min_row, static_cast<int>(row_begin));
            const int r1 = std::min(pf.max_row, static_cast<int>(row_end) - 1);
            for (int row = r0; row <= r1; ++row) {
                for (int col = pf.min_col; col <= pf.max_col; ++col) {
                    const Vec2 q(col + 0.5, row + 0.5);
                    const double e0 = cross2(pf.p[2] - pf.p[1], q - pf.p[1]);
                    const double e1 = cross2(pf.p[0] - pf.p[2], q - pf.p[2]);
                    const double e2 = cross2(pf.p[1] - pf.p[0], q - pf.p[0]);
                    if (e0 > 0.0 || e1 > 0.0 || e2 > 0.0) continue;  // inclusive edges
                    const double l0 = e0 / pf.area2;
                    const double l1 = e1 / pf.area2;
                    const double l2 = e2 / pf.area2;
                    const double denom =
                        l0 * pf.inv_depth[0] + l1 * pf.inv_depth[1] + l2 * pf.inv_depth[2];
                    const double d = 1.0 / denom;
                    const std::size_t px = static_cast<std::size_t>(row) * camera.width + col;
                    if (d > buf.depth[px] ||
                        (d == buf.depth[px] && fid >= buf.face_id[px] && buf.face_id[px] >= 0))
                        continue;
                    const Vec3 mu(l0 * pf.inv_depth[0] * d, l1 * pf.inv_depth[1] * d,
                                  l2 * pf.inv_depth[2] * d);
                    buf.mask[px] = 1;
                    buf.depth[px] = d;
                    buf.face_id[px] = fid;
                    buf.bary[px] = mu;
                    buf.coord[px] = mu[0] * mesh.vertices[pf.v[0]] +
                                    mu[1] * mesh.vertices[pf.v[1]] +
                                    mu[2] * mesh.vertices[pf.v[2]];
                }
            }
        }
    });
    return buf;
}

void shade(RenderBuffers& buffers, const TriMesh& mesh, const PosedBody* posed,
           const FieldSet& fields, const IntermediateLatent& w, const Camera& camera,
           NormalMode normal_mode, int threads) {
    const Affine3 view = camera.view();
    std::atomic<std::int64_t> degenerate{0};
    std::atomic<std::int64_t> zero_grad{0};

    parallel_for(buffers.pixel_count(), threads, [&](std::size_t px) {
        if (!buffers.mask[px]) return;
        const Vec3 x_d = buffers.coord[px];

        Vec3 x_c = x_d;
        int guide = -1;
        if (posed) {
            try {
                const PosedBody::Warp warp = posed->inverse_warp(x_d);
                x_c = warp.canonical;
                guide = warp.nearest;
            } catch (const std::runtime_error&) {
                degenerate.fetch_add(1, std::memory_order_relaxed);
            }
        }

        buffers.rgb[px] = fields.color(w, x_c);

        Vec3 n_deformed;
        const Vec3 grad = fields.normal(w.w_geo, x_c, normal_mode);
        if (grad.norm() < 1e-8 || (posed && guide < 0)) {
            if (grad.norm() < 1e-8) zero_grad.fetch_add(1, std::memory_order_relaxed);
            n_deformed = mesh.face_normal(buffers.face_id[px]);
        } else if (posed) {
            n_deformed = posed->skin_normal(grad, guide);
        } else {
            n_deformed = grad.normalized();
        }

        const Vec3 n_cam = view.linear * n_deformed;
        buffers.normal[px] = 0.5 * (n_cam + Vec3::Ones());
    });

    buffers.diagnostics.degenerate_blend_pixels += degenerate.load();
    buffers.diagnostics.zero_gradient_pixels += zero_grad.load();
}

} // namespace arti
