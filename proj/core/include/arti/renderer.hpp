#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "arti/body_model.hpp"
#include "arti/camera.hpp"
#include "arti/fields.hpp"
#include "arti/geometry.hpp"
#include "arti/trimesh.hpp"

namespace arti {

/// Per-pixel render outputs, row-major from the top-left. A pixel is covered
/// (mask 1) iff its depth is finite iff its face_id is valid; coord/bary are
/// meaningful only there.
struct RenderBuffers {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> mask;  // 0/1
    std::vector<double> depth;       // positive view-axis distance, +inf empty
    std::vector<Vec3> coord;         // deformed-space surface point
    std::vector<int> face_id;        // -1 empty
    std::vector<Vec3> bary;          // perspective-correct barycentrics
    std::vector<Vec3> rgb;           // [0,1], shaded pixels only
    std::vector<Vec3> normal;        // camera-space normal encoded (n+1)/2

    struct Diagnostics {
        std::int64_t degenerate_blend_pixels = 0;
        std::int64_t zero_gradient_pixels = 0;
        std::int64_t clipped_faces = 0;
    };
    Diagnostics diagnostics;

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
    std::size_t covered_count() const;
    bool covered(int x, int y) const { return mask[static_cast<std::size_t>(y) * width + x] != 0; }
};

/// Z-buffered rasterization of the geometry channels (mask, depth, coord,
/// face_id, barycentrics). Pixel centers sample at (i+0.5, j+0.5); depth
/// ties break toward the lower face index; back faces are culled; faces with
/// any vertex at or behind the near plane are skipped (counted in
/// diagnostics). Output is independent of the thread count.
RenderBuffers rasterize(const TriMesh& mesh, const Camera& camera, int threads = 1);

/// Fills rgb + normal for covered pixels by un-warping each pixel's surface
/// point to canonical space (identity when posed == nullptr) and querying
/// the fields. Pixels with a degenerate blend or a near-zero field gradient
/// fall back to the geometric face normal and are counted in diagnostics.
void shade(RenderBuffers& buffers, const TriMesh& mesh, const PosedBody* posed,
           const FieldSet& fields, const IntermediateLatent& w, const Camera& camera,
           NormalMode normal_mode = NormalMode::kAnalytic, int threads = 1);

} // namespace arti
