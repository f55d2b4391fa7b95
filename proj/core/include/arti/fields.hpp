#pragma once

#include <cstdint>
#include <memory>

#include "arti/geometry.hpp"
#include "arti/mesh_distance.hpp"
#include "arti/mlp.hpp"
#include "arti/trimesh.hpp"
#include "arti/triplane.hpp"

namespace arti {

/// Gaussian input latents for the geometry and texture branches.
struct LatentCode {
    VecX z_geo;
    VecX z_tex;

    static LatentCode gaussian(int dim, std::uint64_t geometry_seed, std::uint64_t texture_seed);
};

/// Mapping-network outputs conditioning the decoders.
struct IntermediateLatent {
    VecX w_geo;
    VecX w_tex;
};

enum class NormalMode { kAnalytic, kFiniteDifference };

/// Canonical-space fields: a signed distance predicted as a bounded offset
/// from a fixed template surface, plus a texture field. Geometry reads only
/// the geometry plane/latent, texture reads the texture plane conditioned on
/// both latents, so re-texturing cannot move the surface.
class FieldSet {
public:
    struct Params {
        int plane_resolution = 64;
        int plane_channels = 16;
        int latent_dim = 16;
        int mapping_width = 32;
        int mapping_layers = 3;
        int decoder_width = 64;
        int decoder_layers = 3;
        double offset_scale = 0.0;  // <= 0: 0.1 x template bounding-box diagonal
        TriPlane::Aggregation aggregation = TriPlane::kSum;
        std::uint64_t geometry_seed = 1;
        std::uint64_t texture_seed = 2;
    };

    /// Seeded construction; the template must be closed and orientable.
    static FieldSet create(TriMesh template_mesh, const Params& params);

    /// Assemble from explicit parts (snapshot load path). Validates shape
    /// consistency and template closedness.
    FieldSet(TriMesh template_mesh, TriPlane geometry_plane, TriPlane texture_plane,
             DecoderMLP geometry_mapping, DecoderMLP texture_mapping,
             DecoderMLP geometry_decoder, DecoderMLP texture_decoder, double offset_scale,
             Params params);

    IntermediateLatent map(const LatentCode& z) const;

    double template_distance(const Vec3& x) const;
    Vec3 template_gradient(const Vec3& x) const;

    /// d(x) = template_distance(x) + scale * tanh(decoder(plane features; w)).
    double sdf(const VecX& w_geo, const Vec3& x) const;

    /// RGB in [0,1] via the logistic squash of the texture decoder output.
    Vec3 color(const IntermediateLatent& w, const Vec3& x) const;

    /// Raw (unnormalized) spatial gradient of sdf. Analytic mode chains the
    /// bilinear sample jacobian through the decoder; finite-difference mode
    /// uses central differences with the given step (0 = default_fd_step()).
    Vec3 normal(const VecX& w_geo, const Vec3& x, NormalMode mode = NormalMode::kAnalytic,
                double step = 0.0) const;

    /// Half the geometry-plane cell size: FD below the cell probes the same
    /// bilinear patch.
    double default_fd_step() const { return 0.5 * geometry_plane_.cell_size(); }

    const TriMesh& template_mesh() const { return template_mesh_; }
    const TriPlane& geometry_plane() const { return geometry_plane_; }
    TriPlane& geometry_plane() { return geometry_plane_; }
    const TriPlane& texture_plane() const { return texture_plane_; }
    TriPlane& texture_plane() { return texture_plane_; }
    const DecoderMLP& geometry_mapping() const { return geometry_mapping_; }
    const DecoderMLP& texture_mapping() const { return texture_mapping_; }
    const DecoderMLP& geometry_decoder() const { return geometry_decoder_; }
    const DecoderMLP& texture_decoder() const { return texture_decoder_; }
    double offset_scale() const { return offset_scale_; }
    int latent_dim() const { return geometry_mapping_.input_width(); }
    const Params& params() const { return params_; }

private:
    TriMesh template_mesh_;
    TriPlane geometry_plane_;
    TriPlane texture_plane_;
    DecoderMLP geometry_mapping_;
    DecoderMLP texture_mapping_;
    DecoderMLP geometry_decoder_;
    DecoderMLP texture_decoder_;
    double offset_scale_ = 0.0;
    Params params_;
    std::shared_ptr<const MeshDistance> template_distance_;
};

} // namespace arti
