#include "arti/fields.hpp"

#include <cmath>
#include <stdexcept>

#include "arti/rng.hpp"

namespace arti {

namespace {

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

std::vector<int> stack_widths(int input, int width, int layers, int output) {
    if (layers < 1) throw std::invalid_argument("network needs at least one layer");
    std::vector<int> widths;
    widths.push_back(input);
    for (int l = 0; l < layers - 1; ++l) widths.push_back(width);
    widths.push_back(output);
    return widths;
}

} // namespace

LatentCode LatentCode::gaussian(int dim, std::uint64_t geometry_seed, std::uint64_t texture_seed) {
    if (dim < 1) throw std::invalid_argument("latent dimension must be positive");
    LatentCode z;
    z.z_geo.resize(dim);
    z.z_tex.resize(dim);
    Rng geo(geometry_seed);
    Rng tex(texture_seed);
    for (int i = 0; i < dim; ++i) z.z_geo[i] = geo.normal();
    for (int i = 0; i < dim; ++i) z.z_tex[i] = tex.normal();
    return z;
}

FieldSet FieldSet::create(TriMesh template_mesh, const Params& params) {
    const Box3 body = template_mesh.bounds().inflated(1.1);
    const Box3 bounds = Box3::cube(body.center(), 0.5 * body.extent().maxCoeff());
    TriPlane geo_plane = TriPlane::random(params.plane_resolution, params.plane_channels, bounds,
                                          params.geometry_seed, params.aggregation);
    TriPlane tex_plane = TriPlane::random(params.plane_resolution, params.plane_channels, bounds,
                                          params.texture_seed + 0x9e3779b97f4a7c15ull,
                                          params.aggregation);

    const int w_dim = params.latent_dim;
    const auto mapping_widths =
        stack_widths(params.latent_dim, params.mapping_width, params.mapping_layers, w_dim);
    DecoderMLP geo_mapping = DecoderMLP::random(mapping_widths, 0, params.geometry_seed + 1);
    DecoderMLP tex_mapping = DecoderMLP::random(mapping_widths, 0, params.texture_seed + 1);

    const int feature = geo_plane.feature_size();
    DecoderMLP geo_decoder = DecoderMLP::random(
        stack_widths(feature, params.decoder_width, params.decoder_layers, 1), w_dim,
        params.geometry_seed + 2);
    DecoderMLP tex_decoder = DecoderMLP::random(
        stack_widths(feature, params.decoder_width, params.decoder_layers, 3), 2 * w_dim,
        params.texture_seed + 2);

    double scale = params.offset_scale;
    if (scale <= 0.0) scale = 0.1 * template_mesh.bounds().diagonal();

    return FieldSet(std::move(template_mesh), std::move(geo_plane), std::move(tex_plane),
                    std::move(geo_mapping), std::move(tex_mapping), std::move(geo_decoder),
                    std::move(tex_decoder), scale, params);
}

FieldSet::FieldSet(TriMesh template_mesh, TriPlane geometry_plane, TriPlane texture_plane,
                   DecoderMLP geometry_mapping, DecoderMLP texture_mapping,
                   DecoderMLP geometry_decoder, DecoderMLP texture_decoder, double offset_scale,
                   Params params)
    : template_mesh_(std::move(template_mesh)),
      geometry_plane_(std::move(geometry_plane)),
      texture_plane_(std::move(texture_plane)),
      geometry_mapping_(std::move(geometry_mapping)),
      texture_mapping_(std::move(texture_mapping)),
      geometry_decoder_(std::move(geometry_decoder)),
      texture_decoder_(std::move(texture_decoder)),
      offset_scale_(offset_scale),
      params_(params) {
    if (!template_mesh_.is_closed_orientable())
        throw std::invalid_argument("field template mesh must be closed and orientable");
    if (geometry_plane_.resolution() != texture_plane_.resolution() ||
        geometry_plane_.channels() != texture_plane_.channels())
        throw std::invalid_argument("geometry and texture planes must share N and C");
    if (geometry_decoder_.input_width() != geometry_plane_.feature_size())
        throw std::invalid_argument("geometry decoder input width must match plane features");
    if (texture_decoder_.input_width() != texture_plane_.feature_size())
        throw std::invalid_argument("texture decoder input width must match plane features");
    if (geometry_decoder_.output_width() != 1)
        throw std::invalid_argument("geometry decoder must output one channel");
    if (texture_decoder_.output_width() != 3)
        throw std::invalid_argument("texture decoder must output three channels");
    if (geometry_mapping_.output_width() != geometry_decoder_.modulation_width())
        throw std::invalid_argument("geometry mapping output must match decoder conditioning");
    if (geometry_mapping_.output_width() + texture_mapping_.output_width() !=
        texture_decoder_.modulation_width())
        throw std::invalid_argument("texture decoder conditioning must take both latents");
    if (!(offset_scale_ > 0.0)) throw std::invalid_argument("offset scale must be positive");
    template_distance_ = std::make_shared<MeshDistance>(template_mesh_);
}

IntermediateLatent FieldSet::map(const LatentCode& z) const {
    IntermediateLatent w;
    w.w_geo = geometry_mapping_.forward(z.z_geo);
    w.w_tex = texture_mapping_.forward(z.z_tex);
    return w;
}

double FieldSet::template_distance(const Vec3& x) const {
    return template_distance_->query(x).distance;
}

Vec3 FieldSet::template_gradient(const Vec3& x) const {
    return template_distance_->query(x).gradient;
}

double FieldSet::sdf(const VecX& w_geo, const Vec3& x) const {
    const VecX feature = geometry_plane_.sample(x);
    const double raw = geometry_decoder_.forward(feature, w_geo)[0];
    return template_distance(x) + offset_scale_ * std::tanh(raw);
}

Vec3 FieldSet::color(const IntermediateLatent& w, const Vec3& x) const {
    const VecX feature = texture_plane_.sample(x);
    VecX modulation(w.w_geo.size() + w.w_tex.size());
    modulation << w.w_geo, w.w_tex;
    const VecX out = texture_decoder_.forward(feature, modulation);
    return Vec3(sigmoid(out[0]), sigmoid(out[1]), sigmoid(out[2]));
}

Vec3 FieldSet::normal(const VecX& w_geo, const Vec3& x, NormalMode mode, double step) const {
    if (mode == NormalMode::kFiniteDifference) {
        const double h = step > 0.0 ? step : default_fd_step();
        Vec3 g;
        for (int axis = 0; axis < 3; ++axis) {
            Vec3 hi = x, lo = x;
            hi[axis] += h;
            lo[axis] -= h;
            g[axis] = (sdf(w_geo, hi) - sdf(w_geo, lo)) / (2.0 * h);
        }
        return g;
    }

    Eigen::Matrix<double, Eigen::Dynamic, 3> sample_jac;
    const VecX feature = geometry_plane_.sample_with_grad(x, sample_jac);
    MatX decoder_jac;
    const VecX raw = geometry_decoder_.forward_with_input_jacobian(feature, w_geo, decoder_jac);
    const double t = std::tanh(raw[0]);
    const Vec3 offset_grad =
        offset_scale_ * (1.0 - t * t) * (decoder_jac * sample_jac).row(0).transpose();
    return template_gradient(x) + offset_grad;
}

} // namespace arti
