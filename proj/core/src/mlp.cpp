#include "arti/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "arti/rng.hpp"

namespace arti {

namespace {

constexpr double kLeakySlope = 0.2;

// Keep every parameter exactly representable in float32 so snapshots
// round-trip bit-exactly.
double as_f32(double v) { return static_cast<double>(static_cast<float>(v)); }

} // namespace

DecoderMLP::DecoderMLP(std::vector<int> widths, int modulation_width)
    : widths_(std::move(widths)), modulation_width_(modulation_width) {
    if (widths_.size() < 2) throw std::invalid_argument("MLP needs at least one layer");
    for (int w : widths_)
        if (w < 1) throw std::invalid_argument("MLP layer widths must be positive");
    if (modulation_width_ < 0) throw std::invalid_argument("modulation width must be nonnegative");

    layers_.resize(widths_.size() - 1);
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const int in = widths_[l];
        const int out = widths_[l + 1];
        Layer& layer = layers_[l];
        layer.weight = MatX::Zero(out, in);
        layer.bias = VecX::Zero(out);
        layer.mod_scale_weight = MatX::Zero(out, modulation_width_);
        layer.mod_scale_bias = VecX::Ones(out);
        layer.mod_shift_weight = MatX::Zero(out, modulation_width_);
        layer.mod_shift_bias = VecX::Zero(out);
    }
}

DecoderMLP DecoderMLP::random(std::vector<int> widths, int modulation_width, std::uint64_t seed) {
    DecoderMLP net(std::move(widths), modulation_width);
    Rng rng(seed);
    for (Layer& layer : net.layers_) {
        const double weight_std = 1.0 / std::sqrt(static_cast<double>(layer.weight.cols()));
        for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
            for (Eigen::Index c = 0; c < layer.weight.cols(); ++c)
                layer.weight(r, c) = as_f32(weight_std * rng.normal());
        for (Eigen::Index r = 0; r < layer.bias.size(); ++r)
            layer.bias[r] = as_f32(0.01 * rng.normal());
        if (modulation_width > 0) {
            const double mod_std = 0.1 / std::sqrt(static_cast<double>(modulation_width));
            for (Eigen::Index r = 0; r < layer.mod_scale_weight.rows(); ++r)
                for (Eigen::Index c = 0; c < layer.mod_scale_weight.cols(); ++c)
                    layer.mod_scale_weight(r, c) = as_f32(mod_std * rng.normal());
            for (Eigen::Index r = 0; r < layer.mod_shift_weight.rows(); ++r)
                for (Eigen::Index c = 0; c < layer.mod_shift_weight.cols(); ++c)
                    layer.mod_shift_weight(r, c) = as_f32(mod_std * rng.normal());
        }
    }
    return net;
}

void DecoderMLP::check_shapes(const VecX& input, const VecX& modulation) const {
    if (input.size() != input_width())
        throw std::invalid_argument("MLP input width mismatch");
    if (modulation.size() != modulation_width_)
        throw std::invalid_argument("MLP modulation width mismatch");
}

VecX DecoderMLP::forward(const VecX& input, const VecX& modulation) const {
    check_shapes(input, modulation);
    VecX h = input;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const Layer& layer = layers_[l];
        VecX z = layer.weight * h + layer.bias;
        if (modulation_width_ > 0) {
            const VecX scale = layer.mod_scale_weight * modulation + layer.mod_scale_bias;
            const VecX shift = layer.mod_shift_weight * modulation + layer.mod_shift_bias;
            z = scale.cwiseProduct(z) + shift;
        }
        if (l + 1 < layers_.size())
            h = z.unaryExpr([](double v) { return v >= 0.0 ? v : kLeakySlope * v; });
        else
            h = z;
    }
    return h;
}

VecX DecoderMLP::forward_with_input_jacobian(const VecX& input, const VecX& modulation,
                                             MatX& jacobian) const {
    check_shapes(input, modulation);
    VecX h = input;
    jacobian = MatX::Identity(input_width(), input_width());
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const Layer& layer = layers_[l];
        VecX z = layer.weight * h + layer.bias;
        MatX j = layer.weight * jacobian;
        if (modulation_width_ > 0) {
            const VecX scale = layer.mod_scale_weight * modulation + layer.mod_scale_bias;
            const VecX shift = layer.mod_shift_weight * modulation + layer.mod_shift_bias;
            z = scale.cwiseProduct(z) + shift;
            j = scale.asDiagonal() * j;
        }
        if (l + 1 < layers_.size()) {
            for (Eigen::Index r = 0; r < z.size(); ++r) {
                if (z[r] >= 0.0) continue;
                z[r] *= kLeakySlope;
                j.row(r) *= kLeakySlope;
            }
        }
        h = z;
        jacobian = std::move(j);
    }
    return h;
}

std::size_t DecoderMLP::parameter_count() const {
    std::size_t n = 0;
    for (const Layer& layer : layers_)
        n += static_cast<std::size_t>(layer.weight.size()) + layer.bias.size() +
             layer.mod_scale_weight.size() + layer.mod_scale_bias.size() +
             layer.mod_shift_weight.size() + layer.mod_shift_bias.size();
    return n;
}

} // namespace arti
