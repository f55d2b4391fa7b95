#pragma once

#include <cstdint>
#include <vector>

#include "arti/geometry.hpp"

namespace arti {

using MatX = Eigen::MatrixXd;

/// Fully connected network with leaky-ReLU(0.2) hidden layers and a linear
/// output layer. Layers may be modulated: a conditioning vector w is mapped
/// by per-layer affines to a scale and shift applied to the pre-activation.
/// Parameters are float32 values held in doubles (evaluation runs in double,
/// snapshots store float32 and round-trip bit-exactly).
class DecoderMLP {
public:
    struct Layer {
        MatX weight;            // out x in
        VecX bias;              // out
        MatX mod_scale_weight;  // out x mod_width (0 cols when unmodulated)
        VecX mod_scale_bias;    // out, identity init = 1
        MatX mod_shift_weight;  // out x mod_width
        VecX mod_shift_bias;    // out, identity init = 0
    };

    /// Zero weights/biases, identity modulation (scale 1, shift 0).
    DecoderMLP(std::vector<int> widths, int modulation_width = 0);

    /// Seeded init: weights ~ N(0, 1/fan_in); modulation affines a small
    /// perturbation of the identity so conditioning has effect at init.
    static DecoderMLP random(std::vector<int> widths, int modulation_width, std::uint64_t seed);

    int input_width() const { return widths_.front(); }
    int output_width() const { return widths_.back(); }
    int modulation_width() const { return modulation_width_; }
    int layer_count() const { return static_cast<int>(layers_.size()); }
    const std::vector<int>& widths() const { return widths_; }
    const Layer& layer(int i) const { return layers_[i]; }
    Layer& layer(int i) { return layers_[i]; }

    /// modulation must have modulation_width() entries (pass empty for
    /// unmodulated networks).
    VecX forward(const VecX& input, const VecX& modulation = VecX()) const;

    /// Also returns d(output)/d(input) for the fixed modulation, exact for
    /// the piecewise-linear network away from activation kinks.
    VecX forward_with_input_jacobian(const VecX& input, const VecX& modulation,
                                     MatX& jacobian) const;

    std::size_t parameter_count() const;

private:
    void check_shapes(const VecX& input, const VecX& modulation) const;

    std::vector<int> widths_;
    int modulation_width_ = 0;
    std::vector<Layer> layers_;
};

} // namespace arti
