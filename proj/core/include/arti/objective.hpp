#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "arti/fields.hpp"
#include "arti/renderer.hpp"
#include "arti/tet_grid.hpp"

namespace arti {

struct LossWeights {
    double lambda_eik = 0.001;
    double lambda_ce = 0.01;
};

struct FitConfig {
    int iterations = 200;
    double step = 0.1;
    bool momentum = false;
    double momentum_coeff = 0.9;
    std::uint64_t seed = 0;
    double convergence = 0.0;  // stop when |loss drop| < this (0 = never)
    int log_every = 10;
};

/// Area-weighted uniform samples on the extracted surface.
struct SurfaceSamples {
    std::vector<Vec3> deformed;
    std::vector<Vec3> canonical;  // inverse-warped (equal to deformed when unposed)
    std::vector<int> face;
    std::vector<Vec3> bary;
};
SurfaceSamples sample_surface_points(const ExtractedMesh& mesh, std::size_t count,
                                     std::uint64_t seed, const PosedBody* posed = nullptr);

/// Mean over points of (|grad(x)| - 1)^2. The gradient functor form lets
/// analytic oracles plug in directly.
double eikonal_loss(const std::vector<Vec3>& points,
                    const std::function<Vec3(const Vec3&)>& gradient);
double eikonal_loss(const std::vector<Vec3>& points, const FieldSet& fields, const VecX& w_geo,
                    NormalMode mode = NormalMode::kAnalytic);

/// Binary cross-entropy between each crossing edge's endpoint sign
/// probabilities and the opposite endpoint's sign, summed over S_e (or
/// averaged with normalized = true).
double sdf_cross_entropy(const TetGrid& grid, const GridSDF& d, bool normalized = false);

double total_loss(double adversarial, double eikonal, double cross_entropy,
                  const LossWeights& weights);

/// Symmetric mean squared nearest-neighbor distance.
double chamfer(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

double mse_image(const std::vector<double>& a, const std::vector<double>& b);
double mse_image(const std::vector<Vec3>& a, const std::vector<Vec3>& b);
double mse_image(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b);

/// Sum of the rgb, mask, and normal-map image MSEs.
double buffers_mse(const RenderBuffers& a, const RenderBuffers& b);

/// Fitting objective on the grid SDF: chamfer(mesh vertices, target)
/// + lambda_ce * cross-entropy + lambda_eik * discrete per-edge proxy
/// mean((|d_i - d_j| / edge_length - 1)^2 over crossing edges).
struct SdfFitTerms {
    double chamfer = 0.0;
    double cross_entropy = 0.0;
    double eikonal_proxy = 0.0;
    double total = 0.0;
};
SdfFitTerms sdf_fit_loss(const TetGrid& grid, const GridSDF& d, const std::vector<Vec3>& target,
                         const LossWeights& weights);

/// Analytic d(total)/d(values), flowing through the marching-tetrahedra
/// vertex jacobians; sign sets are treated as locally constant.
std::vector<double> sdf_fit_gradient(const TetGrid& grid, const GridSDF& d,
                                     const std::vector<Vec3>& target,
                                     const LossWeights& weights);

struct SdfFitResult {
    GridSDF optimized;
    struct Record {
        int iteration = 0;
        SdfFitTerms terms;
    };
    std::vector<Record> history;
};
/// Plain gradient descent (optional momentum) on the per-vertex distances.
/// Throws std::runtime_error on NaN divergence.
SdfFitResult fit_sdf_grid(const TetGrid& grid, GridSDF initial, const std::vector<Vec3>& target,
                          const FitConfig& config, const LossWeights& weights);

struct LatentFitResult {
    LatentCode best;
    double initial_loss = 0.0;
    double best_loss = 0.0;
    struct Record {
        int iteration = 0;
        double loss = 0.0;
    };
    std::vector<Record> history;
};
/// Central finite-difference descent on (z_geo, z_tex); refuses more than 64
/// total latent dimensions. `render` re-renders the scene for a candidate
/// latent; returns the best latent seen.
LatentFitResult fit_latent(const RenderBuffers& target,
                           const std::function<RenderBuffers(const LatentCode&)>& render,
                           LatentCode initial, const FitConfig& config, double fd_step = 0.05);

} // namespace arti
