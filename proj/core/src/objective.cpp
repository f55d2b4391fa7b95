#include "arti/objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "arti/point_grid.hpp"
#include "arti/rng.hpp"

namespace arti {

namespace {

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

// Numerically safe binary cross-entropy H(sigmoid(logit), y) written on the
// logit: softplus(logit) - y * logit.
double bce_logit(double logit, double y) {
    const double softplus =
        logit > 0.0 ? logit + std::log1p(std::exp(-logit)) : std::log1p(std::exp(logit));
    return softplus - y * logit;
}

} // namespace

SurfaceSamples sample_surface_points(const ExtractedMesh& mesh, std::size_t count,
                                     std::uint64_t seed, const PosedBody* posed) {
    if (mesh.faces.empty()) throw std::invalid_argument("cannot sample an empty mesh");

    std::vector<double> cumulative(mesh.faces.size());
    double total = 0.0;
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const Face& face = mesh.faces[f];
        total += 0.5 * (mesh.vertices[face[1]] - mesh.vertices[face[0]])
                           .cross(mesh.vertices[face[2]] - mesh.vertices[face[0]])
                           .norm();
        cumulative[f] = total;
    }
    if (!(total > 0.0)) throw std::invalid_argument("mesh has zero surface area");

    SurfaceSamples out;
    out.deformed.reserve(count);
    out.canonical.reserve(count);
    out.face.reserve(count);
    out.bary.reserve(count);
    Rng rng(seed);
    for (std::size_t k = 0; k < count; ++k) {
        const double pick = rng.uniform(0.0, total);
        const std::size_t f =
            std::upper_bound(cumulative.begin(), cumulative.end(), pick) - cumulative.begin();
        const std::size_t fi = std::min(f, mesh.faces.size() - 1);
        const double r1 = std::sqrt(rng.uniform());
        const double r2 = rng.uniform();
        const Vec3 bary(1.0 - r1, r1 * (1.0 - r2), r1 * r2);
        const Face& face = mesh.faces[fi];
        const Vec3 p = bary[0] * mesh.vertices[face[0]] + bary[1] * mesh.vertices[face[1]] +
                       bary[2] * mesh.vertices[face[2]];
        out.deformed.push_back(p);
        out.face.push_back(static_cast<int>(fi));
        out.bary.push_back(bary);
        if (posed) {
            try {
                out.canonical.push_back(posed->inverse_warp(p).canonical);
            } catch (const std::runtime_error&) {
                out.canonical.push_back(p);
            }
        } else {
            out.canonical.push_back(p);
        }
    }
    return out;
}

double eikonal_loss(const std::vector<Vec3>& points,
                    const std::function<Vec3(const Vec3&)>& gradient) {
    if (points.empty()) throw std::invalid_argument("eikonal loss needs at least one point");
    double sum = 0.0;
    for (const Vec3& p : points) {
        const double dev = gradient(p).norm() - 1.0;
        sum += dev * dev;
    }
    return sum / static_cast<double>(points.size());
}

double eikonal_loss(const std::vector<Vec3>& points, const FieldSet& fields, const VecX& w_geo,
                    NormalMode mode) {
    return eikonal_loss(points,
                        [&](const Vec3& p) { return fields.normal(w_geo, p, mode); });
}

double sdf_cross_entropy(const TetGrid& grid, const GridSDF& d, bool normalized) {
    const std::vector<int> s_e = crossing_edges(grid, d);
    double sum = 0.0;
    for (int e : s_e) {
        const double di = d.values[grid.edges[e][0]];
        const double dj = d.values[grid.edges[e][1]];
        const double yi = di >= 0.0 ? 1.0 : 0.0;
        const double yj = dj >= 0.0 ? 1.0 : 0.0;
        sum += bce_logit(di, yj) + bce_logit(dj, yi);
    }
    if (normalized && !s_e.empty()) sum /= static_cast<double>(s_e.size());
    return sum;
}

double total_loss(double adversarial, double eikonal, double cross_entropy,
                  const LossWeights& weights) {
    return adversarial + weights.lambda_eik * eikonal + weights.lambda_ce * cross_entropy;
}

namespace {

// One-directional mean squared NN distance plus correspondences.
double directed_sq(const std::vector<Vec3>& from, const PointGrid& to_index,
                   const std::vector<Vec3>& to, std::vector<int>* match) {
    double sum = 0.0;
    if (match) match->resize(from.size());
    for (std::size_t i = 0; i < from.size(); ++i) {
        double sq = 0.0;
        const int j = to_index.nearest(from[i], sq);
        (void)to;
        sum += sq;
        if (match) (*match)[i] = j;
    }
    return sum / static_cast<double>(from.size());
}

} // namespace

double chamfer(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("chamfer needs non-empty sets");
    const PointGrid index_a(a);
    const PointGrid index_b(b);
    return directed_sq(a, index_b, b, nullptr) + directed_sq(b, index_a, a, nullptr);
}

double mse_image(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.empty()) throw std::invalid_argument("image shape mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
    return sum / static_cast<double>(a.size());
}

double mse_image(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
    if (a.size() != b.size() || a.empty()) throw std::invalid_argument("image shape mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]).squaredNorm();
    return sum / static_cast<double>(3 * a.size());
}

double mse_image(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
    if (a.size() != b.size() || a.empty()) throw std::invalid_argument("image shape mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        sum += diff * diff;
    }
    return sum / static_cast<double>(a.size());
}

double buffers_mse(const RenderBuffers& a, const RenderBuffers& b) {
    if (a.width != b.width || a.height != b.height)
        throw std::invalid_argument("render buffer shape mismatch");
    return mse_image(a.rgb, b.rgb) + mse_image(a.mask, b.mask) + mse_image(a.normal, b.normal);
}

namespace {

struct FitEvaluation {
    ExtractedMesh mesh;
    SdfFitTerms terms;
};

FitEvaluation evaluate_fit(const TetGrid& grid, const GridSDF& d, const std::vector<Vec3>& target,
                           const LossWeights& weights) {
    FitEvaluation ev;
    ev.mesh = marching_tetrahedra(grid, d);
    if (!ev.mesh.vertices.empty()) ev.terms.chamfer = chamfer(ev.mesh.vertices, target);
    ev.terms.cross_entropy = sdf_cross_entropy(grid, d);
    double eik = 0.0;
    for (const auto& pe : ev.mesh.parent_edges) {
        const double len = (grid.vertices[pe.j] - grid.vertices[pe.i]).norm();
        const double dev = std::abs(d.values[pe.i] - d.values[pe.j]) / len - 1.0;
        eik += dev * dev;
    }
    if (!ev.mesh.parent_edges.empty())
        eik /= static_cast<double>(ev.mesh.parent_edges.size());
    ev.terms.eikonal_proxy = eik;
    ev.terms.total = ev.terms.chamfer + weights.lambda_ce * ev.terms.cross_entropy +
                     weights.lambda_eik * ev.terms.eikonal_proxy;
    return ev;
}

} // namespace

SdfFitTerms sdf_fit_loss(const TetGrid& grid, const GridSDF& d, const std::vector<Vec3>& target,
                         const LossWeights& weights) {
    return evaluate_fit(grid, d, target, weights).terms;
}

std::vector<double> sdf_fit_gradient(const TetGrid& grid, const GridSDF& d,
                                     const std::vector<Vec3>& target,
                                     const LossWeights& weights) {
    if (target.empty()) throw std::invalid_argument("fit target must be non-empty");
    std::vector<double> grad(d.values.size(), 0.0);
    const ExtractedMesh mesh = marching_tetrahedra(grid, d);

    // Chamfer: gradient with respect to each extracted vertex, then pushed
    // onto the parent edge's endpoint distances via the MT jacobians.
    if (!mesh.vertices.empty()) {
        std::vector<Vec3> vertex_grad(mesh.vertices.size(), Vec3::Zero());
        const PointGrid target_index(target);
        const PointGrid mesh_index(mesh.vertices);
        const double inv_a = 1.0 / static_cast<double>(mesh.vertices.size());
        const double inv_b = 1.0 / static_cast<double>(target.size());
        for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
            const int nn = target_index.nearest(mesh.vertices[v]);
            vertex_grad[v] += 2.0 * inv_a * (mesh.vertices[v] - target[nn]);
        }
        for (const Vec3& b : target) {
            const int nn = mesh_index.nearest(b);
            vertex_grad[nn] += 2.0 * inv_b * (mesh.vertices[nn] - b);
        }
        const std::vector<VertexJacobian> jac = mt_vertex_jacobian(mesh, grid, d);
        for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
            const auto& pe = mesh.parent_edges[v];
            grad[pe.i] += vertex_grad[v].dot(jac[v].wrt_di);
            grad[pe.j] += vertex_grad[v].dot(jac[v].wrt_dj);
        }
    }

    // Cross-entropy: d H(sigmoid(d), y) / dd = sigmoid(d) - y per term; the
    // opposite endpoint's sign label is locally constant.
    for (const auto& pe : mesh.parent_edges) {
        const double di = d.values[pe.i];
        const double dj = d.values[pe.j];
        const double yi = di >= 0.0 ? 1.0 : 0.0;
        const double yj = dj >= 0.0 ? 1.0 : 0.0;
        grad[pe.i] += weights.lambda_ce * (sigmoid(di) - yj);
        grad[pe.j] += weights.lambda_ce * (sigmoid(dj) - yi);
    }

    // Discrete eikonal proxy, mean over crossing edges.
    if (!mesh.parent_edges.empty()) {
        const double inv_n = 1.0 / static_cast<double>(mesh.parent_edges.size());
        for (const auto& pe : mesh.parent_edges) {
            const double len = (grid.vertices[pe.j] - grid.vertices[pe.i]).norm();
            const double delta = d.values[pe.i] - d.values[pe.j];
            const double dev = std::abs(delta) / len - 1.0;
            const double sign = delta >= 0.0 ? 1.0 : -1.0;
            const double g = weights.lambda_eik * inv_n * 2.0 * dev * sign / len;
            grad[pe.i] += g;
            grad[pe.j] -= g;
        }
    }
    return grad;
}

SdfFitResult fit_sdf_grid(const TetGrid& grid, GridSDF initial, const std::vector<Vec3>& target,
                          const FitConfig& config, const LossWeights& weights) {
    if (target.empty()) throw std::invalid_argument("fit target must be non-empty");
    if (config.iterations < 1) throw std::invalid_argument("fit needs at least one iteration");
    if (config.step < 0.0) throw std::invalid_argument("fit step must be nonnegative");

    SdfFitResult result;
    result.optimized = std::move(initial);
    std::vector<double> velocity(result.optimized.values.size(), 0.0);

    double previous_total = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < config.iterations; ++iter) {
        const SdfFitTerms terms = sdf_fit_loss(grid, result.optimized, target, weights);
        if (!std::isfinite(terms.total))
            throw std::runtime_error("fit diverged: loss is not finite");
        if (iter % std::max(1, config.log_every) == 0 || iter == config.iterations - 1)
            result.history.push_back({iter, terms});
        if (config.convergence > 0.0 && std::abs(previous_total - terms.total) < config.convergence)
            break;
        previous_total = terms.total;

        const std::vector<double> grad =
            sdf_fit_gradient(grid, result.optimized, target, weights);
        for (std::size_t i = 0; i < grad.size(); ++i) {
            if (config.momentum) {
                velocity[i] = config.momentum_coeff * velocity[i] - config.step * grad[i];
                result.optimized.values[i] += velocity[i];
            } else {
                result.optimized.values[i] -= config.step * grad[i];
            }
        }
    }
    return result;
}

LatentFitResult fit_latent(const RenderBuffers& target,
                           const std::function<RenderBuffers(const LatentCode&)>& render,
                           LatentCode initial, const FitConfig& config, double fd_step) {
    const int dim = static_cast<int>(initial.z_geo.size() + initial.z_tex.size());
    if (dim > 64)
        throw std::invalid_argument(
            "latent dimension exceeds the finite-difference budget of 64");
    if (dim < 1) throw std::invalid_argument("latent must be non-empty");
    if (!(fd_step > 0.0)) throw std::invalid_argument("finite-difference step must be positive");

    auto get = [](LatentCode& z, int k) -> double& {
        return k < z.z_geo.size() ? z.z_geo[k] : z.z_tex[k - z.z_geo.size()];
    };
    auto loss_of = [&](const LatentCode& z) { return buffers_mse(render(z), target); };

    LatentFitResult result;
    LatentCode current = initial;
    double current_loss = loss_of(current);
    result.initial_loss = current_loss;
    result.best = current;
    result.best_loss = current_loss;
    result.history.push_back({0, current_loss});

    VecX velocity = VecX::Zero(dim);
    for (int iter = 1; iter <= config.iterations; ++iter) {
        VecX grad(dim);
        for (int k = 0; k < dim; ++k) {
            LatentCode plus = current, minus = current;
            get(plus, k) += fd_step;
            get(minus, k) -= fd_step;
            grad[k] = (loss_of(plus) - loss_of(minus)) / (2.0 * fd_step);
        }
        for (int k = 0; k < dim; ++k) {
            if (config.momentum) {
                velocity[k] = config.momentum_coeff * velocity[k] - config.step * grad[k];
                get(current, k) += velocity[k];
            } else {
                get(current, k) -= config.step * grad[k];
            }
        }
        current_loss = loss_of(current);
        if (!std::isfinite(current_loss))
            throw std::runtime_error("latent fit diverged: loss is not finite");
        result.history.push_back({iter, current_loss});
        if (current_loss < result.best_loss) {
            result.best_loss = current_loss;
            result.best = current;
        }
        if (config.convergence > 0.0 &&
            std::abs(result.history[result.history.size() - 2].loss - current_loss) <
                config.convergence)
            break;
    }
    return result;
}

} // namespace arti
