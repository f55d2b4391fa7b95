#include "arti/gradcheck.hpp"

#include <cmath>
#include <cstdio>

#include "arti/fields.hpp"
#include "arti/objective.hpp"
#include "arti/rng.hpp"
#include "arti/tet_grid.hpp"
#include "arti/triplane.hpp"
#include "arti/trimesh.hpp"

namespace arti {

namespace {

double rel_err(double analytic, double numeric, double floor_scale) {
    const double denom = std::max({std::abs(analytic), std::abs(numeric), floor_scale});
    return std::abs(analytic - numeric) / denom;
}

// Keep FD probes away from bilinear cell borders, where the interpolant's
// gradient legitimately jumps.
bool near_cell_border(const TriPlane& tp, const Vec3& x, double margin_cells) {
    for (int axis = 0; axis < 3; ++axis) {
        const double g = (x[axis] - tp.bounds().lo[axis]) /
                         (tp.bounds().hi[axis] - tp.bounds().lo[axis]) * (tp.resolution() - 1);
        if (std::abs(g - std::round(g)) < margin_cells) return true;
        if (g < margin_cells || g > tp.resolution() - 1 - margin_cells) return true;
    }
    return false;
}

GradCheckRow check_triplane(std::uint64_t seed) {
    GradCheckRow row{"triplane sample jacobian", 0.0, 1e-4, false};
    const Box3 bounds = Box3::cube(Vec3::Zero(), 1.0);
    const TriPlane tp = TriPlane::random(16, 5, bounds, seed);
    const double h = 1e-5 * tp.cell_size();
    Rng rng(seed + 1);

    for (int trial = 0; trial < 100; ++trial) {
        Vec3 x = rng.uniform_in_box(bounds.inflated(0.9));
        while (near_cell_border(tp, x, 0.05)) x = rng.uniform_in_box(bounds.inflated(0.9));

        Eigen::Matrix<double, Eigen::Dynamic, 3> jac;
        tp.sample_with_grad(x, jac);
        for (int axis = 0; axis < 3; ++axis) {
            Vec3 hi = x, lo = x;
            hi[axis] += h;
            lo[axis] -= h;
            const VecX fd = (tp.sample(hi) - tp.sample(lo)) / (2.0 * h);
            for (int ch = 0; ch < tp.feature_size(); ++ch)
                row.max_rel_err =
                    std::max(row.max_rel_err, rel_err(jac(ch, axis), fd[ch], 1.0));
        }
    }
    row.pass = row.max_rel_err < row.tolerance;
    return row;
}

GradCheckRow check_field_normal(std::uint64_t seed) {
    GradCheckRow row{"field normal (analytic vs FD)", 0.0, 1e-4, false};
    FieldSet::Params params;
    params.plane_resolution = 24;
    params.plane_channels = 8;
    params.latent_dim = 8;
    params.decoder_width = 32;
    params.geometry_seed = seed;
    params.texture_seed = seed + 7;
    const FieldSet fs = FieldSet::create(make_icosphere(0.5, 2), params);
    const LatentCode z = LatentCode::gaussian(params.latent_dim, seed + 2, seed + 3);
    const VecX w_geo = fs.map(z).w_geo;

    const double h = 1e-4;
    Rng rng(seed + 4);
    int accepted = 0;
    while (accepted < 100) {
        const Vec3 x = rng.uniform_in_box(Box3::cube(Vec3::Zero(), 0.62));
        // Stay in the shell where the template distance is smooth (outside
        // the interior medial region) and away from bilinear cell borders.
        const double td = fs.template_distance(x);
        if (td < -0.2 || td > 0.35) continue;
        if (near_cell_border(fs.geometry_plane(), x, 0.1)) continue;
        ++accepted;

        const Vec3 analytic = fs.normal(w_geo, x, NormalMode::kAnalytic);
        const Vec3 fd = fs.normal(w_geo, x, NormalMode::kFiniteDifference, h);
        row.max_rel_err =
            std::max(row.max_rel_err, (analytic - fd).norm() / std::max(fd.norm(), 1e-9));
    }
    row.pass = row.max_rel_err < row.tolerance;
    return row;
}

GradCheckRow check_mt_jacobian(std::uint64_t seed) {
    GradCheckRow row{"marching-tet vertex jacobian", 0.0, 1e-4, false};
    const TetGrid grid = build_tet_grid(8, Box3::cube(Vec3::Zero(), 1.0));
    GridSDF d = populate_sdf(grid, [](const Vec3& x) { return x.norm() - 0.6; });

    const ExtractedMesh mesh = marching_tetrahedra(grid, d);
    const std::vector<VertexJacobian> jac = mt_vertex_jacobian(mesh, grid, d);

    const double h = 1e-6;
    Rng rng(seed);
    for (int trial = 0; trial < 50 && !mesh.vertices.empty(); ++trial) {
        const int v = rng.uniform_int(static_cast<int>(mesh.vertices.size()));
        const auto& pe = mesh.parent_edges[v];
        auto vertex_at = [&](double di, double dj) {
            const double t = di / (di - dj);
            return Vec3(grid.vertices[pe.i] + t * (grid.vertices[pe.j] - grid.vertices[pe.i]));
        };
        const double di = d.values[pe.i];
        const double dj = d.values[pe.j];
        const Vec3 fd_i = (vertex_at(di + h, dj) - vertex_at(di - h, dj)) / (2.0 * h);
        const Vec3 fd_j = (vertex_at(di, dj + h) - vertex_at(di, dj - h)) / (2.0 * h);
        row.max_rel_err = std::max(
            row.max_rel_err, (jac[v].wrt_di - fd_i).norm() / std::max(fd_i.norm(), 1e-9));
        row.max_rel_err = std::max(
            row.max_rel_err, (jac[v].wrt_dj - fd_j).norm() / std::max(fd_j.norm(), 1e-9));
    }
    row.pass = row.max_rel_err < row.tolerance;
    return row;
}

GradCheckRow check_fit_gradient(std::uint64_t seed) {
    GradCheckRow row{"grid-SDF fit loss gradient", 0.0, 1e-4, false};
    const TetGrid grid = build_tet_grid(10, Box3::cube(Vec3::Zero(), 1.0));
    GridSDF d = populate_sdf(grid, [](const Vec3& x) { return x.norm() - 0.7; });

    Rng rng(seed);
    std::vector<Vec3> target;
    for (int i = 0; i < 300; ++i) {
        Vec3 dir(rng.normal(), rng.normal(), rng.normal());
        target.push_back(0.5 * dir.normalized());
    }

    const LossWeights weights;
    const std::vector<double> analytic = sdf_fit_gradient(grid, d, target, weights);

    const double h = 1e-6;
    for (int probe = 0; probe < 20; ++probe) {
        const int i = rng.uniform_int(static_cast<int>(d.values.size()));
        GridSDF plus = d, minus = d;
        plus.values[i] += h;
        minus.values[i] -= h;
        const double fd = (sdf_fit_loss(grid, plus, target, weights).total -
                           sdf_fit_loss(grid, minus, target, weights).total) /
                          (2.0 * h);
        row.max_rel_err = std::max(row.max_rel_err, rel_err(analytic[i], fd, 1e-3));
    }
    row.pass = row.max_rel_err < row.tolerance;
    return row;
}

} // namespace

GradCheckReport run_gradcheck(std::uint64_t seed) {
    GradCheckReport report;
    report.rows.push_back(check_triplane(seed));
    report.rows.push_back(check_field_normal(seed));
    report.rows.push_back(check_mt_jacobian(seed));
    report.rows.push_back(check_fit_gradient(seed));
    report.all_pass = true;
    for (const auto& row : report.rows) report.all_pass = report.all_pass && row.pass;
    return report;
}

std::string format_report(const GradCheckReport& report) {
    std::string out;
    char line[160];
    for (const auto& row : report.rows) {
        std::snprintf(line, sizeof(line), "%-32s max rel err %.3e (tol %.1e)  %s\n",
                      row.name.c_str(), row.max_rel_err, row.tolerance,
                      row.pass ? "PASS" : "FAIL");
        out += line;
    }
    out += report.all_pass ? "gradcheck: ALL PASS\n" : "gradcheck: FAIL\n";
    return out;
}

} // namespace arti
