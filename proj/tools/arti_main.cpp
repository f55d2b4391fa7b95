// Command-line front end: generate / extract-mesh / render / fit-sdf /
// invert / retexture / gradcheck over the core pipeline. Every command is a
// pure function of (config, inputs, seeds); reruns reproduce byte-identical
// artifacts at any --threads value.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "arti/body_model.hpp"
#include "arti/camera.hpp"
#include "arti/fields.hpp"
#include "arti/gradcheck.hpp"
#include "arti/image_io.hpp"
#include "arti/objective.hpp"
#include "arti/renderer.hpp"
#include "arti/rng.hpp"
#include "arti/snapshot.hpp"
#include "arti/tet_grid.hpp"
#include "arti/trimesh.hpp"

#include "run_config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;
using namespace arti;
using cli::CameraConfig;
using cli::NumericalError;
using cli::RunConfig;
using cli::ValidationError;

namespace {

/// Input-loading phase: any failure is a validation error (exit 2).
template <typename F>
auto validated(F&& f) {
    try {
        return std::forward<F>(f)();
    } catch (const ValidationError&) {
        throw;
    } catch (const std::exception& e) {
        throw ValidationError(e.what());
    }
}

/// Compute phase: runtime errors are numerical failures (exit 3);
/// invalid_argument (precondition violations) stays a validation error.
template <typename F>
auto numeric(F&& f) {
    try {
        return std::forward<F>(f)();
    } catch (const ValidationError&) {
        throw;
    } catch (const std::runtime_error& e) {
        throw NumericalError(e.what());
    }
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open for writing: " + path);
    file.write(text.data(), static_cast<std::streamsize>(text.size()));
}

void write_manifest(const RunConfig& cfg, const std::string& command, ordered_json stats) {
    ordered_json doc;
    doc["command"] = command;
    doc["config"] = cfg.resolved();
    doc["stats"] = std::move(stats);
    write_text(cfg.output_dir + "/" + command + "_manifest.json", doc.dump(1) + "\n");
}

std::string format_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Shared pipeline state

struct ResolvedPose {
    std::vector<double> theta;  // empty = rest
    std::vector<double> beta;
};

struct Inputs {
    RunConfig cfg;
    int threads = 1;
    std::optional<BodyModel> model;
    ResolvedPose pose;
    std::optional<PosedBody> posed;
    std::optional<FieldSet> fields;
    LatentCode z;
    IntermediateLatent w;
};

ResolvedPose resolve_pose(const RunConfig& cfg) {
    ResolvedPose pose;
    if (!cfg.pose.file.empty()) {
        std::ifstream file(cfg.pose.file);
        if (!file) throw ValidationError("cannot open pose file: " + cfg.pose.file);
        json doc;
        try {
            doc = json::parse(file);
        } catch (const json::parse_error& e) {
            throw ValidationError("pose parse failure: " + std::string(e.what()));
        }
        for (const auto& [key, val] : doc.items()) {
            if (key == "theta") pose.theta = val.get<std::vector<double>>();
            else if (key == "beta") pose.beta = val.get<std::vector<double>>();
            else throw ValidationError("unknown pose key: " + key);
        }
    } else {
        pose.theta = cfg.pose.theta;
        pose.beta = cfg.pose.beta;
    }
    return pose;
}

PoseShapeParams pose_params(const BodyModel& model, const ResolvedPose& pose) {
    if (pose.theta.empty()) {
        PoseShapeParams p = PoseShapeParams::rest(model);
        if (!pose.beta.empty()) {
            if (static_cast<int>(pose.beta.size()) != model.shape_rank())
                throw ValidationError("beta length must equal the shape-basis rank");
            p.shape = Eigen::Map<const VecX>(pose.beta.data(),
                                             static_cast<Eigen::Index>(pose.beta.size()));
        }
        return p;
    }
    return PoseShapeParams::from_flat(model, pose.theta, pose.beta);
}

/// Loads the parts every snapshot-consuming command shares: body model +
/// posed context (when configured), field snapshot, latents.
Inputs load_inputs(RunConfig cfg, int threads, bool need_fields) {
    Inputs in;
    in.cfg = std::move(cfg);
    in.threads = threads;
    validated([&] {
        if (!in.cfg.body_model.empty()) {
            in.model = load_body_model(in.cfg.body_model);
            in.pose = resolve_pose(in.cfg);
            in.posed.emplace(*in.model, pose_params(*in.model, in.pose));
        }
        if (need_fields) {
            in.fields = load_fieldset(in.cfg.snapshot);
            in.z = LatentCode::gaussian(in.fields->latent_dim(), in.cfg.geometry_seed,
                                        in.cfg.texture_seed);
            in.w = in.fields->map(in.z);
            if (in.model &&
                in.fields->template_mesh().vertices.size() != in.model->rest_vertices.size()) {
                std::fprintf(stderr,
                             "warning: snapshot template (%zu vertices) does not match the body "
                             "model rest mesh (%zu vertices)\n",
                             in.fields->template_mesh().vertices.size(),
                             in.model->rest_vertices.size());
            }
        }
        return 0;
    });
    return in;
}

const PosedBody* posed_ptr(const Inputs& in) { return in.posed ? &*in.posed : nullptr; }

Box3 resolve_lattice(const Inputs& in) {
    if (!in.cfg.lattice.automatic) return Box3::cube(in.cfg.lattice.center, in.cfg.lattice.half);
    if (in.posed) return lattice_bounds(in.posed->deformed_vertices());
    if (in.fields) return lattice_bounds(in.fields->template_mesh().vertices);
    throw ValidationError("no lattice bounds: set lattice.center/half explicitly");
}

struct Extraction {
    TetGrid grid;
    GridSDF sdf;
    ExtractedMesh mesh;
    std::size_t crossing_count = 0;
};

Extraction extract_surface(const Inputs& in, const VecX& w_geo, int tet_resolution) {
    Extraction ex;
    ex.grid = build_tet_grid(tet_resolution, resolve_lattice(in));
    ex.sdf = in.posed ? populate_sdf(ex.grid, *in.posed, *in.fields, w_geo, in.threads)
                      : populate_sdf(ex.grid, *in.fields, w_geo, in.threads);
    ex.sdf.provenance.pose_theta = in.pose.theta;
    ex.sdf.provenance.shape = in.pose.beta;
    ex.sdf.provenance.geometry_seed = in.cfg.geometry_seed;
    ex.sdf.provenance.texture_seed = in.cfg.texture_seed;
    ex.crossing_count = crossing_edges(ex.grid, ex.sdf).size();
    ex.mesh = marching_tetrahedra(ex.grid, ex.sdf);
    ex.mesh.compute_canonical(posed_ptr(in));
    return ex;
}

ordered_json extraction_stats(const Extraction& ex) {
    const Box3& b = ex.grid.bounds;
    ordered_json j;
    j["lattice"] = {{"lo", {b.lo.x(), b.lo.y(), b.lo.z()}},
                    {"hi", {b.hi.x(), b.hi.y(), b.hi.z()}}};
    j["grid_vertices"] = ex.grid.vertices.size();
    j["grid_tets"] = ex.grid.tets.size();
    j["grid_edges"] = ex.grid.edges.size();
    j["crossing_edges"] = ex.crossing_count;
    j["mesh_vertices"] = ex.mesh.vertices.size();
    j["mesh_faces"] = ex.mesh.faces.size();
    return j;
}

Camera camera_from(const CameraConfig& c) {
    return make_camera(c.radius, c.azimuth, c.elevation, c.fov, c.width, c.height);
}

RenderBuffers render_view(const Inputs& in, const Extraction& ex, const IntermediateLatent& w,
                          const Camera& cam) {
    const TriMesh mesh = ex.mesh.mesh();
    RenderBuffers buffers = rasterize(mesh, cam, in.threads);
    shade(buffers, mesh, posed_ptr(in), *in.fields, w, cam, in.cfg.normal(), in.threads);
    return buffers;
}

ordered_json buffer_stats(const RenderBuffers& b) {
    ordered_json j;
    j["covered_pixels"] = b.covered_count();
    j["clipped_faces"] = b.diagnostics.clipped_faces;
    j["degenerate_blend_pixels"] = b.diagnostics.degenerate_blend_pixels;
    j["zero_gradient_pixels"] = b.diagnostics.zero_gradient_pixels;
    return j;
}

// ---------------------------------------------------------------------------
// Commands

FieldSet make_generated_fieldset(const RunConfig& cfg, TriMesh template_mesh) {
    FieldSet fields = FieldSet::create(std::move(template_mesh), cfg.field_params());
    if (!cfg.zero_offset) return fields;
    // Swap the geometry decoder for an all-zero network (zero weights, zero
    // bias, identity modulation): the offset term vanishes identically and
    // the SDF reduces to the template distance.
    DecoderMLP zero(fields.geometry_decoder().widths(),
                    fields.geometry_decoder().modulation_width());
    return FieldSet(fields.template_mesh(), fields.geometry_plane(), fields.texture_plane(),
                    fields.geometry_mapping(), fields.texture_mapping(), zero,
                    fields.texture_decoder(), fields.offset_scale(), fields.params());
}

int cmd_generate(const RunConfig& cfg, int threads) {
    (void)threads;
    std::optional<BodyModel> model;
    TriMesh template_mesh = validated([&] {
        if (cfg.shape_template.kind == "icosphere")
            return make_icosphere(cfg.shape_template.radius, cfg.shape_template.subdivisions);
        model = load_body_model(cfg.body_model);
        return model->rest_mesh();
    });

    const FieldSet fields =
        numeric([&] { return make_generated_fieldset(cfg, std::move(template_mesh)); });
    fs::path snapshot(cfg.snapshot);
    if (snapshot.has_parent_path()) fs::create_directories(snapshot.parent_path());
    numeric([&] {
        save_fieldset(fields, cfg.snapshot);
        return 0;
    });

    ordered_json stats;
    stats["template_vertices"] = fields.template_mesh().vertices.size();
    stats["template_faces"] = fields.template_mesh().faces.size();
    stats["offset_scale_resolved"] = fields.offset_scale();
    stats["plane_feature_size"] = fields.geometry_plane().feature_size();
    stats["geometry_decoder_parameters"] = fields.geometry_decoder().parameter_count();
    stats["texture_decoder_parameters"] = fields.texture_decoder().parameter_count();
    stats["snapshot"] = cfg.snapshot;
    write_manifest(cfg, "generate", std::move(stats));
    return 0;
}

int cmd_extract(const RunConfig& cfg, int threads) {
    Inputs in = load_inputs(cfg, threads, true);
    const Extraction ex = numeric([&] { return extract_surface(in, in.w.w_geo, in.cfg.tet_resolution); });

    if (ex.mesh.vertices.empty()) std::fprintf(stderr, "warning: extraction is empty\n");

    const std::string obj_path = cfg.output_dir + "/mesh.obj";
    const std::string ply_path = cfg.output_dir + "/mesh.ply";
    std::vector<Vec3> colors(ex.mesh.vertices.size());
    for (std::size_t i = 0; i < colors.size(); ++i)
        colors[i] = in.fields->color(in.w, ex.mesh.canonical[i]);
    numeric([&] {
        write_obj(ex.mesh.mesh(), obj_path);
        write_ply(ex.mesh.mesh(), ply_path, nullptr, colors.empty() ? nullptr : &colors);
        return 0;
    });

    ordered_json stats = extraction_stats(ex);
    stats["empty"] = ex.mesh.vertices.empty();
    stats["obj"] = obj_path;
    stats["ply"] = ply_path;
    write_manifest(cfg, "extract-mesh", std::move(stats));
    return 0;
}

std::string render_prefix(const RunConfig& cfg, std::size_t index, const CameraConfig& cam) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "render_cam%zu_az%.4f_el%.4f", index, cam.azimuth,
                  cam.elevation);
    return cfg.output_dir + "/" + buf;
}

int cmd_render(const RunConfig& cfg, int threads) {
    Inputs in = load_inputs(cfg, threads, true);
    const Extraction ex = numeric([&] { return extract_surface(in, in.w.w_geo, in.cfg.tet_resolution); });
    if (ex.mesh.vertices.empty()) std::fprintf(stderr, "warning: extraction is empty\n");

    ordered_json views = ordered_json::array();
    for (std::size_t i = 0; i < cfg.cameras.size(); ++i) {
        const Camera cam = validated([&] { return camera_from(cfg.cameras[i]); });
        const RenderBuffers buffers = numeric([&] { return render_view(in, ex, in.w, cam); });
        const std::string prefix = render_prefix(cfg, i, cfg.cameras[i]);
        numeric([&] {
            save_buffer_pngs(buffers, prefix);
            if (cfg.dump_float) save_buffer_dumps(buffers, prefix);
            return 0;
        });
        ordered_json view = buffer_stats(buffers);
        view["prefix"] = prefix;
        views.push_back(std::move(view));
    }

    ordered_json stats = extraction_stats(ex);
    stats["views"] = std::move(views);
    write_manifest(cfg, "render", std::move(stats));
    return 0;
}

std::vector<Vec3> fit_target_points(const RunConfig& cfg) {
    if (cfg.fit.target.kind == "file") {
        std::ifstream file(cfg.fit.target.file);
        if (!file) throw ValidationError("cannot open fit target file: " + cfg.fit.target.file);
        json doc;
        try {
            doc = json::parse(file);
        } catch (const json::parse_error& e) {
            throw ValidationError("fit target parse failure: " + std::string(e.what()));
        }
        if (!doc.is_array() || doc.size() % 3 != 0)
            throw ValidationError("fit target file must be a flat xyz array");
        std::vector<Vec3> points(doc.size() / 3);
        for (std::size_t i = 0; i < points.size(); ++i)
            points[i] = Vec3(doc[3 * i].get<double>(), doc[3 * i + 1].get<double>(),
                             doc[3 * i + 2].get<double>());
        if (points.empty()) throw ValidationError("fit target file has no points");
        return points;
    }
    // Uniform points on the sphere via normalized Gaussians.
    Rng rng(cfg.fit.target.seed);
    std::vector<Vec3> points(static_cast<std::size_t>(cfg.fit.target.count));
    for (Vec3& p : points) {
        Vec3 g;
        do {
            g = Vec3(rng.normal(), rng.normal(), rng.normal());
        } while (g.norm() < 1e-12);
        p = g / g.norm() * cfg.fit.target.radius;
    }
    return points;
}

int cmd_fit_sdf(const RunConfig& cfg, int threads) {
    const bool need_fields = cfg.fit.init.kind == "field";
    Inputs in = load_inputs(cfg, threads, need_fields);
    const std::vector<Vec3> target = validated([&] { return fit_target_points(cfg); });

    const TetGrid grid = numeric([&] { return build_tet_grid(cfg.tet_resolution, resolve_lattice(in)); });
    GridSDF initial = numeric([&] {
        if (need_fields)
            return in.posed ? populate_sdf(grid, *in.posed, *in.fields, in.w.w_geo, in.threads)
                            : populate_sdf(grid, *in.fields, in.w.w_geo, in.threads);
        const double r = cfg.fit.init.radius;
        return populate_sdf(grid, [r](const Vec3& x) { return x.norm() - r; }, in.threads);
    });
    initial.provenance.pose_theta = in.pose.theta;
    initial.provenance.shape = in.pose.beta;
    initial.provenance.geometry_seed = cfg.geometry_seed;
    initial.provenance.texture_seed = cfg.texture_seed;

    FitConfig fit_cfg;
    fit_cfg.iterations = cfg.fit.iterations;
    fit_cfg.step = cfg.fit.step;
    fit_cfg.momentum = cfg.fit.momentum;
    fit_cfg.momentum_coeff = cfg.fit.momentum_coeff;
    fit_cfg.seed = cfg.fit.seed;
    fit_cfg.convergence = cfg.fit.convergence;
    fit_cfg.log_every = cfg.fit.log_every;

    const SdfFitResult result =
        numeric([&] { return fit_sdf_grid(grid, std::move(initial), target, fit_cfg, cfg.weights); });

    std::string csv = "iteration,chamfer,cross_entropy,eikonal_proxy,total\n";
    for (const auto& rec : result.history) {
        csv += std::to_string(rec.iteration);
        csv += ',' + format_g(rec.terms.chamfer);
        csv += ',' + format_g(rec.terms.cross_entropy);
        csv += ',' + format_g(rec.terms.eikonal_proxy);
        csv += ',' + format_g(rec.terms.total);
        csv += '\n';
    }
    const std::string csv_path = cfg.output_dir + "/fit_history.csv";
    const std::string grid_path = cfg.output_dir + "/fit_sdf.artg";
    const std::string mesh_path = cfg.output_dir + "/fit_mesh.obj";
    ExtractedMesh fitted = numeric([&] { return marching_tetrahedra(grid, result.optimized); });
    numeric([&] {
        write_text(csv_path, csv);
        save_grid_sdf(result.optimized, grid_path);
        write_obj(fitted.mesh(), mesh_path);
        return 0;
    });

    ordered_json stats;
    const auto& first = result.history.front().terms;
    // True post-update loss (the last history record precedes the final step).
    const SdfFitTerms last = sdf_fit_loss(grid, result.optimized, target, cfg.weights);
    stats["iterations"] = cfg.fit.iterations;
    stats["initial"] = {{"chamfer", first.chamfer},
                        {"cross_entropy", first.cross_entropy},
                        {"eikonal_proxy", first.eikonal_proxy},
                        {"total", first.total}};
    stats["final"] = {{"chamfer", last.chamfer},
                      {"cross_entropy", last.cross_entropy},
                      {"eikonal_proxy", last.eikonal_proxy},
                      {"total", last.total}};
    stats["chamfer_drop"] = first.chamfer > 0 ? 1.0 - last.chamfer / first.chamfer : 0.0;
    stats["history_csv"] = csv_path;
    stats["grid_snapshot"] = grid_path;
    stats["fitted_mesh"] = mesh_path;
    write_manifest(cfg, "fit-sdf", std::move(stats));
    return 0;
}

int cmd_invert(const RunConfig& cfg, int threads) {
    Inputs in = load_inputs(cfg, threads, true);
    const Camera cam = validated([&] { return camera_from(cfg.cameras[cfg.invert.camera]); });

    const auto render_latent = [&](const LatentCode& z) {
        const IntermediateLatent w = in.fields->map(z);
        const Extraction ex = extract_surface(in, w.w_geo, cfg.invert.tet_resolution);
        return render_view(in, ex, w, cam);
    };

    const int dim = in.fields->latent_dim();
    const LatentCode target_z = LatentCode::gaussian(dim, cfg.invert.target_geometry_seed,
                                                     cfg.invert.target_texture_seed);
    const LatentCode init_z =
        LatentCode::gaussian(dim, cfg.invert.init_geometry_seed, cfg.invert.init_texture_seed);

    FitConfig fit_cfg;
    fit_cfg.iterations = cfg.invert.iterations;
    fit_cfg.step = cfg.invert.step;
    fit_cfg.momentum = false;
    fit_cfg.log_every = cfg.invert.log_every;

    const RenderBuffers target = numeric([&] { return render_latent(target_z); });
    const LatentFitResult result =
        numeric([&] { return fit_latent(target, render_latent, init_z, fit_cfg, cfg.invert.fd_step); });
    const RenderBuffers fitted = numeric([&] { return render_latent(result.best); });

    std::string csv = "iteration,loss\n";
    for (const auto& rec : result.history)
        csv += std::to_string(rec.iteration) + ',' + format_g(rec.loss) + '\n';
    const std::string csv_path = cfg.output_dir + "/invert_history.csv";

    ordered_json latent;
    latent["z_geo"] = std::vector<double>(result.best.z_geo.data(),
                                          result.best.z_geo.data() + result.best.z_geo.size());
    latent["z_tex"] = std::vector<double>(result.best.z_tex.data(),
                                          result.best.z_tex.data() + result.best.z_tex.size());
    latent["initial_loss"] = result.initial_loss;
    latent["best_loss"] = result.best_loss;
    const std::string latent_path = cfg.output_dir + "/invert_latent.json";

    numeric([&] {
        write_text(csv_path, csv);
        write_text(latent_path, latent.dump(1) + "\n");
        save_buffer_pngs(target, cfg.output_dir + "/invert_target");
        save_buffer_pngs(fitted, cfg.output_dir + "/invert_fitted");
        return 0;
    });

    ordered_json stats;
    stats["initial_loss"] = result.initial_loss;
    stats["best_loss"] = result.best_loss;
    stats["loss_drop"] =
        result.initial_loss > 0 ? 1.0 - result.best_loss / result.initial_loss : 0.0;
    stats["history_csv"] = csv_path;
    stats["latent_json"] = latent_path;
    write_manifest(cfg, "invert", std::move(stats));
    return 0;
}

int cmd_retexture(const RunConfig& cfg, int threads) {
    Inputs in = load_inputs(cfg, threads, true);
    const Camera cam = validated([&] { return camera_from(cfg.cameras[0]); });
    const int dim = in.fields->latent_dim();

    struct Variant {
        std::string label;
        std::uint64_t seed;
        std::string obj;
        std::string png;
    };
    Variant variants[2] = {{"a", cfg.retexture.seed_a, "", ""},
                           {"b", cfg.retexture.seed_b, "", ""}};

    for (Variant& v : variants) {
        // Full pipeline per texture seed: the geometry latent is shared, so
        // the extractions must agree byte for byte.
        const LatentCode z = LatentCode::gaussian(dim, cfg.geometry_seed, v.seed);
        const IntermediateLatent w = in.fields->map(z);
        const Extraction ex = numeric([&] { return extract_surface(in, w.w_geo, cfg.tet_resolution); });
        const RenderBuffers buffers = numeric([&] { return render_view(in, ex, w, cam); });
        v.obj = cfg.output_dir + "/mesh_tex" + v.label + ".obj";
        v.png = cfg.output_dir + "/rgb_tex" + v.label + ".png";
        numeric([&] {
            write_obj(ex.mesh.mesh(), v.obj);
            write_png_rgb8(v.png, buffers.width, buffers.height, quantize_rgb8(buffers.rgb));
            return 0;
        });
    }

    const auto slurp = [](const std::string& path) {
        std::ifstream file(path, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(file), {});
    };
    const bool identical = slurp(variants[0].obj) == slurp(variants[1].obj);

    ordered_json stats;
    stats["obj_a"] = variants[0].obj;
    stats["obj_b"] = variants[1].obj;
    stats["rgb_a"] = variants[0].png;
    stats["rgb_b"] = variants[1].png;
    stats["obj_identical"] = identical;
    write_manifest(cfg, "retexture", std::move(stats));
    return 0;
}

int cmd_gradcheck(const RunConfig& cfg) {
    const GradCheckReport report = numeric([&] { return run_gradcheck(cfg.gradcheck.seed); });
    std::fputs(format_report(report).c_str(), stdout);

    ordered_json rows = ordered_json::array();
    for (const GradCheckRow& row : report.rows)
        rows.push_back({{"name", row.name},
                        {"max_rel_err", row.max_rel_err},
                        {"tolerance", row.tolerance},
                        {"pass", row.pass}});
    ordered_json stats;
    stats["rows"] = std::move(rows);
    stats["all_pass"] = report.all_pass;
    write_manifest(cfg, "gradcheck", std::move(stats));

    if (!report.all_pass) throw NumericalError("gradient check failed");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"articulated textured mesh pipeline"};
    app.fallthrough();
    std::string config_path;
    std::vector<std::string> overrides;
    int threads = 1;
    bool paper_scale = false;
    app.add_option("--config", config_path, "JSON run configuration file");
    app.add_option("--set", overrides, "override a config key (key=value, repeatable)");
    app.add_option("--threads", threads, "worker thread cap (outputs are thread-count independent)")
        ->check(CLI::PositiveNumber);
    app.add_flag("--paper-scale", paper_scale, "full-scale defaults (256x256x32 planes, 512 latent)");
    app.require_subcommand(1);

    CLI::App* sub_generate = app.add_subcommand("generate", "create and save a seeded field snapshot");
    CLI::App* sub_extract = app.add_subcommand("extract-mesh", "extract the posed surface to OBJ/PLY");
    CLI::App* sub_render = app.add_subcommand("render", "render rgb/normal/mask/depth per camera");
    CLI::App* sub_fit = app.add_subcommand("fit-sdf", "fit the lattice SDF to target points");
    CLI::App* sub_invert = app.add_subcommand("invert", "recover latents from a rendered target");
    CLI::App* sub_retexture = app.add_subcommand("retexture", "swap texture latents over fixed geometry");
    CLI::App* sub_gradcheck = app.add_subcommand("gradcheck", "run the analytic-vs-FD gradient suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const RunConfig cfg = cli::load_run_config(config_path, overrides, paper_scale);
        std::error_code ec;
        fs::create_directories(cfg.output_dir, ec);
        if (ec) throw ValidationError("cannot create output_dir: " + cfg.output_dir);

        if (sub_generate->parsed()) return cmd_generate(cfg, threads);
        if (sub_extract->parsed()) return cmd_extract(cfg, threads);
        if (sub_render->parsed()) return cmd_render(cfg, threads);
        if (sub_fit->parsed()) return cmd_fit_sdf(cfg, threads);
        if (sub_invert->parsed()) return cmd_invert(cfg, threads);
        if (sub_retexture->parsed()) return cmd_retexture(cfg, threads);
        if (sub_gradcheck->parsed()) return cmd_gradcheck(cfg);
        std::fprintf(stderr, "error: no subcommand\n");
        return 2;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
