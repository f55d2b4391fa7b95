#include "run_config.hpp"

#include <cmath>
#include <fstream>

namespace arti::cli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& msg) { throw ValidationError(msg); }

double get_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail("config key " + path + " must be a number");
    return v.get<double>();
}

int get_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail("config key " + path + " must be an integer");
    return v.get<int>();
}

std::uint64_t get_seed(const json& v, const std::string& path) {
    if (!v.is_number_integer() || v.get<double>() < 0)
        fail("config key " + path + " must be a nonnegative integer");
    return v.get<std::uint64_t>();
}

bool get_bool(const json& v, const std::string& path) {
    if (!v.is_boolean()) fail("config key " + path + " must be a boolean");
    return v.get<bool>();
}

std::string get_string(const json& v, const std::string& path) {
    if (!v.is_string()) fail("config key " + path + " must be a string");
    return v.get<std::string>();
}

std::vector<double> get_number_list(const json& v, const std::string& path) {
    if (!v.is_array()) fail("config key " + path + " must be an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) {
        if (!e.is_number()) fail("config key " + path + " must be an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

void require_object(const json& v, const std::string& path) {
    if (!v.is_object()) fail("config key " + path + " must be an object");
}

void parse_template(const json& doc, RunConfig::Template& t, const std::string& path) {
    require_object(doc, path);
    for (const auto& [key, val] : doc.items()) {
        if (key == "kind") t.kind = get_string(val, path + ".kind");
        else if (key == "radius") t.radius = get_number(val, path + ".radius");
        else if (key == "subdivisions") t.subdivisions = get_int(val, path + ".subdivisions");
        else fail("unknown config key: " + path + "." + key);
    }
}

void parse_seeds(const json& doc, RunConfig& cfg, const std::string& path) {
    require_object(doc, path);
    for (const auto& [key, val] : doc.items()) {
        if (key == "geometry") cfg.geometry_seed = get_seed(val, path + ".geometry");
        else if (key == "texture") cfg.texture_seed = get_seed(val, path + ".texture");
        else fail("unknown config key: " + path + "." + key);
    }
}

void parse_triplane(const json& doc, RunConfig::Planes& p, const std::string& path) {
    require_object(doc, path);
    for (const auto& [key, val] : doc.items()) {
        if (key == "resolution") p.resolution = get_int(val, path + ".resolution");
        else if (key == "channels") p.channels = get_int(val, path + ".channels");
        else if (key == "aggregation") p.aggregation = get_string(val, path + ".aggregation");
        else fail("unknown config key: " + path + "." + key);
    }
}

void parse_net(const json& doc, int& width, int& layers, const std::string& path) {
    require_object(doc, path);
    for (const auto& [key, val] : doc.items()) {
        if (key == "width") width = get_int(val, path + ".width");
        else if (key == "layers") layers = get_int(val, path + ".layers");
        else fail("unknown config key: " + path + "." + key);
    }
}

void parse_lattice(const json& doc, RunConfig::Lattice& l, const std::string& path) {
    require_object(doc, path);
    for (const auto& [key, val] : doc.items()) {
        if (key == "center") {
            const auto c = get_number_list(val, path + ".center");
            if (c.size() != 3) fail("config key " + path + ".center must have 3 entries");
            l.center = Vec3(c[0], c[1], c[2]);
            l.automatic = false;
        } else if (key == "half") {
            l.half = get_number(val, path + ".half");
            l.automatic = false;
        } else {
            fail("unknown config key: " + path + "." + key);
        }
    }
}

void parse_pose(const json& doc, RunConfig::Pose& p, const std::string& path) {
    require_object(doc, path);
    for (const auto& [key, val] : doc.items()) {
        if (key == "theta") p.theta = get_number_list(val, path + ".theta");
        else if (key == "beta") p.beta = get_number_list(val, path + ".beta");
        else if (key == "file") p.file = get_string(val, path + ".file");
        else fail("unknown config key: " + path + "." + key);
    }
}

void parse_camera(const json& doc, CameraConfig& cam, const std::string& path) {
    require_object(doc, path);
    for (const auto& [key, val] : doc.items()) {
        if (key == "radius") cam.radius = get_number(val, path + ".radius");
        else if (key == "azimuth") cam.azimuth = get_number(val, path + ".azimuth");
        else if (key == "elevation") cam.elevation = get_number(val, path + ".elevation");
        else if (key == "fov") cam.fov = get_number(val, path + ".fov");
        else if (key == "width") cam.width = get_int(val, path + ".width");
        else if (key == "height") cam.height = get_int(val, path + ".height");
        else fail("unknown config key: " + path + "." + key);
    }
}

void parse_weights(const json& doc, LossWeights& w, const std::string& path) {
    require_object(doc, path);
    for (const auto& [key, val] : doc.items()) {
        if (key == "eikonal") w.lambda_eik = get_number(val, path + ".eikonal");
        else if (key == "cross_entropy") w.lambda_ce = get_number(val, path + ".cross_entropy");
        else fail("unknown config key: " + path + "." + key);
    }
}

void parse_fit_target(const json& doc, RunConfig::Fit::Target& t, const std::string& path) {
    require_object(doc, path);
    for (const auto& [key, val] : doc.items()) {
        if (key == "kind") t.kind = get_string(val, path + ".kind");
        else if (key == "radius") t.radius = get_number(val, path + ".radius");
        else if (key == "count") t.count = get_int(val, path + ".count");
        else if (key == "seed") t.seed = get_seed(val, path + ".seed");
        else if (key == "file") t.file = get_string(val, path + ".file");
        else fail("unknown config key: " + path + "." + key);
    }
}

void parse_fit_init(const json& doc, RunConfig::Fit::Init& i, const std::string& path) {
    require_object(doc, path);
    for (const auto& [key, val] : doc.items()) {
        if (key == "kind") i.kind = get_string(val, path + ".kind");
        else if (key == "radius") i.radius = get_number(val, path + ".radius");
        else fail("unknown config key: " + path + "." + key);
    }
}

void parse_fit(const json& doc, RunConfig::Fit& f, const std::string& path) {
    require_object(doc, path);
    for (const auto& [key, val] : doc.items()) {
        if (key == "iterations") f.iterations = get_int(val, path + ".iterations");
        else if (key == "step") f.step = get_number(val, path + ".step");
        else if (key == "momentum") f.momentum = get_bool(val, path + ".momentum");
        else if (key == "momentum_coeff") f.momentum_coeff = get_number(val, path + ".momentum_coeff");
        else if (key == "seed") f.seed = get_seed(val, path + ".seed");
        else if (key == "convergence") f.convergence = get_number(val, path + ".convergence");
        else if (key == "log_every") f.log_every = get_int(val, path + ".log_every");
        else if (key == "target") parse_fit_target(val, f.target, path + ".target");
        else if (key == "init") parse_fit_init(val, f.init, path + ".init");
        else fail("unknown config key: " + path + "." + key);
    }
}

void parse_invert(const json& doc, RunConfig::Invert& v, const std::string& path) {
    require_object(doc, path);
    for (const auto& [key, val] : doc.items()) {
        if (key == "iterations") v.iterations = get_int(val, path + ".iterations");
        else if (key == "step") v.step = get_number(val, path + ".step");
        else if (key == "fd_step") v.fd_step = get_number(val, path + ".fd_step");
        else if (key == "log_every") v.log_every = get_int(val, path + ".log_every");
        else if (key == "target_geometry_seed")
            v.target_geometry_seed = get_seed(val, path + ".target_geometry_seed");
        else if (key == "target_texture_seed")
            v.target_texture_seed = get_seed(val, path + ".target_texture_seed");
        else if (key == "init_geometry_seed")
            v.init_geometry_seed = get_seed(val, path + ".init_geometry_seed");
        else if (key == "init_texture_seed")
            v.init_texture_seed = get_seed(val, path + ".init_texture_seed");
        else if (key == "tet_resolution") v.tet_resolution = get_int(val, path + ".tet_resolution");
        else if (key == "camera") v.camera = get_int(val, path + ".camera");
        else fail("unknown config key: " + path + "." + key);
    }
}

void parse_retexture(const json& doc, RunConfig::Retexture& r, const std::string& path) {
    require_object(doc, path);
    for (const auto& [key, val] : doc.items()) {
        if (key == "seed_a") r.seed_a = get_seed(val, path + ".seed_a");
        else if (key == "seed_b") r.seed_b = get_seed(val, path + ".seed_b");
        else fail("unknown config key: " + path + "." + key);
    }
}

void parse_gradcheck(const json& doc, RunConfig::Gradcheck& g, const std::string& path) {
    require_object(doc, path);
    for (const auto& [key, val] : doc.items()) {
        if (key == "seed") g.seed = get_seed(val, path + ".seed");
        else fail("unknown config key: " + path + "." + key);
    }
}

void parse_document(const json& doc, RunConfig& cfg, const CameraConfig& base_camera) {
    require_object(doc, "config");
    for (const auto& [key, val] : doc.items()) {
        if (key == "body_model") cfg.body_model = get_string(val, "body_model");
        else if (key == "template") parse_template(val, cfg.shape_template, "template");
        else if (key == "seeds") parse_seeds(val, cfg, "seeds");
        else if (key == "triplane") parse_triplane(val, cfg.triplane, "triplane");
        else if (key == "mapping") parse_net(val, cfg.mapping.width, cfg.mapping.layers, "mapping");
        else if (key == "decoder") parse_net(val, cfg.decoder.width, cfg.decoder.layers, "decoder");
        else if (key == "latent_dim") cfg.latent_dim = get_int(val, "latent_dim");
        else if (key == "offset_scale") cfg.offset_scale = get_number(val, "offset_scale");
        else if (key == "zero_offset") cfg.zero_offset = get_bool(val, "zero_offset");
        else if (key == "normal_mode") cfg.normal_mode = get_string(val, "normal_mode");
        else if (key == "tet_resolution") cfg.tet_resolution = get_int(val, "tet_resolution");
        else if (key == "lattice") parse_lattice(val, cfg.lattice, "lattice");
        else if (key == "snapshot") cfg.snapshot = get_string(val, "snapshot");
        else if (key == "pose") parse_pose(val, cfg.pose, "pose");
        else if (key == "cameras") {
            if (!val.is_array() || val.empty()) fail("config key cameras must be a non-empty array");
            cfg.cameras.clear();
            for (std::size_t i = 0; i < val.size(); ++i) {
                CameraConfig cam = base_camera;
                parse_camera(val[i], cam, "cameras." + std::to_string(i));
                cfg.cameras.push_back(cam);
            }
        } else if (key == "loss_weights") parse_weights(val, cfg.weights, "loss_weights");
        else if (key == "output_dir") cfg.output_dir = get_string(val, "output_dir");
        else if (key == "dump_float") cfg.dump_float = get_bool(val, "dump_float");
        else if (key == "fit") parse_fit(val, cfg.fit, "fit");
        else if (key == "invert") parse_invert(val, cfg.invert, "invert");
        else if (key == "retexture") parse_retexture(val, cfg.retexture, "retexture");
        else if (key == "gradcheck") parse_gradcheck(val, cfg.gradcheck, "gradcheck");
        else fail("unknown config key: " + key);
    }
}

void check_ranges(const RunConfig& cfg) {
    if (cfg.shape_template.kind != "body" && cfg.shape_template.kind != "icosphere")
        fail("template.kind must be body or icosphere");
    if (cfg.shape_template.kind == "body" && cfg.body_model.empty())
        fail("template.kind body requires a body_model path");
    if (cfg.shape_template.kind == "icosphere" && !cfg.body_model.empty())
        fail("icosphere template does not take a body model");
    if (cfg.shape_template.radius <= 0) fail("template.radius must be positive");
    if (cfg.shape_template.subdivisions < 0 || cfg.shape_template.subdivisions > 7)
        fail("template.subdivisions must be in [0, 7]");

    if (cfg.triplane.resolution < 2) fail("triplane resolution must be at least 2");
    if (cfg.triplane.channels < 1) fail("triplane.channels must be at least 1");
    if (cfg.triplane.aggregation != "sum" && cfg.triplane.aggregation != "concat")
        fail("triplane.aggregation must be sum or concat");
    if (cfg.mapping.width < 1 || cfg.mapping.layers < 1)
        fail("mapping width and layers must be at least 1");
    if (cfg.decoder.width < 1 || cfg.decoder.layers < 1)
        fail("decoder width and layers must be at least 1");
    if (cfg.latent_dim < 1) fail("latent_dim must be at least 1");
    if (cfg.normal_mode != "analytic" && cfg.normal_mode != "fd")
        fail("normal_mode must be analytic or fd");

    if (cfg.tet_resolution < 2) fail("tet grid resolution must be at least 2");
    if (!cfg.lattice.automatic && cfg.lattice.half <= 0) fail("lattice.half must be positive");

    if (!cfg.pose.file.empty() && (!cfg.pose.theta.empty() || !cfg.pose.beta.empty()))
        fail("pose source must be inline or a file, not both");
    if (cfg.body_model.empty() &&
        (!cfg.pose.file.empty() || !cfg.pose.theta.empty() || !cfg.pose.beta.empty()))
        fail("pose requires a body model");

    for (std::size_t i = 0; i < cfg.cameras.size(); ++i) {
        const CameraConfig& cam = cfg.cameras[i];
        const std::string at = "cameras." + std::to_string(i);
        if (cam.radius <= 0) fail(at + ".radius must be positive");
        if (cam.fov <= 0 || cam.fov >= 180) fail(at + ".fov must be in (0, 180)");
        if (cam.width < 1 || cam.height < 1) fail(at + " resolution must be at least 1x1");
        if (std::abs(cam.elevation) >= 0.5 * kPi)
            fail(at + ".elevation must satisfy |elevation| < pi/2");
    }

    if (cfg.weights.lambda_eik < 0 || cfg.weights.lambda_ce < 0)
        fail("loss weights must be nonnegative");
    if (cfg.output_dir.empty()) fail("output_dir must not be empty");

    if (cfg.fit.iterations < 1) fail("fit.iterations must be at least 1");
    if (cfg.fit.step <= 0) fail("fit.step must be positive");
    if (cfg.fit.momentum_coeff < 0 || cfg.fit.momentum_coeff >= 1)
        fail("fit.momentum_coeff must be in [0, 1)");
    if (cfg.fit.log_every < 1) fail("fit.log_every must be at least 1");
    if (cfg.fit.convergence < 0) fail("fit.convergence must be nonnegative");
    if (cfg.fit.target.kind != "sphere" && cfg.fit.target.kind != "file")
        fail("fit.target.kind must be sphere or file");
    if (cfg.fit.target.kind == "sphere") {
        if (cfg.fit.target.radius <= 0) fail("fit.target.radius must be positive");
        if (cfg.fit.target.count < 1) fail("fit.target.count must be at least 1");
    } else if (cfg.fit.target.file.empty()) {
        fail("fit.target.kind file requires fit.target.file");
    }
    if (cfg.fit.init.kind != "field" && cfg.fit.init.kind != "sphere")
        fail("fit.init.kind must be field or sphere");
    if (cfg.fit.init.kind == "sphere" && cfg.fit.init.radius <= 0)
        fail("fit.init.radius must be positive");

    if (cfg.invert.iterations < 0) fail("invert.iterations must be nonnegative");
    if (cfg.invert.step <= 0) fail("invert.step must be positive");
    if (cfg.invert.fd_step <= 0) fail("invert.fd_step must be positive");
    if (cfg.invert.log_every < 1) fail("invert.log_every must be at least 1");
    if (cfg.invert.tet_resolution < 2) fail("tet grid resolution must be at least 2");
    if (cfg.invert.camera < 0 || cfg.invert.camera >= static_cast<int>(cfg.cameras.size()))
        fail("invert.camera index out of range");
}

void apply_override(json& doc, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0)
        fail("--set expects key=value, got: " + spec);
    const std::string path = spec.substr(0, eq);
    const std::string raw = spec.substr(eq + 1);

    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;  // bare strings stay strings
    }

    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        parts.push_back(path.substr(start, dot - start));
        if (dot == std::string::npos) break;
        start = dot + 1;
    }

    json* node = &doc;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        const std::string& part = parts[i];
        if (node->is_array()) {
            std::size_t idx = 0;
            try {
                idx = std::stoul(part);
            } catch (...) {
                fail("--set path " + path + ": " + part + " is not an array index");
            }
            if (idx >= node->size()) fail("--set path " + path + ": index " + part + " out of range");
            node = &(*node)[idx];
        } else {
            if (!node->is_object()) fail("--set path " + path + " descends into a scalar");
            node = &(*node)[part];
            if (node->is_null()) *node = json::object();
        }
    }
    const std::string& last = parts.back();
    if (node->is_array()) {
        std::size_t idx = 0;
        try {
            idx = std::stoul(last);
        } catch (...) {
            fail("--set path " + path + ": " + last + " is not an array index");
        }
        if (idx >= node->size()) fail("--set path " + path + ": index " + last + " out of range");
        (*node)[idx] = value;
    } else {
        if (!node->is_object()) fail("--set path " + path + " descends into a scalar");
        (*node)[last] = value;
    }
}

} // namespace

FieldSet::Params RunConfig::field_params() const {
    FieldSet::Params p;
    p.plane_resolution = triplane.resolution;
    p.plane_channels = triplane.channels;
    p.latent_dim = latent_dim;
    p.mapping_width = mapping.width;
    p.mapping_layers = mapping.layers;
    p.decoder_width = decoder.width;
    p.decoder_layers = decoder.layers;
    p.offset_scale = offset_scale;
    p.aggregation = aggregation();
    p.geometry_seed = geometry_seed;
    p.texture_seed = texture_seed;
    return p;
}

TriPlane::Aggregation RunConfig::aggregation() const {
    return triplane.aggregation == "concat" ? TriPlane::kConcat : TriPlane::kSum;
}

NormalMode RunConfig::normal() const {
    return normal_mode == "fd" ? NormalMode::kFiniteDifference : NormalMode::kAnalytic;
}

nlohmann::ordered_json RunConfig::resolved() const {
    ordered_json j;
    j["body_model"] = body_model;
    j["template"] = {{"kind", shape_template.kind},
                     {"radius", shape_template.radius},
                     {"subdivisions", shape_template.subdivisions}};
    j["seeds"] = {{"geometry", geometry_seed}, {"texture", texture_seed}};
    j["triplane"] = {{"resolution", triplane.resolution},
                     {"channels", triplane.channels},
                     {"aggregation", triplane.aggregation}};
    j["mapping"] = {{"width", mapping.width}, {"layers", mapping.layers}};
    j["decoder"] = {{"width", decoder.width}, {"layers", decoder.layers}};
    j["latent_dim"] = latent_dim;
    j["offset_scale"] = offset_scale;
    j["zero_offset"] = zero_offset;
    j["normal_mode"] = normal_mode;
    j["tet_resolution"] = tet_resolution;
    if (lattice.automatic) {
        j["lattice"] = "auto";
    } else {
        j["lattice"] = {{"center", {lattice.center.x(), lattice.center.y(), lattice.center.z()}},
                        {"half", lattice.half}};
    }
    j["snapshot"] = snapshot;
    j["pose"] = {{"theta", pose.theta}, {"beta", pose.beta}, {"file", pose.file}};
    ordered_json cams = ordered_json::array();
    for (const CameraConfig& c : cameras)
        cams.push_back({{"radius", c.radius},
                        {"azimuth", c.azimuth},
                        {"elevation", c.elevation},
                        {"fov", c.fov},
                        {"width", c.width},
                        {"height", c.height}});
    j["cameras"] = cams;
    j["loss_weights"] = {{"eikonal", weights.lambda_eik}, {"cross_entropy", weights.lambda_ce}};
    j["output_dir"] = output_dir;
    j["dump_float"] = dump_float;
    j["fit"] = {{"iterations", fit.iterations},
                {"step", fit.step},
                {"momentum", fit.momentum},
                {"momentum_coeff", fit.momentum_coeff},
                {"seed", fit.seed},
                {"convergence", fit.convergence},
                {"log_every", fit.log_every},
                {"target",
                 {{"kind", fit.target.kind},
                  {"radius", fit.target.radius},
                  {"count", fit.target.count},
                  {"seed", fit.target.seed},
                  {"file", fit.target.file}}},
                {"init", {{"kind", fit.init.kind}, {"radius", fit.init.radius}}}};
    j["invert"] = {{"iterations", invert.iterations},
                   {"step", invert.step},
                   {"fd_step", invert.fd_step},
                   {"log_every", invert.log_every},
                   {"target_geometry_seed", invert.target_geometry_seed},
                   {"target_texture_seed", invert.target_texture_seed},
                   {"init_geometry_seed", invert.init_geometry_seed},
                   {"init_texture_seed", invert.init_texture_seed},
                   {"tet_resolution", invert.tet_resolution},
                   {"camera", invert.camera}};
    j["retexture"] = {{"seed_a", retexture.seed_a}, {"seed_b", retexture.seed_b}};
    j["gradcheck"] = {{"seed", gradcheck.seed}};
    return j;
}

RunConfig load_run_config(const std::string& config_path,
                          const std::vector<std::string>& overrides, bool paper_scale) {
    RunConfig cfg;
    CameraConfig base_camera;
    if (paper_scale) {
        cfg.triplane.resolution = 256;
        cfg.triplane.channels = 32;
        cfg.latent_dim = 512;
        cfg.mapping.width = 512;
        cfg.mapping.layers = 8;
        base_camera.width = 512;
        base_camera.height = 512;
    }
    cfg.cameras.push_back(base_camera);

    json doc = json::object();
    if (!config_path.empty()) {
        std::ifstream file(config_path);
        if (!file) fail("cannot open config file: " + config_path);
        try {
            doc = json::parse(file);
        } catch (const json::parse_error& e) {
            fail("config parse failure: " + std::string(e.what()));
        }
    }
    for (const std::string& spec : overrides) apply_override(doc, spec);

    parse_document(doc, cfg, base_camera);
    if (cfg.snapshot.empty()) cfg.snapshot = cfg.output_dir + "/fieldset.arts";
    check_ranges(cfg);
    return cfg;
}

} // namespace arti::cli
