#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "arti/fields.hpp"
#include "arti/geometry.hpp"
#include "arti/objective.hpp"

namespace arti::cli {

/// Anything wrong with the inputs before compute starts; mapped to exit 2.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// NaN/divergence/degeneracy during compute; mapped to exit 3.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CameraConfig {
    double radius = 2.3;
    double azimuth = 0.0;
    double elevation = 0.0;
    double fov = 49.13;
    int width = 256;
    int height = 256;
};

/// Fully-resolved run settings. Defaults are desk scale; `--paper-scale`
/// swaps in the full-scale constants (triplane 256x256x32, latent 512,
/// mapping 8x512, 512^2 renders) before file/--set overrides apply.
struct RunConfig {
    std::string body_model;  // empty => icosphere template, no warping

    struct Template {
        std::string kind = "body";  // body | icosphere
        double radius = 0.6;
        int subdivisions = 3;
    } shape_template;

    std::uint64_t geometry_seed = 1;
    std::uint64_t texture_seed = 2;

    struct Planes {
        int resolution = 64;
        int channels = 16;
        std::string aggregation = "sum";  // sum | concat
    } triplane;
    struct MappingNet {
        int width = 32;
        int layers = 3;
    } mapping;
    struct DecoderNet {
        int width = 64;
        int layers = 3;
    } decoder;
    int latent_dim = 16;
    double offset_scale = 0.0;  // <= 0: library default
    bool zero_offset = false;   // replace the geometry decoder with zeros
    std::string normal_mode = "analytic";  // analytic | fd

    int tet_resolution = 64;
    struct Lattice {
        bool automatic = true;  // bounds from the posed guidance / template
        Vec3 center = Vec3::Zero();
        double half = 1.0;
    } lattice;

    std::string snapshot;  // resolved default: <output_dir>/fieldset.arts

    struct Pose {
        std::vector<double> theta;  // flat, 3 per joint + 3 translation
        std::vector<double> beta;
        std::string file;
    } pose;

    std::vector<CameraConfig> cameras;
    LossWeights weights;
    std::string output_dir = "out";
    bool dump_float = false;

    struct Fit {
        int iterations = 200;
        double step = 0.02;
        bool momentum = true;
        double momentum_coeff = 0.9;
        std::uint64_t seed = 7;
        double convergence = 0.0;
        int log_every = 10;
        struct Target {
            std::string kind = "sphere";  // sphere | file
            double radius = 0.5;
            int count = 2000;
            std::uint64_t seed = 11;
            std::string file;
        } target;
        struct Init {
            std::string kind = "field";  // field | sphere
            double radius = 0.9;
        } init;
    } fit;

    struct Invert {
        int iterations = 12;
        double step = 0.5;
        double fd_step = 0.05;
        int log_every = 1;
        std::uint64_t target_geometry_seed = 21;
        std::uint64_t target_texture_seed = 22;
        std::uint64_t init_geometry_seed = 31;
        std::uint64_t init_texture_seed = 32;
        int tet_resolution = 24;
        int camera = 0;
    } invert;

    struct Retexture {
        std::uint64_t seed_a = 101;
        std::uint64_t seed_b = 102;
    } retexture;

    struct Gradcheck {
        std::uint64_t seed = 99;
    } gradcheck;

    FieldSet::Params field_params() const;
    TriPlane::Aggregation aggregation() const;
    NormalMode normal() const;

    /// Every resolved value, for the manifest. Deterministic key order, no
    /// timestamps.
    nlohmann::ordered_json resolved() const;
};

/// Defaults -> optional config file -> --set key=value overrides, then
/// exhaustive validation (unknown keys rejected with their full path).
RunConfig load_run_config(const std::string& config_path,
                          const std::vector<std::string>& overrides, bool paper_scale);

} // namespace arti::cli
