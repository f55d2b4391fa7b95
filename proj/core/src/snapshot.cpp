#include "arti/snapshot.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace arti {

namespace {

// Fixed-width little-endian binary IO. The build targets little-endian
// platforms; native writes of fixed-width types keep the format stable.
class Writer {
public:
    explicit Writer(const std::string& path) : file_(path, std::ios::binary), path_(path) {
        if (!file_) throw std::runtime_error("cannot open for writing: " + path);
    }
    ~Writer() { file_.flush(); }

    void raw(const void* data, std::size_t bytes) {
        file_.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
        if (!file_) throw std::runtime_error("write failed: " + path_);
    }
    void u32(std::uint32_t v) { raw(&v, 4); }
    void u64(std::uint64_t v) { raw(&v, 8); }
    void f32(float v) { raw(&v, 4); }
    void f64(double v) { raw(&v, 8); }

private:
    std::ofstream file_;
    std::string path_;
};

class Reader {
public:
    explicit Reader(const std::string& path) : file_(path, std::ios::binary), path_(path) {
        if (!file_) throw std::runtime_error("cannot open: " + path);
    }

    void raw(void* data, std::size_t bytes) {
        file_.read(static_cast<char*>(data), static_cast<std::streamsize>(bytes));
        if (!file_) throw std::runtime_error("truncated snapshot: " + path_);
    }
    std::uint32_t u32() { std::uint32_t v; raw(&v, 4); return v; }
    std::uint64_t u64() { std::uint64_t v; raw(&v, 8); return v; }
    float f32() { float v; raw(&v, 4); return v; }
    double f64() { double v; raw(&v, 8); return v; }

private:
    std::ifstream file_;
    std::string path_;
};

void write_magic(Writer& w, const char magic[4]) { w.raw(magic, 4); }

void expect_magic(Reader& r, const char magic[4], const char* what) {
    char buf[4];
    r.raw(buf, 4);
    if (std::memcmp(buf, magic, 4) != 0)
        throw std::runtime_error(std::string("snapshot is not a ") + what);
}

void write_box(Writer& w, const Box3& b) {
    for (int i = 0; i < 3; ++i) w.f64(b.lo[i]);
    for (int i = 0; i < 3; ++i) w.f64(b.hi[i]);
}

Box3 read_box(Reader& r) {
    Box3 b;
    for (int i = 0; i < 3; ++i) b.lo[i] = r.f64();
    for (int i = 0; i < 3; ++i) b.hi[i] = r.f64();
    return b;
}

// Shape-prefixed float32 matrix; values are exactly float-representable.
void write_matrix(Writer& w, const MatX& m) {
    w.u32(static_cast<std::uint32_t>(m.rows()));
    w.u32(static_cast<std::uint32_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) w.f32(static_cast<float>(m(r, c)));
}

MatX read_matrix(Reader& r) {
    const std::uint32_t rows = r.u32();
    const std::uint32_t cols = r.u32();
    MatX m(rows, cols);
    for (std::uint32_t i = 0; i < rows; ++i)
        for (std::uint32_t j = 0; j < cols; ++j) m(i, j) = static_cast<double>(r.f32());
    return m;
}

void write_vector(Writer& w, const VecX& v) {
    w.u32(static_cast<std::uint32_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) w.f32(static_cast<float>(v[i]));
}

VecX read_vector(Reader& r) {
    const std::uint32_t n = r.u32();
    VecX v(n);
    for (std::uint32_t i = 0; i < n; ++i) v[i] = static_cast<double>(r.f32());
    return v;
}

void write_mlp(Writer& w, const DecoderMLP& net) {
    w.u32(static_cast<std::uint32_t>(net.widths().size()));
    for (int width : net.widths()) w.u32(static_cast<std::uint32_t>(width));
    w.u32(static_cast<std::uint32_t>(net.modulation_width()));
    for (int l = 0; l < net.layer_count(); ++l) {
        const auto& layer = net.layer(l);
        write_matrix(w, layer.weight);
        write_vector(w, layer.bias);
        write_matrix(w, layer.mod_scale_weight);
        write_vector(w, layer.mod_scale_bias);
        write_matrix(w, layer.mod_shift_weight);
        write_vector(w, layer.mod_shift_bias);
    }
}

DecoderMLP read_mlp(Reader& r) {
    const std::uint32_t n_widths = r.u32();
    std::vector<int> widths(n_widths);
    for (auto& width : widths) width = static_cast<int>(r.u32());
    const int mod = static_cast<int>(r.u32());
    DecoderMLP net(widths, mod);
    for (int l = 0; l < net.layer_count(); ++l) {
        auto& layer = net.layer(l);
        layer.weight = read_matrix(r);
        layer.bias = read_vector(r);
        layer.mod_scale_weight = read_matrix(r);
        layer.mod_scale_bias = read_vector(r);
        layer.mod_shift_weight = read_matrix(r);
        layer.mod_shift_bias = read_vector(r);
    }
    return net;
}

void write_plane_payload(Writer& w, const TriPlane& tp) {
    w.u32(static_cast<std::uint32_t>(tp.resolution()));
    w.u32(static_cast<std::uint32_t>(tp.channels()));
    w.u32(tp.aggregation() == TriPlane::kSum ? 0u : 1u);
    write_box(w, tp.bounds());
    for (int p = 0; p < 3; ++p) {
        const auto& data = tp.plane_data(p);
        w.raw(data.data(), data.size() * sizeof(float));
    }
}

TriPlane read_plane_payload(Reader& r) {
    const int n = static_cast<int>(r.u32());
    const int c = static_cast<int>(r.u32());
    const auto agg = r.u32() == 0 ? TriPlane::kSum : TriPlane::kConcat;
    const Box3 bounds = read_box(r);
    TriPlane tp(n, c, bounds, agg);
    for (int p = 0; p < 3; ++p) {
        auto& data = tp.plane_data(p);
        r.raw(data.data(), data.size() * sizeof(float));
    }
    return tp;
}

void write_mesh(Writer& w, const TriMesh& mesh) {
    w.u32(static_cast<std::uint32_t>(mesh.vertices.size()));
    w.u32(static_cast<std::uint32_t>(mesh.faces.size()));
    for (const Vec3& v : mesh.vertices)
        for (int i = 0; i < 3; ++i) w.f64(v[i]);
    for (const Face& f : mesh.faces)
        for (int i : f) w.u32(static_cast<std::uint32_t>(i));
}

TriMesh read_mesh(Reader& r) {
    TriMesh mesh;
    mesh.vertices.resize(r.u32());
    mesh.faces.resize(r.u32());
    for (Vec3& v : mesh.vertices)
        for (int i = 0; i < 3; ++i) v[i] = r.f64();
    for (Face& f : mesh.faces)
        for (int& i : f) i = static_cast<int>(r.u32());
    return mesh;
}

constexpr char kFieldSetMagic[4] = {'A', 'R', 'T', 'S'};
constexpr char kTriPlaneMagic[4] = {'A', 'R', 'T', 'P'};
constexpr char kGridMagic[4] = {'A', 'R', 'T', 'G'};

} // namespace

void save_fieldset(const FieldSet& fields, const std::string& path) {
    Writer w(path);
    write_magic(w, kFieldSetMagic);
    w.u32(1);  // version

    const FieldSet::Params& p = fields.params();
    w.u32(static_cast<std::uint32_t>(p.plane_resolution));
    w.u32(static_cast<std::uint32_t>(p.plane_channels));
    w.u32(static_cast<std::uint32_t>(p.latent_dim));
    w.u32(static_cast<std::uint32_t>(p.mapping_width));
    w.u32(static_cast<std::uint32_t>(p.mapping_layers));
    w.u32(static_cast<std::uint32_t>(p.decoder_width));
    w.u32(static_cast<std::uint32_t>(p.decoder_layers));
    w.u32(p.aggregation == TriPlane::kSum ? 0u : 1u);
    w.u64(p.geometry_seed);
    w.u64(p.texture_seed);
    w.f64(fields.offset_scale());

    write_mesh(w, fields.template_mesh());
    write_plane_payload(w, fields.geometry_plane());
    write_plane_payload(w, fields.texture_plane());
    write_mlp(w, fields.geometry_mapping());
    write_mlp(w, fields.texture_mapping());
    write_mlp(w, fields.geometry_decoder());
    write_mlp(w, fields.texture_decoder());
}

FieldSet load_fieldset(const std::string& path) {
    Reader r(path);
    expect_magic(r, kFieldSetMagic, "field set snapshot");
    if (r.u32() != 1) throw std::runtime_error("unsupported field set snapshot version");

    FieldSet::Params p;
    p.plane_resolution = static_cast<int>(r.u32());
    p.plane_channels = static_cast<int>(r.u32());
    p.latent_dim = static_cast<int>(r.u32());
    p.mapping_width = static_cast<int>(r.u32());
    p.mapping_layers = static_cast<int>(r.u32());
    p.decoder_width = static_cast<int>(r.u32());
    p.decoder_layers = static_cast<int>(r.u32());
    p.aggregation = r.u32() == 0 ? TriPlane::kSum : TriPlane::kConcat;
    p.geometry_seed = r.u64();
    p.texture_seed = r.u64();
    const double offset_scale = r.f64();
    p.offset_scale = offset_scale;

    TriMesh mesh = read_mesh(r);
    TriPlane geo = read_plane_payload(r);
    TriPlane tex = read_plane_payload(r);
    DecoderMLP geo_map = read_mlp(r);
    DecoderMLP tex_map = read_mlp(r);
    DecoderMLP geo_dec = read_mlp(r);
    DecoderMLP tex_dec = read_mlp(r);
    return FieldSet(std::move(mesh), std::move(geo), std::move(tex), std::move(geo_map),
                    std::move(tex_map), std::move(geo_dec), std::move(tex_dec), offset_scale, p);
}

void save_triplane(const TriPlane& plane, const std::string& path) {
    Writer w(path);
    write_magic(w, kTriPlaneMagic);
    write_plane_payload(w, plane);
}

TriPlane load_triplane(const std::string& path) {
    Reader r(path);
    expect_magic(r, kTriPlaneMagic, "triplane dump");
    return read_plane_payload(r);
}

void save_grid_sdf(const GridSDF& sdf, const std::string& path) {
    Writer w(path);
    write_magic(w, kGridMagic);
    w.u64(sdf.values.size());
    w.raw(sdf.values.data(), sdf.values.size() * sizeof(double));
    w.u32(static_cast<std::uint32_t>(sdf.provenance.pose_theta.size()));
    for (double v : sdf.provenance.pose_theta) w.f64(v);
    w.u32(static_cast<std::uint32_t>(sdf.provenance.shape.size()));
    for (double v : sdf.provenance.shape) w.f64(v);
    w.u64(sdf.provenance.geometry_seed);
    w.u64(sdf.provenance.texture_seed);
}

GridSDF load_grid_sdf(const std::string& path) {
    Reader r(path);
    expect_magic(r, kGridMagic, "grid SDF dump");
    GridSDF sdf;
    sdf.values.resize(r.u64());
    r.raw(sdf.values.data(), sdf.values.size() * sizeof(double));
    sdf.provenance.pose_theta.resize(r.u32());
    for (double& v : sdf.provenance.pose_theta) v = r.f64();
    sdf.provenance.shape.resize(r.u32());
    for (double& v : sdf.provenance.shape) v = r.f64();
    sdf.provenance.geometry_seed = r.u64();
    sdf.provenance.texture_seed = r.u64();
    return sdf;
}

} // namespace arti
