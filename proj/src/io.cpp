#include "warpkit/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <png.h>

#include "json.hpp"

#include "warpkit/errors.hpp"

namespace warpkit {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------- JSON core

json load_json(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw SchemaError(what, "invalid JSON: " + std::string(e.what()));
    }
    return j;
}

void save_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed writing " + path);
}

const json& need(const json& j, const std::string& parent, const char* key) {
    if (!j.is_object()) throw SchemaError(parent, "expected an object");
    const auto it = j.find(key);
    if (it == j.end()) throw SchemaError(parent + "." + key, "missing field");
    return *it;
}

double need_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw SchemaError(path, "expected a number");
    return j.get<double>();
}

long long need_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
    return j.get<long long>();
}

std::string need_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw SchemaError(path, "expected a string");
    return j.get<std::string>();
}

const json& need_array(const json& j, const std::string& path) {
    if (!j.is_array()) throw SchemaError(path, "expected an array");
    return j;
}

std::vector<double> number_array(const json& j, const std::string& path) {
    need_array(j, path);
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(need_number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

void check_version(const json& j, const std::string& what) {
    const long long v = need_int(need(j, what, "version"), what + ".version");
    if (v != 1)
        throw SchemaError(what + ".version", "unsupported version " + std::to_string(v));
}

// ------------------------------------------------------------- binary bits

void put_u32le(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t get_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_f32le(std::string& out, float f) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof bits);
    put_u32le(out, bits);
}

float get_f32le(const unsigned char* p) {
    const std::uint32_t bits = get_u32le(p);
    float f;
    std::memcpy(&f, &bits, sizeof f);
    return f;
}

std::string read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("failed reading " + path);
    return data;
}

void write_file_bytes(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw IoError("failed writing " + path);
}

// ------------------------------------------------------------------- PNG

ImageBuffer read_png(const std::string& path) {
    FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw IoError("cannot open " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        std::fclose(fp);
        throw IoError("cannot initialize the PNG reader");
    }

    std::vector<unsigned char> raster;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw IoError("corrupt PNG file " + path);
    }

    png_init_io(png, fp);
    png_read_info(png, info);

    const png_byte color = png_get_color_type(png, info);
    png_byte depth = png_get_bit_depth(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    const png_uint_32 width = png_get_image_width(png, info);
    const png_uint_32 height = png_get_image_height(png, info);
    const int channels = png_get_channels(png, info);
    depth = png_get_bit_depth(png, info);
    if ((channels != 1 && channels != 3 && channels != 4) || (depth != 8 && depth != 16)) {
        longjmp(png_jmpbuf(png), 1); // reported as a corrupt/unsupported file
    }

    const std::size_t rowbytes = png_get_rowbytes(png, info);
    raster.resize(rowbytes * height);
    rows.resize(height);
    for (png_uint_32 y = 0; y < height; ++y) rows[y] = raster.data() + y * rowbytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);

    ImageBuffer img(static_cast<int>(width), static_cast<int>(height), channels);
    const std::size_t samples_per_row = static_cast<std::size_t>(width) * channels;
    for (png_uint_32 y = 0; y < height; ++y) {
        const unsigned char* row = raster.data() + y * rowbytes;
        for (std::size_t s = 0; s < samples_per_row; ++s) {
            float v;
            if (depth == 8) {
                v = static_cast<float>(row[s]) / 255.0f;
            } else { // network byte order
                const unsigned hi = row[2 * s], lo = row[2 * s + 1];
                v = static_cast<float>((hi << 8) | lo) / 65535.0f;
            }
            img.data()[y * samples_per_row + s] = v;
        }
    }
    return img;
}

unsigned quantize(float v, unsigned maxval) {
    const float clamped = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
    return static_cast<unsigned>(std::lround(static_cast<double>(clamped) * maxval));
}

void write_png(const std::string& path, const ImageBuffer& image, int bit_depth) {
    FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw IoError("cannot open " + path + " for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        std::fclose(fp);
        throw IoError("cannot initialize the PNG writer");
    }

    std::vector<unsigned char> raster;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw IoError("failed writing PNG file " + path);
    }

    int color = 0;
    switch (image.channels()) {
        case 1: color = PNG_COLOR_TYPE_GRAY; break;
        case 3: color = PNG_COLOR_TYPE_RGB; break;
        default: color = PNG_COLOR_TYPE_RGB_ALPHA; break;
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width()),
                 static_cast<png_uint_32>(image.height()), bit_depth, color,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    const unsigned maxval = bit_depth == 8 ? 255u : 65535u;
    const std::size_t samples_per_row =
        static_cast<std::size_t>(image.width()) * image.channels();
    const std::size_t bytes_per_row = samples_per_row * (bit_depth / 8);
    raster.resize(bytes_per_row * image.height());
    rows.resize(static_cast<std::size_t>(image.height()));
    for (int y = 0; y < image.height(); ++y) {
        unsigned char* row = raster.data() + static_cast<std::size_t>(y) * bytes_per_row;
        rows[static_cast<std::size_t>(y)] = row;
        for (std::size_t s = 0; s < samples_per_row; ++s) {
            const unsigned q = quantize(image.data()[y * samples_per_row + s], maxval);
            if (bit_depth == 8) {
                row[s] = static_cast<unsigned char>(q);
            } else {
                row[2 * s] = static_cast<unsigned char>(q >> 8);
                row[2 * s + 1] = static_cast<unsigned char>(q & 0xff);
            }
        }
    }
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

// ------------------------------------------------------------------- PNM

struct PnmParser {
    const std::string& data;
    std::size_t pos = 0;

    // Skips whitespace and '#' comments between header tokens.
    void skip_separators() {
        while (pos < data.size()) {
            const char c = data[pos];
            if (c == '#') {
                while (pos < data.size() && data[pos] != '\n') ++pos;
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f') {
                ++pos;
            } else {
                break;
            }
        }
    }

    unsigned next_uint(const char* field) {
        skip_separators();
        if (pos >= data.size() || data[pos] < '0' || data[pos] > '9')
            throw SchemaError(std::string("pnm.") + field, "expected an unsigned integer");
        unsigned long v = 0;
        while (pos < data.size() && data[pos] >= '0' && data[pos] <= '9') {
            v = v * 10 + static_cast<unsigned long>(data[pos] - '0');
            if (v > 0xffffffffUL) throw SchemaError(std::string("pnm.") + field, "value too large");
            ++pos;
        }
        return static_cast<unsigned>(v);
    }
};

ImageBuffer read_pnm(const std::string& path) {
    const std::string data = read_file_bytes(path);
    if (data.size() < 2 || data[0] != 'P') throw SchemaError("pnm.magic", "not a NetPBM file");
    const char kind = data[1];
    if (kind != '2' && kind != '3' && kind != '5' && kind != '6')
        throw SchemaError("pnm.magic", std::string("unsupported NetPBM variant P") + kind);
    const int channels = (kind == '3' || kind == '6') ? 3 : 1;
    const bool binary = kind == '5' || kind == '6';

    PnmParser p{data, 2};
    const unsigned width = p.next_uint("width");
    const unsigned height = p.next_uint("height");
    const unsigned maxval = p.next_uint("maxval");
    if (width == 0 || height == 0) throw SchemaError("pnm.size", "image dimensions must be positive");
    if (maxval == 0 || maxval > 65535) throw SchemaError("pnm.maxval", "maxval must be in [1, 65535]");
    if (width > 1u << 20 || height > 1u << 20) throw SchemaError("pnm.size", "image too large");

    const std::size_t count = static_cast<std::size_t>(width) * height * channels;
    std::vector<float> samples(count);
    // Divide rather than multiply by a reciprocal so every decoder maps a raw
    // sample v to exactly float(v)/maxval; quantization then inverts it exactly.
    const float fmax = static_cast<float>(maxval);

    if (binary) {
        // Exactly one separator byte between the header and the raster.
        if (p.pos >= data.size()) throw SchemaError("pnm.raster", "missing raster");
        ++p.pos;
        const std::size_t bytes_per_sample = maxval > 255 ? 2 : 1;
        const std::size_t expect = count * bytes_per_sample;
        if (data.size() - p.pos != expect)
            throw SchemaError("pnm.raster", "expected " + std::to_string(expect) +
                                                " raster bytes, got " +
                                                std::to_string(data.size() - p.pos));
        const unsigned char* raw = reinterpret_cast<const unsigned char*>(data.data()) + p.pos;
        for (std::size_t i = 0; i < count; ++i) {
            unsigned v;
            if (bytes_per_sample == 1) {
                v = raw[i];
            } else { // big-endian per the format
                v = (static_cast<unsigned>(raw[2 * i]) << 8) | raw[2 * i + 1];
            }
            if (v > maxval) throw SchemaError("pnm.raster", "sample exceeds maxval");
            samples[i] = static_cast<float>(v) / fmax;
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            const unsigned v = p.next_uint("raster");
            if (v > maxval) throw SchemaError("pnm.raster", "sample exceeds maxval");
            samples[i] = static_cast<float>(v) / fmax;
        }
        p.skip_separators();
        if (p.pos != data.size()) throw SchemaError("pnm.raster", "trailing data after the raster");
    }
    return ImageBuffer(static_cast<int>(width), static_cast<int>(height), channels,
                       std::move(samples));
}

void write_pnm(const std::string& path, const ImageBuffer& image, int bit_depth) {
    if (image.channels() != 1 && image.channels() != 3)
        throw ValueError("NetPBM cannot store an alpha channel; use PNG");
    const unsigned maxval = bit_depth == 8 ? 255u : 65535u;
    std::string out;
    out += image.channels() == 1 ? "P5" : "P6";
    out += "\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n" +
           std::to_string(maxval) + "\n";
    for (float v : image.data()) {
        const unsigned q = quantize(v, maxval);
        if (maxval > 255) out.push_back(static_cast<char>(q >> 8));
        out.push_back(static_cast<char>(q & 0xff));
    }
    write_file_bytes(path, out);
}

std::string lower_ext(const std::string& path) {
    std::string ext = std::filesystem::path(path).extension().string();
    for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return ext;
}

} // namespace

ImageBuffer read_image(const std::string& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw IoError("cannot open " + path);
    unsigned char sig[8] = {};
    probe.read(reinterpret_cast<char*>(sig), 8);
    const std::streamsize got = probe.gcount();
    probe.close();
    if (got >= 8 && !png_sig_cmp(sig, 0, 8)) return read_png(path);
    if (got >= 2 && sig[0] == 'P' &&
        (sig[1] == '2' || sig[1] == '3' || sig[1] == '5' || sig[1] == '6'))
        return read_pnm(path);
    throw IoError("unsupported image format in " + path);
}

void write_image(const std::string& path, const ImageBuffer& image, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16)
        throw ValueError("bit depth must be 8 or 16, got " + std::to_string(bit_depth));
    const std::string ext = lower_ext(path);
    if (ext == ".png") {
        write_png(path, image, bit_depth);
    } else if (ext == ".pgm") {
        if (image.channels() != 1) throw ValueError(".pgm stores single-channel images only");
        write_pnm(path, image, bit_depth);
    } else if (ext == ".ppm") {
        if (image.channels() != 3) throw ValueError(".ppm stores three-channel images only");
        write_pnm(path, image, bit_depth);
    } else if (ext == ".pnm") {
        write_pnm(path, image, bit_depth);
    } else {
        throw ValueError("unsupported image extension '" + ext + "' (use .png, .pgm, .ppm, .pnm)");
    }
}

// ------------------------------------------------------------------ grids

namespace {
constexpr const char* kGridConvention = "normalized-[-1,1]";
}

ControlGrid read_grid(const std::string& path) {
    const json j = load_json(path, "grid");
    check_version(j, "grid");
    const long long rows = need_int(need(j, "grid", "rows"), "grid.rows");
    const long long cols = need_int(need(j, "grid", "cols"), "grid.cols");
    if (rows < 2 || cols < 2 || rows > 4096 || cols > 4096)
        throw SchemaError("grid.rows", "lattice size out of range");
    const std::string convention = need_string(need(j, "grid", "convention"), "grid.convention");
    if (convention != kGridConvention)
        throw SchemaError("grid.convention", "unknown convention '" + convention + "'");
    const std::vector<double> flat = number_array(need(j, "grid", "points"), "grid.points");
    if (flat.size() != static_cast<std::size_t>(rows) * cols * 2)
        throw SchemaError("grid.points", "expected " + std::to_string(rows * cols * 2) +
                                             " values, got " + std::to_string(flat.size()));
    std::vector<Point2> points(static_cast<std::size_t>(rows) * cols);
    for (std::size_t i = 0; i < points.size(); ++i)
        points[i] = {flat[2 * i], flat[2 * i + 1]};
    try {
        return ControlGrid(static_cast<int>(rows), static_cast<int>(cols), std::move(points));
    } catch (const Error& e) {
        throw SchemaError("grid.points", e.what());
    }
}

void write_grid(const std::string& path, const ControlGrid& grid) {
    json points = json::array();
    for (const Point2& p : grid.points()) {
        points.push_back(p.x);
        points.push_back(p.y);
    }
    save_json(path, json{{"version", 1},
                         {"rows", grid.rows()},
                         {"cols", grid.cols()},
                         {"convention", kGridConvention},
                         {"points", std::move(points)}});
}

// ------------------------------------------------------------------ flows

FlowField read_flow(const std::string& path) {
    const std::string data = read_file_bytes(path);
    if (data.size() < 4 || data.compare(0, 4, "WFLO") != 0)
        throw SchemaError("flow.magic", "not a flow file");
    if (data.size() < 12) throw SchemaError("flow.header", "truncated header");
    const unsigned char* raw = reinterpret_cast<const unsigned char*>(data.data());
    const std::uint32_t width = get_u32le(raw + 4);
    const std::uint32_t height = get_u32le(raw + 8);
    if (width == 0 || height == 0 || width > 1u << 20 || height > 1u << 20)
        throw SchemaError("flow.header", "flow dimensions out of range");
    const std::size_t n = static_cast<std::size_t>(width) * height;
    const std::size_t expect = 8 * n;
    if (data.size() - 12 != expect)
        throw SchemaError("flow.payload", "expected " + std::to_string(expect) +
                                              " payload bytes, got " +
                                              std::to_string(data.size() - 12));
    std::vector<double> dx(n), dy(n);
    for (std::size_t i = 0; i < n; ++i) {
        dx[i] = static_cast<double>(get_f32le(raw + 12 + 8 * i));
        dy[i] = static_cast<double>(get_f32le(raw + 12 + 8 * i + 4));
    }
    try {
        return FlowField(static_cast<int>(width), static_cast<int>(height), std::move(dx),
                         std::move(dy));
    } catch (const Error& e) {
        throw SchemaError("flow.payload", e.what());
    }
}

void write_flow(const std::string& path, const FlowField& flow) {
    std::string out;
    out.reserve(12 + 8 * flow.dx_plane().size());
    out += "WFLO";
    put_u32le(out, static_cast<std::uint32_t>(flow.width()));
    put_u32le(out, static_cast<std::uint32_t>(flow.height()));
    for (std::size_t i = 0; i < flow.dx_plane().size(); ++i) {
        put_f32le(out, static_cast<float>(flow.dx_plane()[i]));
        put_f32le(out, static_cast<float>(flow.dy_plane()[i]));
    }
    write_file_bytes(path, out);
}

// ------------------------------------------------------------- transforms

TpsTransform read_transform(const std::string& path) {
    const json j = load_json(path, "transform");
    check_version(j, "transform");
    const json& jaffine = need_array(need(j, "transform", "affine"), "transform.affine");
    if (jaffine.size() != 2) throw SchemaError("transform.affine", "expected 2 rows");
    std::array<std::array<double, 3>, 2> affine{};
    for (int r = 0; r < 2; ++r) {
        const std::string rp = "transform.affine[" + std::to_string(r) + "]";
        const std::vector<double> row = number_array(jaffine[static_cast<std::size_t>(r)], rp);
        if (row.size() != 3) throw SchemaError(rp, "expected 3 values");
        for (int c = 0; c < 3; ++c) affine[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = row[static_cast<std::size_t>(c)];
    }
    const std::vector<double> cflat = number_array(need(j, "transform", "centers"), "transform.centers");
    const std::vector<double> wflat = number_array(need(j, "transform", "weights"), "transform.weights");
    if (cflat.size() % 2 != 0) throw SchemaError("transform.centers", "odd value count");
    if (wflat.size() != cflat.size())
        throw SchemaError("transform.weights", "weight count does not match center count");
    std::vector<Point2> centers(cflat.size() / 2), weights(wflat.size() / 2);
    for (std::size_t i = 0; i < centers.size(); ++i) {
        centers[i] = {cflat[2 * i], cflat[2 * i + 1]};
        weights[i] = {wflat[2 * i], wflat[2 * i + 1]};
    }
    const double reg = need_number(need(j, "transform", "regularization"), "transform.regularization");
    return TpsTransform(affine, std::move(weights), std::move(centers), reg);
}

void write_transform(const std::string& path, const TpsTransform& t) {
    json centers = json::array(), weights = json::array();
    for (const Point2& p : t.centers()) {
        centers.push_back(p.x);
        centers.push_back(p.y);
    }
    for (const Point2& p : t.weights()) {
        weights.push_back(p.x);
        weights.push_back(p.y);
    }
    save_json(path, json{{"version", 1},
                         {"affine", {{t.affine()[0][0], t.affine()[0][1], t.affine()[0][2]},
                                     {t.affine()[1][0], t.affine()[1][1], t.affine()[1][2]}}},
                         {"centers", std::move(centers)},
                         {"weights", std::move(weights)},
                         {"regularization", t.regularization()}});
}

// ------------------------------------------------------------- classifier

namespace {

json layer_to_json(const DenseLayer& l) {
    return json{{"in", l.in_dim}, {"out", l.out_dim}, {"weight", l.weight}, {"bias", l.bias}};
}

DenseLayer layer_from_json(const json& j, const std::string& path) {
    DenseLayer l;
    l.in_dim = static_cast<int>(need_int(need(j, path, "in"), path + ".in"));
    l.out_dim = static_cast<int>(need_int(need(j, path, "out"), path + ".out"));
    if (l.in_dim < 1 || l.out_dim < 1) throw SchemaError(path, "layer widths must be positive");
    l.weight = number_array(need(j, path, "weight"), path + ".weight");
    l.bias = number_array(need(j, path, "bias"), path + ".bias");
    if (l.weight.size() != static_cast<std::size_t>(l.in_dim) * l.out_dim)
        throw SchemaError(path + ".weight", "expected in*out values");
    if (l.bias.size() != static_cast<std::size_t>(l.out_dim))
        throw SchemaError(path + ".bias", "expected out values");
    return l;
}

std::vector<int> int_array(const json& j, const std::string& path) {
    need_array(j, path);
    std::vector<int> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(static_cast<int>(need_int(j[i], path + "[" + std::to_string(i) + "]")));
    return out;
}

} // namespace

ClassifierParams read_classifier(const std::string& path) {
    const json j = load_json(path, "classifier");
    check_version(j, "classifier");
    ClassifierParams p;
    p.config.pointwise_dims = int_array(need(j, "classifier", "pointwise_dims"),
                                        "classifier.pointwise_dims");
    p.config.head_dims = int_array(need(j, "classifier", "head_dims"), "classifier.head_dims");
    p.config.global_dim = static_cast<int>(
        need_int(need(j, "classifier", "global_dim"), "classifier.global_dim"));
    const json& jseed = need(j, "classifier", "seed");
    if (!jseed.is_number_integer() ||
        (!jseed.is_number_unsigned() && jseed.get<long long>() < 0))
        throw SchemaError("classifier.seed", "expected a nonnegative integer");
    p.seed = jseed.get<std::uint64_t>();

    const json& jpoint = need_array(need(j, "classifier", "pointwise"), "classifier.pointwise");
    for (std::size_t i = 0; i < jpoint.size(); ++i)
        p.pointwise.push_back(layer_from_json(jpoint[i], "classifier.pointwise[" +
                                                             std::to_string(i) + "]"));
    const json& jhead = need_array(need(j, "classifier", "head"), "classifier.head");
    for (std::size_t i = 0; i < jhead.size(); ++i)
        p.head.push_back(layer_from_json(jhead[i], "classifier.head[" + std::to_string(i) + "]"));

    // Structural cross-checks so a corrupted file fails here with a path,
    // not later inside the network.
    if (p.pointwise.size() != p.config.pointwise_dims.size())
        throw SchemaError("classifier.pointwise", "layer count does not match pointwise_dims");
    if (p.head.size() != p.config.head_dims.size())
        throw SchemaError("classifier.head", "layer count does not match head_dims");
    if (p.config.global_dim < 0)
        throw SchemaError("classifier.global_dim", "must be nonnegative");
    int in = 2;
    for (std::size_t i = 0; i < p.pointwise.size(); ++i) {
        if (p.pointwise[i].in_dim != in || p.pointwise[i].out_dim != p.config.pointwise_dims[i])
            throw SchemaError("classifier.pointwise[" + std::to_string(i) + "]",
                              "layer shape breaks the dimension chain");
        in = p.config.pointwise_dims[i];
    }
    if (p.config.pointwise_dims.empty() || p.config.head_dims.empty())
        throw SchemaError("classifier.pointwise_dims", "needs at least one layer per stack");
    in = p.config.pointwise_dims.back() + p.config.global_dim;
    for (std::size_t i = 0; i < p.head.size(); ++i) {
        if (p.head[i].in_dim != in || p.head[i].out_dim != p.config.head_dims[i])
            throw SchemaError("classifier.head[" + std::to_string(i) + "]",
                              "layer shape breaks the dimension chain");
        in = p.config.head_dims[i];
    }
    for (const DenseLayer& l : p.pointwise)
        for (double v : l.weight)
            if (!std::isfinite(v)) throw SchemaError("classifier.pointwise", "non-finite weight");
    for (const DenseLayer& l : p.head)
        for (double v : l.weight)
            if (!std::isfinite(v)) throw SchemaError("classifier.head", "non-finite weight");
    return p;
}

void write_classifier(const std::string& path, const ClassifierParams& params) {
    json jpoint = json::array(), jhead = json::array();
    for (const DenseLayer& l : params.pointwise) jpoint.push_back(layer_to_json(l));
    for (const DenseLayer& l : params.head) jhead.push_back(layer_to_json(l));
    save_json(path, json{{"version", 1},
                         {"pointwise_dims", params.config.pointwise_dims},
                         {"head_dims", params.config.head_dims},
                         {"global_dim", params.config.global_dim},
                         {"seed", params.seed},
                         {"pointwise", std::move(jpoint)},
                         {"head", std::move(jhead)}});
}

// ------------------------------------------------------------ prompt bank

PromptBank read_prompt_bank(const std::string& path) {
    const json j = load_json(path, "prompts");
    check_version(j, "prompts");
    const int h = static_cast<int>(need_int(need(j, "prompts", "height"), "prompts.height"));
    const int w = static_cast<int>(need_int(need(j, "prompts", "width"), "prompts.width"));
    const int c = static_cast<int>(need_int(need(j, "prompts", "channels"), "prompts.channels"));
    if (h < 1 || w < 1 || c < 1 || h > 4096 || w > 4096 || c > 4096)
        throw SchemaError("prompts.height", "tensor dimensions out of range");
    const json& arr = need_array(need(j, "prompts", "prompts"), "prompts.prompts");
    std::vector<FeatureMap> prompts;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string p = "prompts.prompts[" + std::to_string(i) + "]";
        std::vector<double> flat = number_array(arr[i], p);
        if (flat.size() != static_cast<std::size_t>(h) * w * c)
            throw SchemaError(p, "expected height*width*channels values");
        try {
            prompts.emplace_back(h, w, c, std::move(flat));
        } catch (const Error& e) {
            throw SchemaError(p, e.what());
        }
    }
    try {
        return PromptBank(std::move(prompts));
    } catch (const Error& e) {
        throw SchemaError("prompts.prompts", e.what());
    }
}

void write_prompt_bank(const std::string& path, const PromptBank& bank) {
    const FeatureMap& first = bank.prompt(0);
    json arr = json::array();
    for (const FeatureMap& p : bank.prompts()) arr.push_back(p.data());
    save_json(path, json{{"version", 1},
                         {"height", first.height()},
                         {"width", first.width()},
                         {"channels", first.channels()},
                         {"prompts", std::move(arr)}});
}

// ------------------------------------------------------------ dataset dir

GridDataset read_dataset_dir(const std::string& dir) {
    const std::filesystem::path base(dir);
    const json j = load_json((base / "index.json").string(), "index");
    check_version(j, "index");
    const json& entries = need_array(need(j, "index", "entries"), "index.entries");
    GridDataset dataset;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const std::string ep = "index.entries[" + std::to_string(i) + "]";
        const std::string name = need_string(need(entries[i], ep, "grid"), ep + ".grid");
        const long long label = need_int(need(entries[i], ep, "label"), ep + ".label");
        if (label < 0) throw SchemaError(ep + ".label", "label must be nonnegative");
        dataset.push_back({read_grid((base / name).string()), static_cast<int>(label)});
    }
    return dataset;
}

void write_dataset_dir(const std::string& dir, const GridDataset& dataset) {
    const std::filesystem::path base(dir);
    std::error_code ec;
    std::filesystem::create_directories(base, ec);
    if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
    json entries = json::array();
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "grid_%05zu.json", i);
        write_grid((base / name).string(), dataset[i].points);
        entries.push_back(json{{"grid", name}, {"label", dataset[i].label}});
    }
    save_json((base / "index.json").string(), json{{"version", 1}, {"entries", std::move(entries)}});
}

} // namespace warpkit
