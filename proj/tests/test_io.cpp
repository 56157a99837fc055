#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "warpkit/classifier.hpp"
#include "warpkit/errors.hpp"
#include "warpkit/io.hpp"
#include "warpkit/synth.hpp"
#include "warpkit/tps.hpp"

using namespace warpkit;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("warpkit_io_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_bytes(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

ImageBuffer quantized_random_image(int w, int h, int channels, unsigned maxval,
                                   std::uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<unsigned> dist(0, maxval);
    ImageBuffer img(w, h, channels);
    for (float& v : img.data())
        v = static_cast<float>(dist(rng)) / static_cast<float>(maxval);
    return img;
}

} // namespace

TEST_CASE("8-bit color PNG images survive a write/read cycle bitwise") {
    TempDir dir;
    const ImageBuffer img = quantized_random_image(23, 17, 3, 255, 11);
    const std::string path = dir.file("rgb.png");
    write_image(path, img);
    const ImageBuffer back = read_image(path);
    REQUIRE(back.width() == 23);
    REQUIRE(back.height() == 17);
    REQUIRE(back.channels() == 3);
    CHECK(back.data() == img.data());
}

TEST_CASE("16-bit gray PNG images survive a write/read cycle bitwise") {
    TempDir dir;
    ImageBuffer img(64, 2, 1);
    for (int x = 0; x < 64; ++x) {
        const unsigned k = static_cast<unsigned>(x) * 1031u;
        img.at(0, x, 0) = static_cast<float>(k) / 65535.0f;
        img.at(1, x, 0) = static_cast<float>(65535u - k) / 65535.0f;
    }
    const std::string path = dir.file("gray16.png");
    write_image(path, img, 16);
    const ImageBuffer back = read_image(path);
    REQUIRE(back.channels() == 1);
    CHECK(back.data() == img.data());
}

TEST_CASE("alpha-channel PNG images survive a write/read cycle bitwise") {
    TempDir dir;
    const ImageBuffer img = quantized_random_image(9, 13, 4, 255, 21);
    const std::string path = dir.file("rgba.png");
    write_image(path, img);
    const ImageBuffer back = read_image(path);
    REQUIRE(back.channels() == 4);
    CHECK(back.data() == img.data());
}

TEST_CASE("a minimal binary graymap decodes to a single black sample") {
    TempDir dir;
    const std::string path = dir.file("tiny.pgm");
    write_bytes(path, std::string("P5\n1 1\n255\n") + '\0');
    const ImageBuffer img = read_image(path);
    REQUIRE(img.width() == 1);
    REQUIRE(img.height() == 1);
    REQUIRE(img.channels() == 1);
    CHECK(img.at(0, 0, 0) == 0.0f);
}

TEST_CASE("ASCII graymaps accept comments and decode scaled samples") {
    TempDir dir;
    const std::string path = dir.file("ascii.pgm");
    write_bytes(path,
                "P2\n# a comment line\n3 2\n# another\n255\n0 128 255\n64 32 255\n");
    const ImageBuffer img = read_image(path);
    REQUIRE(img.width() == 3);
    REQUIRE(img.height() == 2);
    REQUIRE(img.channels() == 1);
    CHECK(img.at(0, 0, 0) == 0.0f);
    CHECK(img.at(0, 1, 0) == doctest::Approx(128.0 / 255.0).epsilon(1e-6));
    CHECK(img.at(0, 2, 0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(img.at(1, 0, 0) == doctest::Approx(64.0 / 255.0).epsilon(1e-6));
}

TEST_CASE("ASCII pixmaps decode all three channels") {
    TempDir dir;
    const std::string path = dir.file("ascii.ppm");
    write_bytes(path, "P3\n2 1\n15\n15 0 7 1 2 3\n");
    const ImageBuffer img = read_image(path);
    REQUIRE(img.channels() == 3);
    CHECK(img.at(0, 0, 0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(img.at(0, 0, 1) == 0.0f);
    CHECK(img.at(0, 0, 2) == doctest::Approx(7.0 / 15.0).epsilon(1e-6));
    CHECK(img.at(0, 1, 2) == doctest::Approx(3.0 / 15.0).epsilon(1e-6));
}

TEST_CASE("16-bit graymaps are big-endian and round-trip at the byte level") {
    TempDir dir;
    const std::string path = dir.file("deep.pgm");
    std::string bytes = "P5\n2 1\n65535\n";
    bytes += '\x01'; bytes += '\x00'; // 256
    bytes += '\xff'; bytes += '\xff'; // 65535
    write_bytes(path, bytes);
    const ImageBuffer img = read_image(path);
    CHECK(img.at(0, 0, 0) == doctest::Approx(256.0 / 65535.0).epsilon(1e-6));
    CHECK(img.at(0, 1, 0) == doctest::Approx(1.0).epsilon(1e-6));

    const std::string again = dir.file("deep2.pgm");
    write_image(again, img, 16);
    CHECK(read_bytes(again) == bytes);
}

TEST_CASE("binary pixmaps round-trip at the byte level") {
    TempDir dir;
    std::string bytes = "P6\n5 4\n255\n";
    std::mt19937 rng(3);
    for (int i = 0; i < 5 * 4 * 3; ++i) bytes += static_cast<char>(rng() & 0xff);
    const std::string path = dir.file("pix.ppm");
    write_bytes(path, bytes);
    const ImageBuffer img = read_image(path);
    const std::string again = dir.file("pix2.ppm");
    write_image(again, img);
    CHECK(read_bytes(again) == bytes);
}

TEST_CASE("defective image files are rejected with precise errors") {
    TempDir dir;

    const std::string trunc = dir.file("trunc.png");
    write_image(trunc, quantized_random_image(16, 16, 3, 255, 5));
    const std::string whole = read_bytes(trunc);
    write_bytes(trunc, whole.substr(0, whole.size() / 2));
    CHECK_THROWS_AS(read_image(trunc), IoError);

    const std::string overflow = dir.file("overflow.pgm");
    write_bytes(overflow, "P2\n1 1\n7\n9\n");
    CHECK_THROWS_WITH_AS(read_image(overflow), doctest::Contains("maxval"), SchemaError);
    try {
        read_image(overflow);
    } catch (const SchemaError& e) {
        CHECK(e.path() == "pnm.raster");
    }

    const std::string alien = dir.file("alien.img");
    write_bytes(alien, "XYZW not an image at all");
    CHECK_THROWS_AS(read_image(alien), IoError);

    CHECK_THROWS_AS(read_image(dir.file("missing.png")), IoError);

    const ImageBuffer rgb = quantized_random_image(4, 4, 3, 255, 6);
    CHECK_THROWS_AS(write_image(dir.file("out.tiff"), rgb), ValueError);
    CHECK_THROWS_AS(write_image(dir.file("out.pgm"), rgb), ValueError);
    CHECK_THROWS_AS(write_image(dir.file("out.png"), rgb, 12), ValueError);
}

TEST_CASE("lattice files round-trip every coordinate bitwise") {
    TempDir dir;
    const std::string path = dir.file("grid.json");

    const ControlGrid identity = make_regular_grid(16, 16);
    write_grid(path, identity);
    const ControlGrid back = read_grid(path);
    REQUIRE(back.rows() == 16);
    REQUIRE(back.cols() == 16);
    for (std::size_t i = 0; i < identity.points().size(); ++i) {
        CHECK(back.points()[i].x == identity.points()[i].x);
        CHECK(back.points()[i].y == identity.points()[i].y);
    }

    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> dist(-1.5, 1.5);
    std::vector<Point2> pts(25 * 20);
    for (Point2& p : pts) p = {dist(rng), dist(rng)};
    const ControlGrid random(25, 20, pts);
    write_grid(path, random);
    const ControlGrid rback = read_grid(path);
    REQUIRE(rback.rows() == 25);
    REQUIRE(rback.cols() == 20);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(rback.points()[i].x == pts[i].x);
        CHECK(rback.points()[i].y == pts[i].y);
    }
}

TEST_CASE("lattice files validate version, convention, and payload length") {
    TempDir dir;
    const std::string path = dir.file("grid.json");

    write_bytes(path, R"({"version": 2, "rows": 2, "cols": 2,
        "convention": "normalized-[-1,1]", "points": [0,0,0,0,0,0,0,0]})");
    try {
        read_grid(path);
        FAIL("expected a schema error");
    } catch (const SchemaError& e) {
        CHECK(e.path() == "grid.version");
    }

    write_bytes(path, R"({"version": 1, "rows": 2, "cols": 2,
        "convention": "pixels", "points": [0,0,0,0,0,0,0,0]})");
    try {
        read_grid(path);
        FAIL("expected a schema error");
    } catch (const SchemaError& e) {
        CHECK(e.path() == "grid.convention");
    }

    write_bytes(path, R"({"version": 1, "rows": 2, "cols": 2,
        "convention": "normalized-[-1,1]", "points": [0,0,0,0]})");
    try {
        read_grid(path);
        FAIL("expected a schema error");
    } catch (const SchemaError& e) {
        CHECK(e.path() == "grid.points");
    }

    write_bytes(path, R"({"version": 1, "rows": 2,
        "convention": "normalized-[-1,1]", "points": [0,0,0,0]})");
    try {
        read_grid(path);
        FAIL("expected a schema error");
    } catch (const SchemaError& e) {
        CHECK(e.path() == "grid.cols");
    }
}

TEST_CASE("flow files round-trip 32-bit-representable fields bitwise") {
    TempDir dir;
    const std::string path = dir.file("field.wflo");

    FlowField flow(17, 9);
    std::mt19937 rng(1234);
    std::uniform_real_distribution<float> dist(-2.0f, 2.0f);
    for (int y = 0; y < 9; ++y)
        for (int x = 0; x < 17; ++x) {
            flow.dx(y, x) = static_cast<double>(dist(rng));
            flow.dy(y, x) = static_cast<double>(dist(rng));
        }
    write_flow(path, flow);
    const FlowField back = read_flow(path);
    REQUIRE(back.width() == 17);
    REQUIRE(back.height() == 9);
    CHECK(back.dx_plane() == flow.dx_plane());
    CHECK(back.dy_plane() == flow.dy_plane());

    const std::string bytes = read_bytes(path);
    CHECK(bytes.substr(0, 4) == "WFLO");
    CHECK(bytes.size() == 12 + 17u * 9u * 2u * 4u);
}

TEST_CASE("flow files validate magic, header, and payload length") {
    TempDir dir;
    const std::string path = dir.file("field.wflo");

    FlowField flow(4, 3);
    write_flow(path, flow);
    const std::string whole = read_bytes(path);

    write_bytes(path, "JUNK" + whole.substr(4));
    try {
        read_flow(path);
        FAIL("expected a schema error");
    } catch (const SchemaError& e) {
        CHECK(e.path() == "flow.magic");
    }

    write_bytes(path, whole.substr(0, 8));
    try {
        read_flow(path);
        FAIL("expected a schema error");
    } catch (const SchemaError& e) {
        CHECK(e.path() == "flow.header");
    }

    write_bytes(path, whole.substr(0, whole.size() - 5));
    try {
        read_flow(path);
        FAIL("expected a schema error");
    } catch (const SchemaError& e) {
        CHECK(e.path() == "flow.payload");
    }
}

TEST_CASE("fitted spline files round-trip every coefficient bitwise") {
    TempDir dir;
    const std::string path = dir.file("spline.json");

    const ControlGrid source = make_regular_grid(5, 5);
    std::vector<Point2> moved = source.points();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> jitter(-0.05, 0.05);
    for (Point2& p : moved) {
        p.x += jitter(rng);
        p.y += jitter(rng);
    }
    const TpsTransform t = solve_tps(source, ControlGrid(5, 5, moved), 1e-6);

    write_transform(path, t);
    const TpsTransform back = read_transform(path);
    CHECK(back.affine() == t.affine());
    REQUIRE(back.centers().size() == t.centers().size());
    REQUIRE(back.weights().size() == t.weights().size());
    for (std::size_t i = 0; i < t.centers().size(); ++i) {
        CHECK(back.centers()[i].x == t.centers()[i].x);
        CHECK(back.centers()[i].y == t.centers()[i].y);
        CHECK(back.weights()[i].x == t.weights()[i].x);
        CHECK(back.weights()[i].y == t.weights()[i].y);
    }
    CHECK(back.regularization() == t.regularization());
}

TEST_CASE("classifier parameter files round-trip bitwise and check the layer chain") {
    TempDir dir;
    const std::string path = dir.file("params.json");

    ClassifierConfig config;
    config.pointwise_dims = {5, 7};
    config.head_dims = {6, 4};
    config.global_dim = 2;
    const ClassifierParams params = init_classifier(config, 321);

    write_classifier(path, params);
    const ClassifierParams back = read_classifier(path);
    CHECK(back.config.pointwise_dims == config.pointwise_dims);
    CHECK(back.config.head_dims == config.head_dims);
    CHECK(back.config.global_dim == 2);
    CHECK(back.seed == 321);
    REQUIRE(back.pointwise.size() == params.pointwise.size());
    REQUIRE(back.head.size() == params.head.size());
    for (std::size_t l = 0; l < params.pointwise.size(); ++l) {
        CHECK(back.pointwise[l].weight == params.pointwise[l].weight);
        CHECK(back.pointwise[l].bias == params.pointwise[l].bias);
    }
    for (std::size_t l = 0; l < params.head.size(); ++l) {
        CHECK(back.head[l].weight == params.head[l].weight);
        CHECK(back.head[l].bias == params.head[l].bias);
    }

    // break the width chain between the two pointwise layers
    std::string text = read_bytes(path);
    const std::string needle = "\"in\": 5";
    const std::size_t at = text.find(needle);
    REQUIRE(at != std::string::npos);
    text.replace(at, needle.size(), "\"in\": 9");
    write_bytes(path, text);
    CHECK_THROWS_AS(read_classifier(path), SchemaError);
}

TEST_CASE("prompt bank files round-trip bitwise") {
    TempDir dir;
    const std::string path = dir.file("bank.json");

    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<FeatureMap> prompts;
    for (int i = 0; i < 3; ++i) {
        FeatureMap m(4, 3, 2);
        for (double& v : m.data()) v = dist(rng);
        prompts.push_back(std::move(m));
    }
    const PromptBank bank(prompts);

    write_prompt_bank(path, bank);
    const PromptBank back = read_prompt_bank(path);
    REQUIRE(back.size() == 3);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(back.prompt(i).data() == bank.prompt(i).data());
}

TEST_CASE("dataset directories store labeled lattices losslessly") {
    TempDir dir;
    const std::string root = dir.file("set");

    GridDataset data;
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int i = 0; i < 12; ++i) {
        std::vector<Point2> pts(static_cast<std::size_t>(16));
        for (Point2& p : pts) p = {dist(rng), dist(rng)};
        data.push_back({ControlGrid(4, 4, pts), i % 6});
    }
    write_dataset_dir(root, data);
    const GridDataset back = read_dataset_dir(root);
    REQUIRE(back.size() == 12);
    for (std::size_t i = 0; i < 12; ++i) {
        CHECK(back[i].label == data[i].label);
        REQUIRE(back[i].points.points().size() == 16);
        for (std::size_t k = 0; k < 16; ++k) {
            CHECK(back[i].points.points()[k].x == data[i].points.points()[k].x);
            CHECK(back[i].points.points()[k].y == data[i].points.points()[k].y);
        }
    }

    const std::string empty = dir.file("empty");
    fs::create_directories(empty);
    CHECK_THROWS_AS(read_dataset_dir(empty), IoError);
}
