#include "warpkit/synth.hpp"

#include <cmath>
#include <random>
#include <string>

#include "warpkit/errors.hpp"
#include "warpkit/flow.hpp"
#include "warpkit/parallel.hpp"
#include "warpkit/rng.hpp"

namespace warpkit {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool valid_family(DistortionFamily f) {
    const int v = static_cast<int>(f);
    return v >= 0 && v < kFamilyCount;
}

void require(bool ok, const char* message) {
    if (!ok) throw ValueError(message);
}

} // namespace

const char* family_name(DistortionFamily family) {
    switch (family) {
        case DistortionFamily::Stitched: return "stitched";
        case DistortionFamily::WideAngleRectified: return "wide-angle";
        case DistortionFamily::RollingShutter: return "rolling-shutter";
        case DistortionFamily::Rotated: return "rotated";
        case DistortionFamily::Fisheye: return "fisheye";
        case DistortionFamily::Portrait: return "portrait";
    }
    throw ValueError("unknown distortion family");
}

DistortionFamily family_from_name(const std::string& name) {
    for (int i = 0; i < kFamilyCount; ++i) {
        const DistortionFamily f = static_cast<DistortionFamily>(i);
        if (name == family_name(f)) return f;
    }
    throw ValueError("unknown distortion family '" + name + "'");
}

void validate_spec(const DistortionSpec& spec) {
    require(valid_family(spec.family), "unknown distortion family");
    for (double v : spec.params)
        if (!std::isfinite(v)) throw ValueError("distortion parameters must be finite");
    const std::vector<double>& p = spec.params;
    switch (spec.family) {
        case DistortionFamily::Stitched:
            require(p.size() == 1, "stitched takes one parameter {g}");
            require(std::abs(p[0]) <= 0.3, "stitched |g| must be <= 0.3");
            break;
        case DistortionFamily::WideAngleRectified:
            require(p.size() == 1, "wide-angle takes one parameter {p}");
            require(p[0] >= 0.0 && p[0] <= 0.35, "wide-angle p must be in [0, 0.35]");
            break;
        case DistortionFamily::RollingShutter:
            require(p.size() == 1, "rolling-shutter takes one parameter {s}");
            require(std::abs(p[0]) <= 0.45, "rolling-shutter |s| must be <= 0.45");
            break;
        case DistortionFamily::Rotated:
            require(p.size() == 1, "rotated takes one parameter {theta}");
            require(std::abs(p[0]) <= kPi / 4.0, "rotated |theta| must be <= pi/4");
            break;
        case DistortionFamily::Fisheye:
            require(p.size() == 2, "fisheye takes two parameters {k1, k2}");
            require(p[0] >= 0.0 && p[0] <= 0.2, "fisheye k1 must be in [0, 0.2]");
            require(p[1] >= 0.0, "fisheye k2 must be nonnegative");
            require(2.0 * p[0] + 4.0 * p[1] <= 0.5, "fisheye 2*k1 + 4*k2 must be <= 0.5");
            break;
        case DistortionFamily::Portrait: {
            require(!p.empty() && p.size() % 4 == 0 && p.size() <= 16,
                    "portrait takes 1..4 bumps of {a, cx, cy, rho}");
            double total = 0.0;
            for (std::size_t k = 0; k < p.size(); k += 4) {
                require(p[k] >= 0.0 && p[k] <= 0.15, "portrait a must be in [0, 0.15]");
                require(std::abs(p[k + 1]) <= 0.5 && std::abs(p[k + 2]) <= 0.5,
                        "portrait centers must lie in [-0.5, 0.5]^2");
                require(p[k + 3] >= 0.2 && p[k + 3] <= 0.8, "portrait rho must be in [0.2, 0.8]");
                total += p[k];
            }
            require(total <= 0.45, "portrait bump strengths must sum to <= 0.45");
            break;
        }
    }
}

namespace {

Point2 portrait_displacement(const std::vector<double>& p, Point2 q) {
    Point2 d{0.0, 0.0};
    for (std::size_t k = 0; k < p.size(); k += 4) {
        const double a = p[k], cx = p[k + 1], cy = p[k + 2], rho = p[k + 3];
        const double ux = q.x - cx, uy = q.y - cy;
        const double w = a * std::exp(-(ux * ux + uy * uy) / (rho * rho));
        d.x += w * ux;
        d.y += w * uy;
    }
    return d;
}

// Solves s * (1 + c1*s^2 + c2*s^4) = r for s >= 0 by Newton iteration.
// The left side is strictly increasing for c1, c2 >= 0, so the root is
// unique; a fixed iteration count keeps the result deterministic.
double invert_odd_radial(double c1, double c2, double r) {
    double s = r;
    for (int it = 0; it < 40; ++it) {
        const double s2 = s * s;
        const double f = s * (1.0 + c1 * s2 + c2 * s2 * s2) - r;
        const double fp = 1.0 + 3.0 * c1 * s2 + 5.0 * c2 * s2 * s2;
        s -= f / fp;
    }
    return s;
}

// distort_point without the per-call spec validation, for inner pixel loops.
Point2 forward_map(const DistortionSpec& spec, Point2 q) {
    const std::vector<double>& p = spec.params;
    switch (spec.family) {
        case DistortionFamily::Stitched: {
            const double denom = 1.0 + p[0] * q.x;
            return {q.x / denom, q.y / denom};
        }
        case DistortionFamily::WideAngleRectified: {
            const double m = std::max(std::abs(q.x), std::abs(q.y));
            const double m2 = m * m;
            const double scale = 1.0 + p[0] * m2 * m2;
            return {q.x * scale, q.y * scale};
        }
        case DistortionFamily::RollingShutter:
            return {q.x + p[0] * (q.y + 1.0) * 0.5, q.y};
        case DistortionFamily::Rotated: {
            const double c = std::cos(p[0]), s = std::sin(p[0]);
            return {q.x * c - q.y * s, q.x * s + q.y * c};
        }
        case DistortionFamily::Fisheye: {
            const double r2 = q.x * q.x + q.y * q.y;
            const double scale = 1.0 + p[0] * r2 + p[1] * r2 * r2;
            return {q.x * scale, q.y * scale};
        }
        case DistortionFamily::Portrait: {
            const Point2 d = portrait_displacement(p, q);
            return {q.x + d.x, q.y + d.y};
        }
    }
    throw ValueError("unknown distortion family");
}

// undistort_point without the per-call spec validation.
Point2 inverse_map(const DistortionSpec& spec, Point2 pt) {
    const std::vector<double>& p = spec.params;
    switch (spec.family) {
        case DistortionFamily::Stitched: {
            const double denom = 1.0 - p[0] * pt.x;
            return {pt.x / denom, pt.y / denom};
        }
        case DistortionFamily::WideAngleRectified: {
            const double m = std::max(std::abs(pt.x), std::abs(pt.y));
            if (m == 0.0 || p[0] == 0.0) return pt;
            const double s = invert_odd_radial(0.0, p[0], m);
            const double scale = s / m;
            return {pt.x * scale, pt.y * scale};
        }
        case DistortionFamily::RollingShutter:
            return {pt.x - p[0] * (pt.y + 1.0) * 0.5, pt.y};
        case DistortionFamily::Rotated: {
            const double c = std::cos(p[0]), s = std::sin(p[0]);
            return {pt.x * c + pt.y * s, -pt.x * s + pt.y * c};
        }
        case DistortionFamily::Fisheye: {
            const double r = std::sqrt(pt.x * pt.x + pt.y * pt.y);
            if (r == 0.0 || (p[0] == 0.0 && p[1] == 0.0)) return pt;
            const double s = invert_odd_radial(p[0], p[1], r);
            const double scale = s / r;
            return {pt.x * scale, pt.y * scale};
        }
        case DistortionFamily::Portrait: {
            // q = pt - d(q) is a contraction (bump strengths sum < 1).
            Point2 q = pt;
            for (int it = 0; it < 60; ++it) {
                const Point2 d = portrait_displacement(p, q);
                q = {pt.x - d.x, pt.y - d.y};
            }
            return q;
        }
    }
    throw ValueError("unknown distortion family");
}

} // namespace

Point2 distort_point(const DistortionSpec& spec, Point2 q) {
    validate_spec(spec);
    return forward_map(spec, q);
}

Point2 undistort_point(const DistortionSpec& spec, Point2 pt) {
    validate_spec(spec);
    return inverse_map(spec, pt);
}

ControlGrid generate_grid(const DistortionSpec& spec, int rows, int cols) {
    validate_spec(spec);
    ControlGrid grid = make_regular_grid(rows, cols);
    const bool clamp = spec.family == DistortionFamily::Rotated;
    for (Point2& q : grid.points()) {
        q = forward_map(spec, q);
        if (clamp) {
            q.x = std::min(1.0, std::max(-1.0, q.x));
            q.y = std::min(1.0, std::max(-1.0, q.y));
        }
    }
    return grid;
}

ImageBuffer render_clean_image(int width, int height, std::uint64_t seed) {
    if (width < 1 || height < 1) throw DimensionError("image dimensions must be positive");
    std::mt19937_64 rng(seed);

    // Two plaids, three soft blobs, one linear gradient; per-channel phases.
    // Frequencies stay low (<= 4 cycles per unit => wavelength >= width/8
    // pixels) so bilinear resampling error stays far below the round-trip
    // tolerance budget.
    struct Plaid {
        double fx, fy, phase[3];
    };
    Plaid plaids[2];
    for (Plaid& pl : plaids) {
        pl.fx = uniform_double(rng, 0.5, 4.0);
        pl.fy = uniform_double(rng, 0.5, 4.0);
        for (double& ph : pl.phase) ph = uniform_double(rng, 0.0, 2.0 * kPi);
    }
    struct Blob {
        double cx, cy, sigma, amp[3];
    };
    Blob blobs[3];
    for (Blob& b : blobs) {
        b.cx = uniform_double(rng, -0.7, 0.7);
        b.cy = uniform_double(rng, -0.7, 0.7);
        b.sigma = uniform_double(rng, 0.3, 0.6);
        for (double& a : b.amp) a = uniform_double(rng, -1.0, 1.0);
    }
    double gdir[2] = {uniform_double(rng, -1.0, 1.0), uniform_double(rng, -1.0, 1.0)};

    ImageBuffer img(width, height, 3);
    for (int y = 0; y < height; ++y) {
        const double ny = pixel_to_normalized(y, height);
        for (int x = 0; x < width; ++x) {
            const double nx = pixel_to_normalized(x, width);
            for (int c = 0; c < 3; ++c) {
                double v = 0.5;
                v += 0.16 * std::sin(2.0 * kPi * (plaids[0].fx * nx + plaids[0].fy * ny) +
                                     plaids[0].phase[c]);
                v += 0.10 * std::sin(2.0 * kPi * (plaids[1].fx * nx + plaids[1].fy * ny) +
                                     plaids[1].phase[c]);
                for (const Blob& b : blobs) {
                    const double dx = nx - b.cx, dy = ny - b.cy;
                    v += 0.10 * b.amp[c] * std::exp(-(dx * dx + dy * dy) / (b.sigma * b.sigma));
                }
                v += 0.06 * (gdir[0] * nx + gdir[1] * ny);
                img.at(y, x, c) = static_cast<float>(std::min(0.98, std::max(0.02, v)));
            }
        }
    }
    return img;
}

SynthSample generate_sample(const DistortionSpec& spec, int width, int height) {
    validate_spec(spec);
    ImageBuffer clean = render_clean_image(width, height, spec.seed);

    // The distorted view of pixel p samples the clean image at T(p); the
    // recovery flow sends it back through T^-1. Both are exact analytic
    // fields, so the round trip is limited only by resampling error.
    FlowField to_clean(width, height);
    FlowField recovery(width, height);
    parallel_rows(height, [&](int y) {
        const double ny = pixel_to_normalized(y, height);
        for (int x = 0; x < width; ++x) {
            const Point2 q{pixel_to_normalized(x, width), ny};
            const Point2 fwd = forward_map(spec, q);
            const Point2 inv = inverse_map(spec, q);
            to_clean.dx(y, x) = fwd.x - q.x;
            to_clean.dy(y, x) = fwd.y - q.y;
            recovery.dx(y, x) = inv.x - q.x;
            recovery.dy(y, x) = inv.y - q.y;
        }
    });

    WarpResult distorted = warp_image(clean, to_clean);
    return SynthSample{std::move(clean), std::move(distorted.image), std::move(distorted.validity),
                       generate_grid(spec, kSampleGridSize, kSampleGridSize),
                       std::move(recovery)};
}

namespace {

DistortionSpec draw_spec(DistortionFamily family, std::mt19937_64& rng, std::uint64_t seed) {
    DistortionSpec spec;
    spec.family = family;
    spec.seed = seed;
    const auto sign = [&rng]() { return (rng() & 1u) ? 1.0 : -1.0; };
    switch (family) {
        case DistortionFamily::Stitched:
            spec.params = {sign() * uniform_double(rng, 0.08, 0.3)};
            break;
        case DistortionFamily::WideAngleRectified:
            spec.params = {uniform_double(rng, 0.08, 0.35)};
            break;
        case DistortionFamily::RollingShutter:
            spec.params = {sign() * uniform_double(rng, 0.1, 0.45)};
            break;
        case DistortionFamily::Rotated:
            spec.params = {sign() * uniform_double(rng, 0.08, 0.5)};
            break;
        case DistortionFamily::Fisheye: {
            const double k1 = uniform_double(rng, 0.05, 0.2);
            const double k2 = uniform_double(rng, 0.0, (0.49 - 2.0 * k1) / 4.0);
            spec.params = {k1, k2};
            break;
        }
        case DistortionFamily::Portrait: {
            const int bumps = 1 + static_cast<int>(uniform_index(rng, 3));
            for (int k = 0; k < bumps; ++k) {
                spec.params.push_back(uniform_double(rng, 0.04, 0.12));
                spec.params.push_back(uniform_double(rng, -0.5, 0.5));
                spec.params.push_back(uniform_double(rng, -0.5, 0.5));
                spec.params.push_back(uniform_double(rng, 0.25, 0.6));
            }
            break;
        }
    }
    validate_spec(spec);
    return spec;
}

} // namespace

DistortionSpec sample_spec(DistortionFamily family, std::uint64_t seed) {
    if (!valid_family(family)) throw ValueError("unknown distortion family");
    std::mt19937_64 rng(seed);
    return draw_spec(family, rng, seed);
}

GridDataset generate_classifier_dataset(int count_per_class, int rows, int cols,
                                        std::uint64_t seed) {
    if (count_per_class < 1) throw ValueError("count_per_class must be >= 1");
    std::mt19937_64 rng(seed);
    GridDataset dataset;
    dataset.reserve(static_cast<std::size_t>(count_per_class) * kFamilyCount);
    for (int f = 0; f < kFamilyCount; ++f) {
        for (int i = 0; i < count_per_class; ++i) {
            const DistortionSpec spec = draw_spec(static_cast<DistortionFamily>(f), rng, seed);
            dataset.push_back({generate_grid(spec, rows, cols), f});
        }
    }
    return dataset;
}

} // namespace warpkit
