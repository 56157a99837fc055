#include "warpkit/flow.hpp"

#include <cmath>
#include <string>

#include "warpkit/errors.hpp"
#include "warpkit/parallel.hpp"

namespace warpkit {

namespace {

double lerp(double a, double b, double t) { return a + t * (b - a); }

int clamp_index(int i, int hi) { return i < 0 ? 0 : (i > hi ? hi : i); }

// Bilinear sample of one channel of an interleaved row-major plane,
// clamp-to-edge. The lerp form keeps exact-node samples bitwise exact.
template <typename T>
double sample_bilinear(const T* data, int width, int height, int channels, int c,
                       double sx, double sy) {
    const double fx0 = std::floor(sx);
    const double fy0 = std::floor(sy);
    const double tx = sx - fx0;
    const double ty = sy - fy0;
    const int x0 = clamp_index(static_cast<int>(fx0), width - 1);
    const int x1 = clamp_index(static_cast<int>(fx0) + 1, width - 1);
    const int y0 = clamp_index(static_cast<int>(fy0), height - 1);
    const int y1 = clamp_index(static_cast<int>(fy0) + 1, height - 1);
    const auto at = [&](int y, int x) {
        return static_cast<double>(data[(static_cast<std::size_t>(y) * width + x) * channels + c]);
    };
    const double top = lerp(at(y0, x0), at(y0, x1), tx);
    const double bot = lerp(at(y1, x0), at(y1, x1), tx);
    return lerp(top, bot, ty);
}

// Source pixel coordinate of output pixel index i under the shared
// normalized frame. Equal sizes map index to index exactly.
double base_coord(int i, int out_size, int src_size) {
    if (out_size == src_size) return static_cast<double>(i);
    return (i + 0.5) * src_size / out_size - 0.5;
}

} // namespace

FlowField densify(const ControlGrid& points, int width, int height) {
    if (width < 1 || height < 1) throw DimensionError("densify target size must be positive");
    const ControlGrid lattice = make_regular_grid(points.rows(), points.cols());
    const TpsTransform t = solve_tps(lattice, points, 0.0);

    FlowField flow(width, height);
    parallel_rows(height, [&](int y) {
        const double ny = pixel_to_normalized(y, height);
        for (int x = 0; x < width; ++x) {
            const double nx = pixel_to_normalized(x, width);
            const Point2 mapped = eval_tps(t, {nx, ny});
            flow.dx(y, x) = mapped.x - nx;
            flow.dy(y, x) = mapped.y - ny;
        }
    });
    return flow;
}

FlowField compose_flow(const FlowField& base, const FlowField& residual) {
    if (base.width() != residual.width() || base.height() != residual.height())
        throw DimensionError("flow dimensions differ: " + std::to_string(base.width()) + "x" +
                             std::to_string(base.height()) + " vs " +
                             std::to_string(residual.width()) + "x" +
                             std::to_string(residual.height()));
    FlowField out(base.width(), base.height());
    for (int y = 0; y < base.height(); ++y) {
        for (int x = 0; x < base.width(); ++x) {
            out.dx(y, x) = base.dx(y, x) + residual.dx(y, x);
            out.dy(y, x) = base.dy(y, x) + residual.dy(y, x);
        }
    }
    return out;
}

WarpResult warp_image(const ImageBuffer& src, const FlowField& flow, const Mask* mask) {
    if (mask && (mask->width() != src.width() || mask->height() != src.height()))
        throw DimensionError("mask dimensions must match the source image");
    const int out_w = flow.width();
    const int out_h = flow.height();
    const int src_w = src.width();
    const int src_h = src.height();
    const int channels = src.channels();

    ImageBuffer out(out_w, out_h, channels);
    Mask validity(out_w, out_h, 0.0f);

    parallel_rows(out_h, [&](int y) {
        const double by = base_coord(y, out_h, src_h);
        for (int x = 0; x < out_w; ++x) {
            const double sx = base_coord(x, out_w, src_w) + flow.dx(y, x) * (src_w * 0.5);
            const double sy = by + flow.dy(y, x) * (src_h * 0.5);
            const bool inside = sx >= 0.0 && sx <= src_w - 1 && sy >= 0.0 && sy <= src_h - 1;
            for (int c = 0; c < channels; ++c) {
                const double v = sample_bilinear(src.data().data(), src_w, src_h, channels, c, sx, sy);
                out.at(y, x, c) = static_cast<float>(v);
            }
            if (inside) {
                validity.at(y, x) = mask ? static_cast<float>(sample_bilinear(
                                               mask->data().data(), src_w, src_h, 1, 0, sx, sy))
                                         : 1.0f;
            }
        }
    });
    return {std::move(out), std::move(validity)};
}

FeatureMap warp_features(const FeatureMap& features, const ControlGrid& points) {
    const FlowField flow = densify(points, features.width(), features.height());
    const int w = features.width();
    const int h = features.height();
    const int channels = features.channels();

    FeatureMap out(h, w, channels);
    parallel_rows(h, [&](int y) {
        for (int x = 0; x < w; ++x) {
            const double sx = x + flow.dx(y, x) * (w * 0.5);
            const double sy = y + flow.dy(y, x) * (h * 0.5);
            for (int c = 0; c < channels; ++c)
                out.at(y, x, c) = sample_bilinear(features.data().data(), w, h, channels, c, sx, sy);
        }
    });
    return out;
}

FlowField scale_flow(const FlowField& flow, int new_width, int new_height) {
    if (new_width < 1 || new_height < 1) throw DimensionError("scaled flow size must be positive");
    FlowField out(new_width, new_height);
    parallel_rows(new_height, [&](int y) {
        const double sy = base_coord(y, new_height, flow.height());
        for (int x = 0; x < new_width; ++x) {
            const double sx = base_coord(x, new_width, flow.width());
            out.dx(y, x) = sample_bilinear(flow.dx_plane().data(), flow.width(), flow.height(), 1, 0, sx, sy);
            out.dy(y, x) = sample_bilinear(flow.dy_plane().data(), flow.width(), flow.height(), 1, 0, sx, sy);
        }
    });
    return out;
}

} // namespace warpkit
