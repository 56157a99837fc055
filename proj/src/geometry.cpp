#include "warpkit/geometry.hpp"

#include <cmath>
#include <string>

#include "warpkit/errors.hpp"

namespace warpkit {

namespace {

void require_finite(const std::vector<Point2>& points, const char* what) {
    for (const Point2& p : points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw ValueError(std::string(what) + " contains a non-finite point");
    }
}

template <typename T>
void require_finite(const std::vector<T>& values, const char* what) {
    for (const T v : values) {
        if (!std::isfinite(v)) throw ValueError(std::string(what) + " contains a non-finite sample");
    }
}

} // namespace

ControlGrid::ControlGrid(int rows, int cols, std::vector<Point2> points)
    : rows_(rows), cols_(cols), points_(std::move(points)) {
    if (rows < 2 || cols < 2)
        throw DimensionError("control grid needs rows >= 2 and cols >= 2, got " +
                             std::to_string(rows) + "x" + std::to_string(cols));
    if (points_.size() != static_cast<std::size_t>(rows) * cols)
        throw DimensionError("control grid point count " + std::to_string(points_.size()) +
                             " != rows*cols = " + std::to_string(static_cast<std::size_t>(rows) * cols));
    require_finite(points_, "control grid");
}

ImageBuffer::ImageBuffer(int width, int height, int channels, std::vector<float> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
    if (width < 1 || height < 1) throw DimensionError("image dimensions must be positive");
    if (channels != 1 && channels != 3 && channels != 4)
        throw DimensionError("image channels must be 1, 3 or 4, got " + std::to_string(channels));
    if (data_.size() != static_cast<std::size_t>(width) * height * channels)
        throw DimensionError("image data length " + std::to_string(data_.size()) +
                             " != width*height*channels");
    require_finite(data_, "image");
}

ImageBuffer::ImageBuffer(int width, int height, int channels, float fill)
    : ImageBuffer(width, height, channels,
                  std::vector<float>(static_cast<std::size_t>(width) * height * channels, fill)) {}

Mask::Mask(int width, int height, std::vector<float> data)
    : width_(width), height_(height), data_(std::move(data)) {
    if (width < 1 || height < 1) throw DimensionError("mask dimensions must be positive");
    if (data_.size() != static_cast<std::size_t>(width) * height)
        throw DimensionError("mask data length " + std::to_string(data_.size()) + " != width*height");
    require_finite(data_, "mask");
}

Mask::Mask(int width, int height, float fill)
    : Mask(width, height, std::vector<float>(static_cast<std::size_t>(width) * height, fill)) {}

FlowField::FlowField(int width, int height, std::vector<double> dx, std::vector<double> dy)
    : width_(width), height_(height), dx_(std::move(dx)), dy_(std::move(dy)) {
    if (width < 1 || height < 1) throw DimensionError("flow dimensions must be positive");
    const std::size_t n = static_cast<std::size_t>(width) * height;
    if (dx_.size() != n || dy_.size() != n)
        throw DimensionError("flow plane length != width*height");
    require_finite(dx_, "flow dx");
    require_finite(dy_, "flow dy");
}

FlowField::FlowField(int width, int height)
    : FlowField(width, height, std::vector<double>(static_cast<std::size_t>(width) * height, 0.0),
                std::vector<double>(static_cast<std::size_t>(width) * height, 0.0)) {}

FeatureMap::FeatureMap(int height, int width, int channels, std::vector<double> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
    if (width < 1 || height < 1 || channels < 1)
        throw DimensionError("feature map dimensions must be positive");
    if (data_.size() != static_cast<std::size_t>(width) * height * channels)
        throw DimensionError("feature map data length != height*width*channels");
    require_finite(data_, "feature map");
}

FeatureMap::FeatureMap(int height, int width, int channels)
    : FeatureMap(height, width, channels,
                 std::vector<double>(static_cast<std::size_t>(width) * height * channels, 0.0)) {}

ControlGrid make_regular_grid(int rows, int cols) {
    if (rows < 2 || cols < 2)
        throw DimensionError("regular grid needs rows >= 2 and cols >= 2, got " +
                             std::to_string(rows) + "x" + std::to_string(cols));
    std::vector<Point2> points;
    points.reserve(static_cast<std::size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r) {
        const double y = -1.0 + 2.0 * r / (rows - 1);
        for (int c = 0; c < cols; ++c) {
            const double x = -1.0 + 2.0 * c / (cols - 1);
            points.push_back({x, y});
        }
    }
    return ControlGrid(rows, cols, std::move(points));
}

double pixel_to_normalized(double px, int size) {
    return (px + 0.5) / size * 2.0 - 1.0;
}

double normalized_to_pixel(double coord, int size) {
    return (coord + 1.0) * 0.5 * size - 0.5;
}

} // namespace warpkit
