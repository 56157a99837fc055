#pragma once

#include <cstddef>
#include <vector>

namespace warpkit {

// Coordinate conventions used across the engine:
//  - normalized image domain is [-1,1] x [-1,1], x to the right, y down;
//  - pixel center px maps to (px + 0.5) / size * 2 - 1;
//  - all lattices, flows and transforms are stored in normalized coordinates,
//    which makes them resolution-independent;
//  - everything is row-major.

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }

/// An N x M lattice of 2D points in normalized coordinates, row-major.
/// Rejects non-finite points and size/length mismatches on construction.
class ControlGrid {
public:
    ControlGrid() = default;
    ControlGrid(int rows, int cols, std::vector<Point2> points);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int point_count() const { return rows_ * cols_; }

    const Point2& at(int r, int c) const { return points_[static_cast<std::size_t>(r) * cols_ + c]; }
    Point2& at(int r, int c) { return points_[static_cast<std::size_t>(r) * cols_ + c]; }

    const std::vector<Point2>& points() const { return points_; }
    std::vector<Point2>& points() { return points_; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Point2> points_;
};

/// A control lattice with its implicit 4-connectivity edges.
struct Mesh {
    ControlGrid grid;
};

/// Raster image, samples in [0,1] by convention, interleaved channels.
class ImageBuffer {
public:
    ImageBuffer() = default;
    ImageBuffer(int width, int height, int channels, std::vector<float> data);
    /// Constant-filled image.
    ImageBuffer(int width, int height, int channels, float fill = 0.0f);

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }

    float at(int y, int x, int c) const {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }
    float& at(int y, int x, int c) {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }

    const std::vector<float>& data() const { return data_; }
    std::vector<float>& data() { return data_; }

private:
    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<float> data_;
};

/// Per-pixel validity, 1 = valid. Values in [0,1] to allow soft masks.
class Mask {
public:
    Mask() = default;
    Mask(int width, int height, std::vector<float> data);
    Mask(int width, int height, float fill);

    int width() const { return width_; }
    int height() const { return height_; }

    float at(int y, int x) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    float& at(int y, int x) { return data_[static_cast<std::size_t>(y) * width_ + x]; }

    const std::vector<float>& data() const { return data_; }
    std::vector<float>& data() { return data_; }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<float> data_;
};

/// Dense backward displacement map in normalized coordinates.
class FlowField {
public:
    FlowField() = default;
    FlowField(int width, int height, std::vector<double> dx, std::vector<double> dy);
    /// Zero flow.
    FlowField(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }

    double dx(int y, int x) const { return dx_[static_cast<std::size_t>(y) * width_ + x]; }
    double dy(int y, int x) const { return dy_[static_cast<std::size_t>(y) * width_ + x]; }
    double& dx(int y, int x) { return dx_[static_cast<std::size_t>(y) * width_ + x]; }
    double& dy(int y, int x) { return dy_[static_cast<std::size_t>(y) * width_ + x]; }

    const std::vector<double>& dx_plane() const { return dx_; }
    const std::vector<double>& dy_plane() const { return dy_; }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> dx_;
    std::vector<double> dy_;
};

/// Real-valued H x W x C tensor, row-major.
class FeatureMap {
public:
    FeatureMap() = default;
    FeatureMap(int height, int width, int channels, std::vector<double> data);
    FeatureMap(int height, int width, int channels);

    int height() const { return height_; }
    int width() const { return width_; }
    int channels() const { return channels_; }

    double at(int y, int x, int c) const {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }
    double& at(int y, int x, int c) {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

private:
    int height_ = 0;
    int width_ = 0;
    int channels_ = 0;
    std::vector<double> data_;
};

/// Evenly spaced lattice covering [-1,1]^2, corners included.
/// Throws DimensionError for rows or cols < 2.
ControlGrid make_regular_grid(int rows, int cols);

/// Pixel-center convention: px -> (px + 0.5) / size * 2 - 1.
double pixel_to_normalized(double px, int size);

/// Inverse of pixel_to_normalized; round-trips exactly.
double normalized_to_pixel(double coord, int size);

} // namespace warpkit
