#include "warpkit/hierarchy.hpp"

#include <string>
#include <utility>

#include "warpkit/errors.hpp"
#include "warpkit/flow.hpp"

namespace warpkit {

HeadSchedule::HeadSchedule(std::vector<int> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.empty()) throw DimensionError("head schedule must have at least one stage");
    int prev = 2;
    for (int s : sizes_) {
        if (s < prev)
            throw DimensionError("head schedule sizes must be non-decreasing and >= 2");
        prev = s;
    }
}

HeadSchedule HeadSchedule::standard() { return HeadSchedule({10, 12, 14, 16}); }

namespace {

double lerp(double a, double b, double t) { return a + t * (b - a); }

} // namespace

ControlGrid upsample_control_points(const ControlGrid& grid, int new_rows, int new_cols) {
    const int rows = grid.rows();
    const int cols = grid.cols();
    if (new_rows < rows || new_cols < cols)
        throw DimensionError("control point upsampling cannot shrink the lattice (" +
                             std::to_string(rows) + "x" + std::to_string(cols) + " -> " +
                             std::to_string(new_rows) + "x" + std::to_string(new_cols) + ")");
    if (new_rows == rows && new_cols == cols) return grid;

    const ControlGrid base = make_regular_grid(rows, cols);
    ControlGrid out = make_regular_grid(new_rows, new_cols);

    // Displacement at old lattice node (r,c).
    const auto disp = [&](int r, int c) -> Point2 { return grid.at(r, c) - base.at(r, c); };

    for (int r = 0; r < new_rows; ++r) {
        // Continuous old-lattice coordinates of the new node; shared nodes land
        // on exact integers, so same-size upsampling is the bitwise identity.
        const double v = static_cast<double>(r) * (rows - 1) / (new_rows - 1);
        const int r0 = std::min(static_cast<int>(v), rows - 2);
        const double tv = v - r0;
        for (int c = 0; c < new_cols; ++c) {
            const double u = static_cast<double>(c) * (cols - 1) / (new_cols - 1);
            const int c0 = std::min(static_cast<int>(u), cols - 2);
            const double tu = u - c0;

            const Point2 d00 = disp(r0, c0), d01 = disp(r0, c0 + 1);
            const Point2 d10 = disp(r0 + 1, c0), d11 = disp(r0 + 1, c0 + 1);
            const double dx = lerp(lerp(d00.x, d01.x, tu), lerp(d10.x, d11.x, tu), tv);
            const double dy = lerp(lerp(d00.y, d01.y, tu), lerp(d10.y, d11.y, tu), tv);
            Point2& p = out.at(r, c);
            p.x += dx;
            p.y += dy;
        }
    }
    return out;
}

ControlGrid compose_head(const ControlGrid& prev, const ControlGrid& delta) {
    const ControlGrid up = upsample_control_points(prev, delta.rows(), delta.cols());
    std::vector<Point2> points = up.points();
    for (std::size_t i = 0; i < points.size(); ++i) {
        points[i].x += delta.points()[i].x;
        points[i].y += delta.points()[i].y;
    }
    return ControlGrid(delta.rows(), delta.cols(), std::move(points));
}

std::vector<ControlGrid> run_cascade(const FeatureMap& features, const HeadSchedule& schedule,
                                     const std::vector<Predictor>& predictors,
                                     const ControlGrid& initial) {
    if (predictors.size() != schedule.stages())
        throw DimensionError("predictor count " + std::to_string(predictors.size()) +
                             " != schedule stages " + std::to_string(schedule.stages()));
    if (initial.rows() > schedule.sizes().front() || initial.cols() > schedule.sizes().front())
        throw DimensionError("initial lattice must not exceed the first head size");

    std::vector<ControlGrid> stages;
    stages.reserve(schedule.stages());
    ControlGrid current = initial;
    for (std::size_t t = 0; t < schedule.stages(); ++t) {
        const int size = schedule.sizes()[t];
        const FeatureMap warped = warp_features(features, current);
        ControlGrid delta = predictors[t](warped);
        if (delta.rows() != size || delta.cols() != size)
            throw DimensionError("stage " + std::to_string(t) + " predictor returned " +
                                 std::to_string(delta.rows()) + "x" + std::to_string(delta.cols()) +
                                 ", schedule expects " + std::to_string(size) + "x" +
                                 std::to_string(size));
        current = compose_head(current, delta);
        stages.push_back(current);
    }
    return stages;
}

std::vector<ControlGrid> run_cascade(const FeatureMap& features, const HeadSchedule& schedule,
                                     const std::vector<Predictor>& predictors) {
    return run_cascade(features, schedule, predictors,
                       make_regular_grid(kDefaultInitialSize, kDefaultInitialSize));
}

std::vector<Predictor> recorded_predictors(std::vector<ControlGrid> deltas) {
    std::vector<Predictor> out;
    out.reserve(deltas.size());
    for (ControlGrid& d : deltas) {
        out.push_back([delta = std::move(d)](const FeatureMap&) { return delta; });
    }
    return out;
}

} // namespace warpkit
