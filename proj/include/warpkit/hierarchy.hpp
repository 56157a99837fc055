#pragma once

#include <functional>
#include <vector>

#include "warpkit/geometry.hpp"

namespace warpkit {

/// Ordered square lattice sizes produced by the refinement heads.
/// Sizes must be non-decreasing and >= 2.
class HeadSchedule {
public:
    HeadSchedule() = default;
    explicit HeadSchedule(std::vector<int> sizes);

    const std::vector<int>& sizes() const { return sizes_; }
    std::size_t stages() const { return sizes_.size(); }

    /// 10, 12, 14, 16.
    static HeadSchedule standard();

private:
    std::vector<int> sizes_;
};

/// A stage head: consumes the feature map warped by the current points and
/// returns a per-point delta grid of the stage's lattice size. Heads can be
/// scripted, recorded from file, or backed by an external model.
using Predictor = std::function<ControlGrid(const FeatureMap&)>;

/// Size of the identity lattice run_cascade starts from when no initial grid
/// is given.
inline constexpr int kDefaultInitialSize = 8;

/// Resamples the grid's displacement field (grid minus the same-size regular
/// lattice) bilinearly onto the new lattice and re-adds the new regular
/// lattice. Upsampling an identity lattice yields an identity lattice; the
/// same-size case is the exact identity. Downsampling is rejected.
ControlGrid upsample_control_points(const ControlGrid& grid, int new_rows, int new_cols);

/// One refinement step: upsample prev to the delta's size, add the delta.
ControlGrid compose_head(const ControlGrid& prev, const ControlGrid& delta);

/// Runs the coarse-to-fine cascade: at each stage the features are warped by
/// the current points, the stage predictor proposes a delta at the scheduled
/// size, and the delta is composed on top. Returns every stage's points (for
/// middle-level supervision).
std::vector<ControlGrid> run_cascade(const FeatureMap& features, const HeadSchedule& schedule,
                                     const std::vector<Predictor>& predictors,
                                     const ControlGrid& initial);

/// Same, starting from the default identity lattice.
std::vector<ControlGrid> run_cascade(const FeatureMap& features, const HeadSchedule& schedule,
                                     const std::vector<Predictor>& predictors);

/// Wraps pre-recorded per-stage deltas as predictors (each ignores the
/// features and replays its delta).
std::vector<Predictor> recorded_predictors(std::vector<ControlGrid> deltas);

} // namespace warpkit
