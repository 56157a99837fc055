#pragma once

#include <optional>

#include "warpkit/geometry.hpp"
#include "warpkit/tps.hpp"

namespace warpkit {

/// Backward-warped image plus the validity of each output pixel.
/// Validity is 1 where the backward sample fell fully inside the source
/// (attenuated by the source mask when one is given), 0 outside.
struct WarpResult {
    ImageBuffer image;
    Mask validity;
};

/// Densifies a control grid into a per-pixel flow: fits the TPS mapping the
/// regular lattice of the grid's size onto the grid and evaluates it at every
/// pixel center. displacement = mapped - original, in normalized coordinates.
/// An identity grid produces the exactly-zero flow.
FlowField densify(const ControlGrid& points, int width, int height);

/// Elementwise sum of a base flow and a residual flow.
FlowField compose_flow(const FlowField& base, const FlowField& residual);

/// Backward bilinear warp: output pixel p samples src at p + flow(p).
/// Out-of-bounds samples clamp to the edge and clear validity. Output size is
/// the flow's size. A zero flow of the source's size returns the source
/// bitwise. Parallelized over rows; output is identical for any thread count.
WarpResult warp_image(const ImageBuffer& src, const FlowField& flow,
                      const Mask* mask = nullptr);

/// Warps a feature map by control points: densify at the feature resolution,
/// then channelwise backward bilinear sampling. Identity grid is the identity.
FeatureMap warp_features(const FeatureMap& features, const ControlGrid& points);

/// Resamples the normalized displacement field onto a new pixel grid.
/// Displacement magnitudes are resolution-independent, so values carry over
/// unchanged; only the sampling lattice changes.
FlowField scale_flow(const FlowField& flow, int new_width, int new_height);

} // namespace warpkit
