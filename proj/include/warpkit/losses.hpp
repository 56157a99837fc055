#pragma once

#include <vector>

#include "warpkit/geometry.hpp"

namespace warpkit {

/// Scale factors combining the individual training objectives.
/// Both lambdas default to the standard 0.1. middle_weights, when present,
/// is the per-stage weighting for intermediate-lattice supervision and must
/// be nonnegative and strictly increasing.
struct LossWeights {
    double lambda_flow = 0.1;
    double lambda_cls = 0.1;
    std::vector<double> middle_weights;
};

/// Throws ValueError when the weights violate their invariants.
void validate(const LossWeights& weights);

/// Already-reduced scalar terms entering the total objective.
/// `extra` is an optional pre-weighted additive slot for terms outside this
/// library's scope (e.g. a perceptual penalty computed elsewhere).
struct LossParts {
    double reconstruction = 0.0;
    double grid = 0.0;
    double flow = 0.0;
    double classification = 0.0;
    double extra = 0.0;
};

/// Mean absolute difference between two equal-shaped images. When a mask is
/// given, each pixel's samples are weighted by the mask value; a mask that
/// sums to zero yields 0. Throws DimensionError on shape mismatch.
double reconstruction_loss(const ImageBuffer& pred, const ImageBuffer& gt,
                           const Mask* mask = nullptr);

/// Mean over all consecutive same-row and same-column edge pairs of
/// (1 - cos angle) between the two edges. Zero for a perfectly regular
/// lattice; a right-angle bend contributes exactly 1. A zero-length edge is
/// treated as collinear (contributes 0) but still counts toward the mean.
/// Requires at least one traversable run of 3 points (DimensionError).
double inter_grid_loss(const Mesh& mesh);

/// Mean absolute componentwise difference between two equal-sized flows
/// (averaged over both displacement components of every pixel).
double flow_loss(const FlowField& pred, const FlowField& gt);

/// -log softmax(logits)[label], computed with the log-sum-exp trick so large
/// logits cannot overflow. Throws ValueError for an out-of-range label.
double cross_entropy(const std::vector<double>& logits, int label);

/// Normalized exponentially growing stage weights: base^t for
/// t = 0..num_heads-1, scaled to sum to 1. Requires num_heads >= 1 and
/// base > 1 (ValueError otherwise).
std::vector<double> middle_supervision_weights(int num_heads, double base);

/// reconstruction + grid + lambda_flow * flow + lambda_cls * classification
/// + extra. All parts must be finite (ValueError).
double total_loss(const LossParts& parts, const LossWeights& weights);

} // namespace warpkit
