#include "warpkit/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "warpkit/errors.hpp"

namespace warpkit {

void validate(const LossWeights& weights) {
    if (!(weights.lambda_flow >= 0.0) || !std::isfinite(weights.lambda_flow))
        throw ValueError("lambda_flow must be finite and nonnegative");
    if (!(weights.lambda_cls >= 0.0) || !std::isfinite(weights.lambda_cls))
        throw ValueError("lambda_cls must be finite and nonnegative");
    for (std::size_t i = 0; i < weights.middle_weights.size(); ++i) {
        const double w = weights.middle_weights[i];
        if (!(w >= 0.0) || !std::isfinite(w))
            throw ValueError("middle weights must be finite and nonnegative");
        if (i > 0 && !(w > weights.middle_weights[i - 1]))
            throw ValueError("middle weights must be strictly increasing");
    }
}

double reconstruction_loss(const ImageBuffer& pred, const ImageBuffer& gt, const Mask* mask) {
    if (pred.width() != gt.width() || pred.height() != gt.height() ||
        pred.channels() != gt.channels())
        throw DimensionError("reconstruction loss needs equal image shapes");
    if (mask && (mask->width() != pred.width() || mask->height() != pred.height()))
        throw DimensionError("mask size does not match the images");

    const int channels = pred.channels();
    double num = 0.0;
    double den = 0.0;
    for (int y = 0; y < pred.height(); ++y) {
        for (int x = 0; x < pred.width(); ++x) {
            const double w = mask ? static_cast<double>(mask->at(y, x)) : 1.0;
            if (w == 0.0) continue;
            for (int c = 0; c < channels; ++c) {
                num += w * std::abs(static_cast<double>(pred.at(y, x, c)) - gt.at(y, x, c));
            }
            den += w * channels;
        }
    }
    return den > 0.0 ? num / den : 0.0;
}

namespace {

// 1 - cos(angle between b-a and c-b); 0 when either edge has zero length.
double bend_penalty(Point2 a, Point2 b, Point2 c) {
    const Point2 e1 = b - a;
    const Point2 e2 = c - b;
    const double n1 = std::sqrt(e1.x * e1.x + e1.y * e1.y);
    const double n2 = std::sqrt(e2.x * e2.x + e2.y * e2.y);
    if (n1 == 0.0 || n2 == 0.0) return 0.0;
    return 1.0 - (e1.x * e2.x + e1.y * e2.y) / (n1 * n2);
}

} // namespace

double inter_grid_loss(const Mesh& mesh) {
    const ControlGrid& g = mesh.grid;
    double sum = 0.0;
    long pairs = 0;
    if (g.cols() >= 3) {
        for (int r = 0; r < g.rows(); ++r) {
            for (int c = 0; c + 2 < g.cols(); ++c) {
                sum += bend_penalty(g.at(r, c), g.at(r, c + 1), g.at(r, c + 2));
                ++pairs;
            }
        }
    }
    if (g.rows() >= 3) {
        for (int c = 0; c < g.cols(); ++c) {
            for (int r = 0; r + 2 < g.rows(); ++r) {
                sum += bend_penalty(g.at(r, c), g.at(r + 1, c), g.at(r + 2, c));
                ++pairs;
            }
        }
    }
    if (pairs == 0)
        throw DimensionError("mesh needs at least 3 points along one direction, got " +
                             std::to_string(g.rows()) + "x" + std::to_string(g.cols()));
    return sum / pairs;
}

double flow_loss(const FlowField& pred, const FlowField& gt) {
    if (pred.width() != gt.width() || pred.height() != gt.height())
        throw DimensionError("flow loss needs equal flow sizes");
    const std::size_t n = pred.dx_plane().size();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum += std::abs(pred.dx_plane()[i] - gt.dx_plane()[i]);
        sum += std::abs(pred.dy_plane()[i] - gt.dy_plane()[i]);
    }
    return sum / (2.0 * static_cast<double>(n));
}

double cross_entropy(const std::vector<double>& logits, int label) {
    if (logits.empty()) throw DimensionError("cross entropy needs at least one logit");
    if (label < 0 || static_cast<std::size_t>(label) >= logits.size())
        throw ValueError("class label " + std::to_string(label) + " out of range [0, " +
                         std::to_string(logits.size()) + ")");
    const double m = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double l : logits) sum += std::exp(l - m);
    return m + std::log(sum) - logits[label];
}

std::vector<double> middle_supervision_weights(int num_heads, double base) {
    if (num_heads < 1) throw ValueError("need at least one stage weight");
    if (!(base > 1.0)) throw ValueError("stage weight base must be > 1");
    std::vector<double> weights(num_heads);
    double v = 1.0;
    double total = 0.0;
    for (int t = 0; t < num_heads; ++t) {
        weights[t] = v;
        total += v;
        v *= base;
    }
    for (double& w : weights) w /= total;
    return weights;
}

double total_loss(const LossParts& parts, const LossWeights& weights) {
    validate(weights);
    for (double v : {parts.reconstruction, parts.grid, parts.flow, parts.classification,
                     parts.extra}) {
        if (!std::isfinite(v)) throw ValueError("loss parts must be finite");
    }
    return parts.reconstruction + parts.grid + weights.lambda_flow * parts.flow +
           weights.lambda_cls * parts.classification + parts.extra;
}

} // namespace warpkit
