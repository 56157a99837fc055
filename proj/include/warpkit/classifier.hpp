#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "warpkit/geometry.hpp"

namespace warpkit {

/// Fully connected layer. weight is row-major, out_dim x in_dim.
struct DenseLayer {
    int in_dim = 0;
    int out_dim = 0;
    std::vector<double> weight;
    std::vector<double> bias;
};

/// Network shape of the point-based task classifier.
///
/// pointwise_dims are the output widths of the shared layers applied to every
/// lattice point's 2D coordinates; head_dims are the output widths of the
/// layers applied after max-pooling (the last entry is the class count).
/// global_dim is the width of an optional externally computed global feature
/// vector that, when nonzero, is concatenated to each point's features before
/// pooling. The defaults give the standard 6-class network.
struct ClassifierConfig {
    std::vector<int> pointwise_dims = {256, 256, 512};
    std::vector<int> head_dims = {512, 256, 6};
    int global_dim = 0;

    int class_count() const { return head_dims.back(); }
};

struct ClassifierParams {
    ClassifierConfig config;
    std::vector<DenseLayer> pointwise;
    std::vector<DenseLayer> head;
    std::uint64_t seed = 0;
};

/// Soft task label: probabilities over the task families.
/// Entries must be nonnegative and sum to 1 within 1e-9.
class TaskLabel {
public:
    TaskLabel() = default;
    explicit TaskLabel(std::vector<double> probs);

    const std::vector<double>& probs() const { return probs_; }
    std::size_t size() const { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }

private:
    std::vector<double> probs_;
};

struct ForwardResult {
    std::vector<double> logits;
    TaskLabel label;
};

/// Gradients of the sample loss with respect to every parameter, plus the
/// loss value itself. Layout mirrors ClassifierParams.
struct ClassifierGradients {
    std::vector<DenseLayer> pointwise;
    std::vector<DenseLayer> head;
    double loss = 0.0;
};

struct LabeledGrid {
    ControlGrid points;
    int label = 0;
};

using GridDataset = std::vector<LabeledGrid>;

struct TrainConfig {
    int epochs = 30;
    double learning_rate = 0.05;
    int batch_size = 16;
    std::uint64_t seed = 1;
};

struct EpochStats {
    double mean_loss = 0.0;
    std::optional<double> holdout_accuracy;
};

struct TrainResult {
    ClassifierParams params;
    std::vector<EpochStats> history;
};

/// Fresh parameters: weights uniform in (-1/sqrt(fan_in), 1/sqrt(fan_in)),
/// biases zero, drawn deterministically from the seed.
ClassifierParams init_classifier(const ClassifierConfig& config, std::uint64_t seed);

/// Total number of trainable scalars.
std::size_t count_parameters(const ClassifierParams& params);

/// Runs the network on a lattice: shared layers per point (rectifier after
/// each), optional global feature concatenated to every point, componentwise
/// max-pool over points, head layers (rectifier between, raw final logits),
/// softmax. Invariant under any permutation of the points.
/// global_feat is required exactly when config.global_dim > 0.
ForwardResult classifier_forward(const ClassifierParams& params, const ControlGrid& points,
                                 const std::vector<double>* global_feat = nullptr);

/// Analytic gradients of cross_entropy(forward(points), label) with respect
/// to all parameters. At max-pool ties the subgradient goes to the lowest
/// point index.
ClassifierGradients classifier_backward(const ClassifierParams& params, const ControlGrid& points,
                                        int label, const std::vector<double>* global_feat = nullptr);

/// Most probable class, ties broken toward the lowest index.
int predict_task(const ClassifierParams& params, const ControlGrid& points,
                 const std::vector<double>* global_feat = nullptr);

/// Fraction of samples whose prediction matches the label.
double evaluate_accuracy(const ClassifierParams& params, const GridDataset& dataset);

/// Minibatch gradient-descent trainer. Deterministic for a fixed seed and
/// single-threaded by design; two runs with equal inputs produce bitwise-equal
/// parameters. Per-epoch mean training loss (and holdout accuracy, when a
/// holdout set is given) is recorded in the result history. Zero epochs
/// returns the initialization unchanged. Requires a non-empty training set
/// with at least two distinct labels.
TrainResult train_classifier(const GridDataset& train, const GridDataset& holdout,
                             const ClassifierConfig& config, const TrainConfig& tconfig);

} // namespace warpkit
