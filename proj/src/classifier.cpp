#include "warpkit/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>

#include "warpkit/errors.hpp"
#include "warpkit/losses.hpp"
#include "warpkit/rng.hpp"

namespace warpkit {

TaskLabel::TaskLabel(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw DimensionError("task label needs at least one entry");
    double sum = 0.0;
    for (double p : probs_) {
        if (!(p >= 0.0) || !std::isfinite(p))
            throw ValueError("task label entries must be finite and nonnegative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw ValueError("task label must sum to 1, got " + std::to_string(sum));
}

namespace {

void validate_config(const ClassifierConfig& cfg) {
    if (cfg.pointwise_dims.empty() || cfg.head_dims.empty())
        throw DimensionError("classifier needs at least one shared layer and one head layer");
    for (int d : cfg.pointwise_dims)
        if (d < 1) throw DimensionError("layer widths must be positive");
    for (int d : cfg.head_dims)
        if (d < 1) throw DimensionError("layer widths must be positive");
    if (cfg.global_dim < 0) throw DimensionError("global feature width must be nonnegative");
}

void validate_layer(const DenseLayer& layer, int expect_in, int expect_out, const char* what) {
    if (layer.in_dim != expect_in || layer.out_dim != expect_out ||
        layer.weight.size() != static_cast<std::size_t>(expect_in) * expect_out ||
        layer.bias.size() != static_cast<std::size_t>(expect_out))
        throw DimensionError(std::string(what) + " layer shape does not match the configuration");
    for (double v : layer.weight)
        if (!std::isfinite(v)) throw ValueError("classifier weights must be finite");
    for (double v : layer.bias)
        if (!std::isfinite(v)) throw ValueError("classifier biases must be finite");
}

void validate_params(const ClassifierParams& p) {
    validate_config(p.config);
    if (p.pointwise.size() != p.config.pointwise_dims.size() ||
        p.head.size() != p.config.head_dims.size())
        throw DimensionError("classifier layer count does not match the configuration");
    int in = 2;
    for (std::size_t i = 0; i < p.pointwise.size(); ++i) {
        validate_layer(p.pointwise[i], in, p.config.pointwise_dims[i], "shared");
        in = p.config.pointwise_dims[i];
    }
    in = p.config.pointwise_dims.back() + p.config.global_dim;
    for (std::size_t i = 0; i < p.head.size(); ++i) {
        validate_layer(p.head[i], in, p.config.head_dims[i], "head");
        in = p.config.head_dims[i];
    }
}

const std::vector<double>* check_global(const ClassifierConfig& cfg,
                                        const std::vector<double>* global_feat) {
    if (cfg.global_dim == 0) {
        if (global_feat && !global_feat->empty())
            throw DimensionError("global feature given but the configuration has none");
        return nullptr;
    }
    if (!global_feat || global_feat->size() != static_cast<std::size_t>(cfg.global_dim))
        throw DimensionError("global feature width must be " + std::to_string(cfg.global_dim));
    return global_feat;
}

// y = W x + b
void dense(const DenseLayer& l, const double* x, double* y) {
    for (int o = 0; o < l.out_dim; ++o) {
        const double* row = l.weight.data() + static_cast<std::size_t>(o) * l.in_dim;
        double acc = l.bias[o];
        for (int i = 0; i < l.in_dim; ++i) acc += row[i] * x[i];
        y[o] = acc;
    }
}

void relu_inplace(double* v, int n) {
    for (int i = 0; i < n; ++i) v[i] = v[i] > 0.0 ? v[i] : 0.0;
}

std::vector<double> softmax(const std::vector<double>& logits) {
    const double m = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = std::exp(logits[i] - m);
        sum += p[i];
    }
    for (double& v : p) v /= sum;
    return p;
}

// Everything the backward pass needs from one forward run.
struct ForwardTrace {
    // acts[l][point * dims[l] + k]: post-activation of shared layer l.
    std::vector<std::vector<double>> point_acts;
    std::vector<double> pooled;      // after global concat and max-pool
    std::vector<int> winner;         // winning point index per pooled slot
    std::vector<std::vector<double>> head_acts; // post-activation per head layer (last = logits)
    std::vector<double> probs;
};

ForwardTrace run_forward(const ClassifierParams& params, const ControlGrid& points,
                         const std::vector<double>* global_feat) {
    validate_params(params);
    const std::vector<double>* g = check_global(params.config, global_feat);
    const int n = points.point_count();
    if (n < 1) throw DimensionError("classifier needs a non-empty lattice");

    ForwardTrace t;
    const std::size_t layers = params.pointwise.size();
    t.point_acts.resize(layers);
    for (std::size_t l = 0; l < layers; ++l)
        t.point_acts[l].resize(static_cast<std::size_t>(n) * params.pointwise[l].out_dim);

    for (int i = 0; i < n; ++i) {
        const Point2 p = points.points()[static_cast<std::size_t>(i)];
        double coords[2] = {p.x, p.y};
        const double* in = coords;
        for (std::size_t l = 0; l < layers; ++l) {
            double* out = t.point_acts[l].data() +
                          static_cast<std::size_t>(i) * params.pointwise[l].out_dim;
            dense(params.pointwise[l], in, out);
            relu_inplace(out, params.pointwise[l].out_dim);
            in = out;
        }
    }

    const int d = params.config.pointwise_dims.back();
    const int gdim = params.config.global_dim;
    t.pooled.assign(static_cast<std::size_t>(d) + gdim, 0.0);
    t.winner.assign(static_cast<std::size_t>(d) + gdim, 0);
    const std::vector<double>& last = t.point_acts.back();
    for (int k = 0; k < d; ++k) {
        double best = last[static_cast<std::size_t>(k)];
        int best_i = 0;
        for (int i = 1; i < n; ++i) {
            const double v = last[static_cast<std::size_t>(i) * d + k];
            if (v > best) { // strict: ties keep the lowest index
                best = v;
                best_i = i;
            }
        }
        t.pooled[static_cast<std::size_t>(k)] = best;
        t.winner[static_cast<std::size_t>(k)] = best_i;
    }
    // The global feature is identical across points, so its pooled slots are
    // the feature itself (winner: lowest index by the tie rule).
    for (int k = 0; k < gdim; ++k) t.pooled[static_cast<std::size_t>(d) + k] = (*g)[k];

    t.head_acts.resize(params.head.size());
    const double* in = t.pooled.data();
    for (std::size_t l = 0; l < params.head.size(); ++l) {
        t.head_acts[l].resize(params.head[l].out_dim);
        dense(params.head[l], in, t.head_acts[l].data());
        if (l + 1 < params.head.size()) relu_inplace(t.head_acts[l].data(), params.head[l].out_dim);
        in = t.head_acts[l].data();
    }
    t.probs = softmax(t.head_acts.back());
    return t;
}

std::vector<DenseLayer> zero_like(const std::vector<DenseLayer>& layers) {
    std::vector<DenseLayer> out(layers.size());
    for (std::size_t i = 0; i < layers.size(); ++i) {
        out[i].in_dim = layers[i].in_dim;
        out[i].out_dim = layers[i].out_dim;
        out[i].weight.assign(layers[i].weight.size(), 0.0);
        out[i].bias.assign(layers[i].bias.size(), 0.0);
    }
    return out;
}

DenseLayer init_layer(int in_dim, int out_dim, std::mt19937_64& rng) {
    DenseLayer l;
    l.in_dim = in_dim;
    l.out_dim = out_dim;
    // Fan-in-scaled uniform for weights and biases alike. Zero biases would put
    // every dead point's next pre-activation exactly on the rectifier corner,
    // where the loss surface has a genuine kink and gradient checks are ill-posed.
    const double bound = 1.0 / std::sqrt(static_cast<double>(in_dim));
    l.weight.resize(static_cast<std::size_t>(in_dim) * out_dim);
    for (double& w : l.weight) w = uniform_double(rng, -bound, bound);
    l.bias.resize(static_cast<std::size_t>(out_dim));
    for (double& b : l.bias) b = uniform_double(rng, -bound, bound);
    return l;
}

} // namespace

ClassifierParams init_classifier(const ClassifierConfig& config, std::uint64_t seed) {
    validate_config(config);
    std::mt19937_64 rng(seed);
    ClassifierParams p;
    p.config = config;
    p.seed = seed;
    int in = 2;
    for (int out : config.pointwise_dims) {
        p.pointwise.push_back(init_layer(in, out, rng));
        in = out;
    }
    in = config.pointwise_dims.back() + config.global_dim;
    for (int out : config.head_dims) {
        p.head.push_back(init_layer(in, out, rng));
        in = out;
    }
    return p;
}

std::size_t count_parameters(const ClassifierParams& params) {
    std::size_t n = 0;
    for (const DenseLayer& l : params.pointwise) n += l.weight.size() + l.bias.size();
    for (const DenseLayer& l : params.head) n += l.weight.size() + l.bias.size();
    return n;
}

ForwardResult classifier_forward(const ClassifierParams& params, const ControlGrid& points,
                                 const std::vector<double>* global_feat) {
    ForwardTrace t = run_forward(params, points, global_feat);
    return {t.head_acts.back(), TaskLabel(std::move(t.probs))};
}

ClassifierGradients classifier_backward(const ClassifierParams& params, const ControlGrid& points,
                                        int label, const std::vector<double>* global_feat) {
    ForwardTrace t = run_forward(params, points, global_feat);
    const int classes = params.config.class_count();
    if (label < 0 || label >= classes)
        throw ValueError("class label " + std::to_string(label) + " out of range [0, " +
                         std::to_string(classes) + ")");

    ClassifierGradients g;
    g.pointwise = zero_like(params.pointwise);
    g.head = zero_like(params.head);
    g.loss = cross_entropy(t.head_acts.back(), label);

    // Head: delta starts as d(loss)/d(logits) = probs - onehot.
    std::vector<double> delta = t.probs;
    delta[static_cast<std::size_t>(label)] -= 1.0;
    for (std::size_t l = params.head.size(); l-- > 0;) {
        const DenseLayer& layer = params.head[l];
        const double* input = l == 0 ? t.pooled.data() : t.head_acts[l - 1].data();
        DenseLayer& grad = g.head[l];
        for (int o = 0; o < layer.out_dim; ++o) {
            const double dv = delta[static_cast<std::size_t>(o)];
            grad.bias[static_cast<std::size_t>(o)] += dv;
            double* wrow = grad.weight.data() + static_cast<std::size_t>(o) * layer.in_dim;
            for (int i = 0; i < layer.in_dim; ++i) wrow[i] += dv * input[i];
        }
        std::vector<double> prev(layer.in_dim, 0.0);
        for (int o = 0; o < layer.out_dim; ++o) {
            const double dv = delta[static_cast<std::size_t>(o)];
            if (dv == 0.0) continue;
            const double* wrow = layer.weight.data() + static_cast<std::size_t>(o) * layer.in_dim;
            for (int i = 0; i < layer.in_dim; ++i) prev[i] += dv * wrow[i];
        }
        if (l > 0) { // rectifier between head layers
            for (int i = 0; i < layer.in_dim; ++i)
                if (!(t.head_acts[l - 1][static_cast<std::size_t>(i)] > 0.0)) prev[i] = 0.0;
        }
        delta = std::move(prev);
    }

    // delta now sits at the pooled vector. Route each slot to its winning
    // point; the global-feature slots carry no parameter dependence.
    const int d = params.config.pointwise_dims.back();
    const int n = points.point_count();
    std::vector<std::vector<double>> dpoint(static_cast<std::size_t>(n));
    for (int k = 0; k < d; ++k) {
        const double dv = delta[static_cast<std::size_t>(k)];
        if (dv == 0.0) continue;
        std::vector<double>& dst = dpoint[static_cast<std::size_t>(t.winner[k])];
        if (dst.empty()) dst.assign(static_cast<std::size_t>(d), 0.0);
        dst[static_cast<std::size_t>(k)] += dv;
    }

    for (int i = 0; i < n; ++i) {
        if (dpoint[static_cast<std::size_t>(i)].empty()) continue;
        std::vector<double> cur = std::move(dpoint[static_cast<std::size_t>(i)]);
        for (std::size_t l = params.pointwise.size(); l-- > 0;) {
            const DenseLayer& layer = params.pointwise[l];
            const double* post = t.point_acts[l].data() +
                                 static_cast<std::size_t>(i) * layer.out_dim;
            // Every shared layer ends in the rectifier.
            for (int o = 0; o < layer.out_dim; ++o)
                if (!(post[o] > 0.0)) cur[static_cast<std::size_t>(o)] = 0.0;

            const Point2 p = points.points()[static_cast<std::size_t>(i)];
            const double coords[2] = {p.x, p.y};
            const double* input = l == 0 ? coords
                                         : t.point_acts[l - 1].data() +
                                               static_cast<std::size_t>(i) * layer.in_dim;
            DenseLayer& grad = g.pointwise[l];
            for (int o = 0; o < layer.out_dim; ++o) {
                const double dv = cur[static_cast<std::size_t>(o)];
                if (dv == 0.0) continue;
                grad.bias[static_cast<std::size_t>(o)] += dv;
                double* wrow = grad.weight.data() + static_cast<std::size_t>(o) * layer.in_dim;
                for (int k = 0; k < layer.in_dim; ++k) wrow[k] += dv * input[k];
            }
            if (l == 0) break;
            std::vector<double> prev(layer.in_dim, 0.0);
            for (int o = 0; o < layer.out_dim; ++o) {
                const double dv = cur[static_cast<std::size_t>(o)];
                if (dv == 0.0) continue;
                const double* wrow = layer.weight.data() +
                                     static_cast<std::size_t>(o) * layer.in_dim;
                for (int k = 0; k < layer.in_dim; ++k) prev[k] += dv * wrow[k];
            }
            cur = std::move(prev);
        }
    }
    return g;
}

int predict_task(const ClassifierParams& params, const ControlGrid& points,
                 const std::vector<double>* global_feat) {
    const ForwardResult r = classifier_forward(params, points, global_feat);
    int best = 0;
    for (std::size_t i = 1; i < r.label.size(); ++i)
        if (r.label[i] > r.label[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
    return best;
}

double evaluate_accuracy(const ClassifierParams& params, const GridDataset& dataset) {
    if (dataset.empty()) throw ValueError("cannot evaluate accuracy on an empty dataset");
    int hits = 0;
    for (const LabeledGrid& s : dataset)
        if (predict_task(params, s.points) == s.label) ++hits;
    return static_cast<double>(hits) / static_cast<double>(dataset.size());
}

TrainResult train_classifier(const GridDataset& train, const GridDataset& holdout,
                             const ClassifierConfig& config, const TrainConfig& tconfig) {
    if (train.empty()) throw ValueError("training dataset is empty");
    validate_config(config);
    if (tconfig.epochs < 0) throw ValueError("epoch count must be nonnegative");
    if (!(tconfig.learning_rate > 0.0) || !std::isfinite(tconfig.learning_rate))
        throw ValueError("learning rate must be positive and finite");
    if (tconfig.batch_size < 1) throw ValueError("batch size must be positive");

    std::set<int> labels;
    for (const LabeledGrid& s : train) {
        if (s.label < 0 || s.label >= config.class_count())
            throw ValueError("training label " + std::to_string(s.label) + " out of range [0, " +
                             std::to_string(config.class_count()) + ")");
        labels.insert(s.label);
    }
    if (labels.size() < 2) throw ValueError("training dataset needs at least two distinct labels");

    TrainResult result;
    result.params = init_classifier(config, tconfig.seed);
    std::mt19937_64 shuffle_rng(tconfig.seed);

    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    const auto apply = [&](std::vector<DenseLayer>& dst, const std::vector<DenseLayer>& grad,
                           double scale) {
        for (std::size_t l = 0; l < dst.size(); ++l) {
            for (std::size_t k = 0; k < dst[l].weight.size(); ++k)
                dst[l].weight[k] -= scale * grad[l].weight[k];
            for (std::size_t k = 0; k < dst[l].bias.size(); ++k)
                dst[l].bias[k] -= scale * grad[l].bias[k];
        }
    };
    const auto accumulate = [](std::vector<DenseLayer>& dst, const std::vector<DenseLayer>& src) {
        for (std::size_t l = 0; l < dst.size(); ++l) {
            for (std::size_t k = 0; k < dst[l].weight.size(); ++k)
                dst[l].weight[k] += src[l].weight[k];
            for (std::size_t k = 0; k < dst[l].bias.size(); ++k)
                dst[l].bias[k] += src[l].bias[k];
        }
    };

    for (int epoch = 0; epoch < tconfig.epochs; ++epoch) {
        shuffle_deterministic(order, shuffle_rng);
        double loss_sum = 0.0;
        std::size_t pos = 0;
        while (pos < order.size()) {
            const std::size_t batch_end =
                std::min(order.size(), pos + static_cast<std::size_t>(tconfig.batch_size));
            std::vector<DenseLayer> gsum_point = zero_like(result.params.pointwise);
            std::vector<DenseLayer> gsum_head = zero_like(result.params.head);
            for (std::size_t b = pos; b < batch_end; ++b) {
                const LabeledGrid& s = train[order[b]];
                ClassifierGradients g = classifier_backward(result.params, s.points, s.label);
                loss_sum += g.loss;
                accumulate(gsum_point, g.pointwise);
                accumulate(gsum_head, g.head);
            }
            const double scale = tconfig.learning_rate / static_cast<double>(batch_end - pos);
            apply(result.params.pointwise, gsum_point, scale);
            apply(result.params.head, gsum_head, scale);
            pos = batch_end;
        }
        EpochStats stats;
        stats.mean_loss = loss_sum / static_cast<double>(train.size());
        if (!holdout.empty()) stats.holdout_accuracy = evaluate_accuracy(result.params, holdout);
        result.history.push_back(stats);
    }
    return result;
}

} // namespace warpkit
