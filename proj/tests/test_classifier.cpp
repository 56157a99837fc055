#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "warpkit/classifier.hpp"
#include "warpkit/errors.hpp"
#include "warpkit/rng.hpp"

using namespace warpkit;

namespace {

ControlGrid random_grid(int rows, int cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ControlGrid g = make_regular_grid(rows, cols);
    for (Point2& p : g.points()) {
        p.x += uniform_double(rng, -0.3, 0.3);
        p.y += uniform_double(rng, -0.3, 0.3);
    }
    return g;
}

ClassifierParams zero_params(const ClassifierConfig& config) {
    ClassifierParams p = init_classifier(config, 0);
    for (DenseLayer& l : p.pointwise) {
        std::fill(l.weight.begin(), l.weight.end(), 0.0);
        std::fill(l.bias.begin(), l.bias.end(), 0.0);
    }
    for (DenseLayer& l : p.head) {
        std::fill(l.weight.begin(), l.weight.end(), 0.0);
        std::fill(l.bias.begin(), l.bias.end(), 0.0);
    }
    return p;
}

ClassifierConfig tiny_config(int global_dim = 0) {
    ClassifierConfig c;
    c.pointwise_dims = {5, 7};
    c.head_dims = {6, 4};
    c.global_dim = global_dim;
    return c;
}

// flattened view of every trainable value, for inspection and perturbation
std::vector<double*> parameter_slots(ClassifierParams& p) {
    std::vector<double*> slots;
    for (DenseLayer& l : p.pointwise) {
        for (double& w : l.weight) slots.push_back(&w);
        for (double& b : l.bias) slots.push_back(&b);
    }
    for (DenseLayer& l : p.head) {
        for (double& w : l.weight) slots.push_back(&w);
        for (double& b : l.bias) slots.push_back(&b);
    }
    return slots;
}

std::vector<double> gradient_slots(const ClassifierGradients& g) {
    std::vector<double> flat;
    for (const DenseLayer& l : g.pointwise) {
        flat.insert(flat.end(), l.weight.begin(), l.weight.end());
        flat.insert(flat.end(), l.bias.begin(), l.bias.end());
    }
    for (const DenseLayer& l : g.head) {
        flat.insert(flat.end(), l.weight.begin(), l.weight.end());
        flat.insert(flat.end(), l.bias.begin(), l.bias.end());
    }
    return flat;
}

bool params_equal(const ClassifierParams& a, const ClassifierParams& b) {
    if (a.pointwise.size() != b.pointwise.size() || a.head.size() != b.head.size()) return false;
    for (std::size_t l = 0; l < a.pointwise.size(); ++l)
        if (a.pointwise[l].weight != b.pointwise[l].weight ||
            a.pointwise[l].bias != b.pointwise[l].bias)
            return false;
    for (std::size_t l = 0; l < a.head.size(); ++l)
        if (a.head[l].weight != b.head[l].weight || a.head[l].bias != b.head[l].bias)
            return false;
    return true;
}

} // namespace

TEST_CASE("the default configuration counts 593670 trainable values") {
    const ClassifierParams p = init_classifier(ClassifierConfig{}, 1);
    // shared stack 2->256->256->512, head 512->512->256->6
    CHECK(count_parameters(p) == 593670u);
}

TEST_CASE("labels validate their entries") {
    CHECK_THROWS_AS(TaskLabel(std::vector<double>{}), DimensionError);
    CHECK_THROWS_AS(TaskLabel({0.5, 0.6}), ValueError);          // sums past 1
    CHECK_THROWS_AS(TaskLabel({1.5, -0.5}), ValueError);         // negative entry
    const TaskLabel ok({0.25, 0.25, 0.5});
    CHECK(ok.size() == 3);
    CHECK(ok[2] == 0.5);
}

TEST_CASE("an all-zero network is indifferent") {
    const ClassifierParams p = zero_params(ClassifierConfig{});
    const ForwardResult r = classifier_forward(p, random_grid(4, 4, 1));
    for (double logit : r.logits) CHECK(logit == 0.0);
    for (std::size_t i = 0; i < r.label.size(); ++i) CHECK(r.label[i] == 1.0 / 6.0);
}

TEST_CASE("point order never changes the output") {
    const ClassifierParams p = init_classifier(ClassifierConfig{}, 7);
    const ControlGrid g = random_grid(4, 4, 2);
    const ForwardResult base = classifier_forward(p, g);

    std::mt19937_64 rng(3);
    std::vector<Point2> pts = g.points();
    for (int trial = 0; trial < 100; ++trial) {
        shuffle_deterministic(pts, rng);
        const ForwardResult r = classifier_forward(p, ControlGrid(4, 4, pts));
        for (std::size_t k = 0; k < base.logits.size(); ++k)
            CHECK(std::fabs(r.logits[k] - base.logits[k]) <= 1e-12);
    }
}

TEST_CASE("the forward pass matches a straight-line re-implementation") {
    SUBCASE("tiny configuration") {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const ClassifierParams p = init_classifier(tiny_config(), seed);
            const ControlGrid g = random_grid(3, 3, seed + 50);
            const ForwardResult r = classifier_forward(p, g);
            const std::vector<double> want = oracle::reference_logits(p, g.points(), nullptr);
            REQUIRE(r.logits.size() == want.size());
            for (std::size_t k = 0; k < want.size(); ++k)
                CHECK(std::fabs(r.logits[k] - want[k]) <= 1e-10);
        }
    }
    SUBCASE("default configuration") {
        const ClassifierParams p = init_classifier(ClassifierConfig{}, 99);
        const ControlGrid g = random_grid(4, 4, 77);
        const ForwardResult r = classifier_forward(p, g);
        const std::vector<double> want = oracle::reference_logits(p, g.points(), nullptr);
        for (std::size_t k = 0; k < want.size(); ++k)
            CHECK(std::fabs(r.logits[k] - want[k]) <= 1e-10);
    }
    SUBCASE("with a global feature") {
        const ClassifierParams p = init_classifier(tiny_config(3), 4);
        const ControlGrid g = random_grid(3, 4, 8);
        const std::vector<double> global_feat = {0.3, -1.2, 0.8};
        const ForwardResult r = classifier_forward(p, g, &global_feat);
        const std::vector<double> want = oracle::reference_logits(p, g.points(), &global_feat);
        for (std::size_t k = 0; k < want.size(); ++k)
            CHECK(std::fabs(r.logits[k] - want[k]) <= 1e-10);
    }
}

TEST_CASE("the global feature is required exactly when configured") {
    const ClassifierParams with = init_classifier(tiny_config(3), 1);
    const ClassifierParams without = init_classifier(tiny_config(0), 1);
    const ControlGrid g = random_grid(3, 3, 1);
    const std::vector<double> feat3 = {1.0, 2.0, 3.0};
    const std::vector<double> feat2 = {1.0, 2.0};
    CHECK_THROWS_AS(classifier_forward(with, g), DimensionError);
    CHECK_THROWS_AS(classifier_forward(with, g, &feat2), DimensionError);
    CHECK_THROWS_AS(classifier_forward(without, g, &feat3), DimensionError);
    classifier_forward(with, g, &feat3); // fine
}

TEST_CASE("zero-network gradients have the closed-form output bias") {
    const ClassifierParams p = zero_params(ClassifierConfig{});
    const int label = 3;
    const ClassifierGradients g = classifier_backward(p, random_grid(4, 4, 5), label);
    const std::vector<double>& bias_grad = g.head.back().bias;
    REQUIRE(bias_grad.size() == 6);
    for (int k = 0; k < 6; ++k) {
        const double want = 1.0 / 6.0 - (k == label ? 1.0 : 0.0);
        CHECK(bias_grad[static_cast<std::size_t>(k)] == doctest::Approx(want).epsilon(1e-14));
    }
    CHECK(g.loss == doctest::Approx(std::log(6.0)).epsilon(1e-13));
}

TEST_CASE("analytic gradients match central finite differences everywhere") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const int global_dim = seed % 2 == 0 ? 3 : 0;
        ClassifierParams p = init_classifier(tiny_config(global_dim), seed);
        const ControlGrid g = random_grid(3, 3, seed + 20);
        const std::vector<double> feat = {0.4, -0.7, 1.1};
        const std::vector<double>* global_feat = global_dim > 0 ? &feat : nullptr;
        const int label = static_cast<int>(seed % 4);

        const ClassifierGradients grads = classifier_backward(p, g, label, global_feat);
        const std::vector<double> analytic = gradient_slots(grads);
        std::vector<double*> slots = parameter_slots(p);
        REQUIRE(analytic.size() == slots.size());

        const double h = 1e-5;
        double worst = 0.0;
        for (std::size_t i = 0; i < slots.size(); ++i) {
            const double saved = *slots[i];
            *slots[i] = saved + h;
            const double up = classifier_backward(p, g, label, global_feat).loss;
            *slots[i] = saved - h;
            const double down = classifier_backward(p, g, label, global_feat).loss;
            *slots[i] = saved;
            const double fd = (up - down) / (2.0 * h);
            const double err =
                std::fabs(analytic[i] - fd) / std::max({1.0, std::fabs(analytic[i]), std::fabs(fd)});
            worst = std::max(worst, err);
        }
        CHECK(worst <= 1e-4);
    }
}

TEST_CASE("duplicated points route gradients through the first copies only") {
    const ClassifierParams p = init_classifier(ClassifierConfig{}, 13);
    const ControlGrid g = random_grid(3, 4, 9);

    // same point set twice: rows 0-2 repeated as rows 3-5
    std::vector<Point2> doubled = g.points();
    doubled.insert(doubled.end(), g.points().begin(), g.points().end());
    const ControlGrid dup(6, 4, doubled);

    const ClassifierGradients a = classifier_backward(p, g, 2);
    const ClassifierGradients b = classifier_backward(p, dup, 2);
    // ties go to the lowest index, i.e. the first copy of each point, so the
    // parameter gradients are identical to the single-copy lattice
    CHECK(gradient_slots(a) == gradient_slots(b));
}

TEST_CASE("prediction takes the most probable class with ties to the lowest index") {
    const ClassifierParams p = zero_params(ClassifierConfig{});
    CHECK(predict_task(p, random_grid(3, 3, 1)) == 0); // uniform: tie

    ClassifierParams biased = p;
    biased.head.back().bias[4] = 3.0;
    CHECK(predict_task(biased, random_grid(3, 3, 1)) == 4);

    // adding one constant to every logit must not change the prediction
    ClassifierParams shifted = biased;
    for (double& b : shifted.head.back().bias) b += 7.3;
    CHECK(predict_task(shifted, random_grid(3, 3, 1)) == 4);
}

TEST_CASE("training is deterministic and zero epochs return the initialization") {
    GridDataset data;
    for (std::uint64_t i = 0; i < 12; ++i) {
        LabeledGrid s;
        s.points = random_grid(3, 3, i + 100);
        s.label = static_cast<int>(i % 2);
        data.push_back(s);
    }
    TrainConfig tc;
    tc.epochs = 3;
    tc.learning_rate = 0.05;
    tc.batch_size = 4;
    tc.seed = 21;

    const ClassifierConfig config = tiny_config();
    const TrainResult a = train_classifier(data, {}, config, tc);
    const TrainResult b = train_classifier(data, {}, config, tc);
    CHECK(params_equal(a.params, b.params));
    CHECK(a.history.size() == 3);
    CHECK(!a.history[0].holdout_accuracy.has_value());

    TrainConfig none = tc;
    none.epochs = 0;
    const TrainResult init_only = train_classifier(data, {}, config, none);
    CHECK(params_equal(init_only.params, init_classifier(config, tc.seed)));
}

TEST_CASE("a linearly separable toy problem trains to full holdout accuracy") {
    // class 0 lattices sit left of the axis, class 1 lattices right of it
    GridDataset train, holdout;
    for (std::uint64_t i = 0; i < 40; ++i) {
        LabeledGrid s;
        s.label = static_cast<int>(i % 2);
        ControlGrid g = random_grid(3, 3, i + 500);
        const double shift = s.label == 0 ? -0.6 : 0.6;
        for (Point2& p : g.points()) p.x = p.x * 0.25 + shift;
        s.points = g;
        (i < 30 ? train : holdout).push_back(s);
    }
    ClassifierConfig config = tiny_config();
    config.head_dims.back() = 2;
    TrainConfig tc;
    tc.epochs = 50;
    tc.learning_rate = 0.1;
    tc.batch_size = 8;
    tc.seed = 5;
    const TrainResult r = train_classifier(train, holdout, config, tc);
    REQUIRE(!r.history.empty());
    CHECK(r.history.back().holdout_accuracy.has_value());
    CHECK(*r.history.back().holdout_accuracy == 1.0);
    CHECK(r.history.back().mean_loss <= r.history.front().mean_loss);
}

TEST_CASE("training rejects unusable datasets") {
    const ClassifierConfig config = tiny_config();
    CHECK_THROWS_AS(train_classifier({}, {}, config, TrainConfig{}), ValueError);

    GridDataset single_class;
    for (std::uint64_t i = 0; i < 4; ++i) {
        LabeledGrid s;
        s.points = random_grid(3, 3, i);
        s.label = 1;
        single_class.push_back(s);
    }
    CHECK_THROWS_AS(train_classifier(single_class, {}, config, TrainConfig{}), ValueError);

    GridDataset bad_label = single_class;
    bad_label[0].label = 9; // past the class count
    CHECK_THROWS_AS(train_classifier(bad_label, {}, config, TrainConfig{}), ValueError);

    TrainConfig bad;
    bad.learning_rate = 0.0;
    GridDataset two = single_class;
    two[0].label = 0;
    CHECK_THROWS_AS(train_classifier(two, {}, config, bad), ValueError);
}
