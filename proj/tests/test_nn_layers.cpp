#include <gtest/gtest.h>

#include <cmath>

#include "hydronet/nn_graph.hpp"
#include "hydronet/nn_train.hpp"

using namespace hydronet;

namespace {

Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng, double scale = 1.0) {
    Tensor t(std::move(shape));
    for (auto& v : t.data) v = scale * rng.normal();
    return t;
}

// Central-difference gradient of mse(model(x), target) w.r.t. one input entry.
double fd_input_grad(Network& net, const std::string& input_name, Tensor x, const Tensor& target,
                     std::size_t idx, double eps = 1e-5) {
    x.data[idx] += eps;
    const auto [lp, g1] = mse_loss(net.forward({{input_name, x}}, true), target);
    x.data[idx] -= 2.0 * eps;
    const auto [lm, g2] = mse_loss(net.forward({{input_name, x}}, true), target);
    return (lp - lm) / (2.0 * eps);
}

}  // namespace

TEST(Conv1d, CurrentTapIdentityKernel) {
    Tensor x({2, 10, 1});
    Rng rng(1);
    for (auto& v : x.data) v = rng.normal();
    Tensor w({3, 1, 1});  // taps [oldest, middle, current]
    w.data = {0.0, 0.0, 1.0};
    Tensor b({1});
    const Tensor y = conv1d_forward(x, w, b, 1, Activation::linear);
    ASSERT_EQ(y.shape, x.shape);
    for (std::size_t i = 0; i < x.numel(); ++i) ASSERT_DOUBLE_EQ(y.data[i], x.data[i]);
}

TEST(Conv1d, CausalityIsBitExact) {
    Rng rng(2);
    Tensor w = random_tensor({3, 2, 4}, rng);
    Tensor b = random_tensor({4}, rng);
    Tensor x = random_tensor({1, 20, 2}, rng);
    const Tensor y = conv1d_forward(x, w, b, 2, Activation::relu);
    Tensor x2 = x;
    const std::size_t T = 13;
    x2.at(0, T, 0) += 3.0;
    x2.at(0, T, 1) -= 1.0;
    const Tensor y2 = conv1d_forward(x2, w, b, 2, Activation::relu);
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t f = 0; f < 4; ++f) ASSERT_EQ(y.at(0, t, f), y2.at(0, t, f));
    bool changed = false;
    for (std::size_t t = T; t < 20; ++t)
        for (std::size_t f = 0; f < 4; ++f) changed |= y.at(0, t, f) != y2.at(0, t, f);
    EXPECT_TRUE(changed);
}

TEST(Conv1d, GradientsMatchFiniteDifferences) {
    for (const int dilation : {1, 2, 4, 8}) {
        Network net;
        net.add_input("x", 3, 3);
        net.add("conv", Conv1DSpec{4, 3, dilation, Activation::tanh_}, {"x"});
        net.add("last", LastStepSpec{}, {"conv"});
        net.add("out", DenseSpec{1, Activation::linear}, {"last"});
        net.set_output("out");
        net.init_weights(17);
        Rng rng(100 + static_cast<std::uint64_t>(dilation));
        const Tensor x = random_tensor({3, 30, 3}, rng);
        const Tensor target = random_tensor({3, 1}, rng);
        EXPECT_LT(grad_check(net, {{"x", x}}, target), 1e-4) << "dilation " << dilation;

        // input gradients against the same oracle
        Network::ForwardState state;
        const Tensor pred = net.forward({{"x", x}}, state, true);
        const auto [loss, dloss] = mse_loss(pred, target);
        const auto grads = net.backward(state, dloss);
        const Tensor& dx = grads.inputs.at("x");
        for (const std::size_t idx : {0ul, 91ul, 180ul, 269ul}) {
            const double numeric = fd_input_grad(net, "x", x, target, idx);
            ASSERT_NEAR(dx.data[idx], numeric,
                        1e-4 * (std::abs(numeric) + std::abs(dx.data[idx]) + 1e-6));
        }
    }
}

TEST(Lstm, AllZeroWeightsGiveZeroOutputs) {
    Tensor x({2, 5, 3});
    Rng rng(4);
    for (auto& v : x.data) v = rng.normal();
    Tensor wx({3, 8}), wh({2, 8}), b({8});
    const Tensor y = lstm_forward(x, wx, wh, b, true, nullptr);
    for (double v : y.data) ASSERT_EQ(v, 0.0);
}

TEST(Lstm, HiddenValuesInsideUnitInterval) {
    Rng rng(5);
    Tensor x = random_tensor({2, 12, 3}, rng, 2.0);
    Tensor wx = random_tensor({3, 16}, rng);
    Tensor wh = random_tensor({4, 16}, rng);
    Tensor b = random_tensor({16}, rng);
    const Tensor y = lstm_forward(x, wx, wh, b, true, nullptr);
    for (double v : y.data) {
        ASSERT_GT(v, -1.0);
        ASSERT_LT(v, 1.0);
    }
}

TEST(Lstm, ReturnSequencesShapeContract) {
    Rng rng(6);
    Tensor x = random_tensor({3, 7, 2}, rng);
    Tensor wx = random_tensor({2, 20}, rng);
    Tensor wh = random_tensor({5, 20}, rng);
    Tensor b({20});
    EXPECT_EQ(lstm_forward(x, wx, wh, b, true, nullptr).shape, (std::vector<std::size_t>{3, 7, 5}));
    EXPECT_EQ(lstm_forward(x, wx, wh, b, false, nullptr).shape, (std::vector<std::size_t>{3, 5}));
}

TEST(Lstm, GradientsMatchFiniteDifferences) {
    for (const bool seq : {false, true}) {
        Network net;
        net.add_input("x", 2, 3);
        net.add("lstm", LstmSpec{4, seq}, {"x"});
        if (seq) {
            net.add("last", LastStepSpec{}, {"lstm"});
            net.add("out", DenseSpec{1, Activation::linear}, {"last"});
        } else {
            net.add("out", DenseSpec{1, Activation::linear}, {"lstm"});
        }
        net.set_output("out");
        net.init_weights(23);
        Rng rng(7);
        const Tensor x = random_tensor({2, 9, 2}, rng);
        const Tensor target = random_tensor({2, 1}, rng);
        EXPECT_LT(grad_check(net, {{"x", x}}, target), 1e-4) << "seq " << seq;
    }
}

TEST(Dense, AffineDefinition) {
    Tensor x({1, 1});
    x.data = {3.0};
    Network net;
    net.add_input("x", 1, 2);
    net.add("out", DenseSpec{1, Activation::linear}, {"x"});
    net.set_output("out");
    net.weights().at("out.W").data = {2.0};
    net.weights().at("out.b").data = {0.5};
    EXPECT_DOUBLE_EQ(net.forward({{"x", x}}).at(0, 0), 6.5);
}

TEST(Concat, ExtentArithmeticAndBackwardSplit) {
    Network net;
    net.add_input("a", 3, 2);
    net.add_input("b", 5, 2);
    net.add("cat", ConcatSpec{}, {"a", "b"});
    net.add("out", DenseSpec{1, Activation::linear}, {"cat"});
    net.set_output("out");
    net.init_weights(3);
    Rng rng(9);
    const Tensor a = random_tensor({4, 3}, rng);
    const Tensor b = random_tensor({4, 5}, rng);
    Network::ForwardState state;
    net.forward({{"a", a}, {"b", b}}, state, true);
    EXPECT_EQ(state.outputs.at("cat").shape, (std::vector<std::size_t>{4, 8}));
    const Tensor target = random_tensor({4, 1}, rng);
    const auto [loss, dloss] = mse_loss(state.outputs.at("out"), target);
    const auto grads = net.backward(state, dloss);
    EXPECT_EQ(grads.inputs.at("a").shape, a.shape);
    EXPECT_EQ(grads.inputs.at("b").shape, b.shape);
    EXPECT_LT(grad_check(net, {{"a", a}, {"b", b}}, target), 1e-6);
}

TEST(BatchNorm, TrainEvalAgreeWhenStatsMatch) {
    Network net;
    net.add_input("x", 3, 3);
    net.add("bn", BatchNormSpec{0.0, 1e-5}, {"x"});  // momentum 0: running = batch
    net.add("last", LastStepSpec{}, {"bn"});
    net.add("out", DenseSpec{2, Activation::linear}, {"last"});
    net.set_output("out");
    net.init_weights(5);
    Rng rng(10);
    const Tensor x = random_tensor({4, 6, 3}, rng);
    const Tensor y_train = net.forward({{"x", x}}, true);  // sets running stats to batch stats
    const Tensor y_eval = net.forward({{"x", x}}, false);
    for (std::size_t i = 0; i < y_train.numel(); ++i)
        ASSERT_NEAR(y_train.data[i], y_eval.data[i], 1e-9);
}

TEST(BatchNorm, InferenceIsPerChannelAffine) {
    Network net;
    net.add_input("x", 2, 3);
    net.add("bn", BatchNormSpec{}, {"x"});
    net.set_output("bn");
    net.init_weights(6);
    net.weights().at("bn.running_mean").data = {1.0, -2.0};
    net.weights().at("bn.running_var").data = {4.0, 0.25};
    net.weights().at("bn.gamma").data = {2.0, 3.0};
    net.weights().at("bn.beta").data = {0.5, -1.0};
    Rng rng(11);
    const Tensor x = random_tensor({2, 4, 2}, rng);
    const Tensor y = net.forward({{"x", x}}, false);
    for (std::size_t i = 0; i < x.numel(); i += 2) {
        EXPECT_NEAR(y.data[i], 2.0 * (x.data[i] - 1.0) / std::sqrt(4.0 + 1e-5) + 0.5, 1e-12);
        EXPECT_NEAR(y.data[i + 1], 3.0 * (x.data[i + 1] + 2.0) / std::sqrt(0.25 + 1e-5) - 1.0, 1e-12);
    }
}

TEST(BatchNorm, GradientsMatchFiniteDifferences) {
    Network net;
    net.add_input("x", 3, 3);
    net.add("conv", Conv1DSpec{4, 2, 1, Activation::linear}, {"x"});
    net.add("bn", BatchNormSpec{}, {"conv"});
    net.add("last", LastStepSpec{}, {"bn"});
    net.add("out", DenseSpec{1, Activation::linear}, {"last"});
    net.set_output("out");
    net.init_weights(8);
    Rng rng(12);
    const Tensor x = random_tensor({5, 8, 3}, rng);
    const Tensor target = random_tensor({5, 1}, rng);
    EXPECT_LT(grad_check(net, {{"x", x}}, target), 1e-4);
}

TEST(Network, MissingInputAndCycleRejected) {
    Network net;
    net.add_input("x", 2, 2);
    EXPECT_THROW(net.add("a", DenseSpec{2, Activation::relu}, {"nope"}), Error);
    net.add("a", DenseSpec{2, Activation::relu}, {"x"});
    EXPECT_THROW(net.add("a", DenseSpec{2, Activation::relu}, {"x"}), Error);  // duplicate
    net.set_output("a");
    EXPECT_THROW(net.forward({}), Error);  // missing input tensor
}

TEST(Network, StackedDilationReceptiveField) {
    // Sequential causal stack, kernel 3, dilations 1,2,4,8: receptive field
    // 1 + (3-1)*15 = 31 samples.
    Network net;
    net.add_input("x", 1, 3);
    std::string prev = "x";
    const int dilations[] = {1, 2, 4, 8};
    for (int i = 0; i < 4; ++i) {
        const std::string name = "conv" + std::to_string(i);
        net.add(name, Conv1DSpec{1, 3, dilations[i], Activation::linear}, {prev});
        prev = name;
    }
    net.set_output(prev);
    net.init_weights(9);
    const std::size_t T = 80;
    Tensor x({1, T, 1});
    Rng rng(13);
    for (auto& v : x.data) v = rng.normal();
    const Tensor y = net.forward({{"x", x}});
    const std::size_t rf = 31;
    const std::size_t t_out = 60;
    {
        Tensor x2 = x;
        x2.at(0, t_out - (rf - 1), 0) += 1.0;  // oldest contributing tap
        const Tensor y2 = net.forward({{"x", x2}});
        EXPECT_NE(y.at(0, t_out, 0), y2.at(0, t_out, 0));
    }
    {
        Tensor x2 = x;
        x2.at(0, t_out - rf, 0) += 1.0;  // one sample older: outside the field
        const Tensor y2 = net.forward({{"x", x2}});
        EXPECT_EQ(y.at(0, t_out, 0), y2.at(0, t_out, 0));
    }
}
