#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "hydronet/nn_graph.hpp"

namespace hydronet {

// Mean squared error over all elements; gradient 2(pred - target)/N.
inline std::pair<double, Tensor> mse_loss(const Tensor& pred, const Tensor& target) {
    if (!pred.same_shape(target))
        throw Error("mse_loss: shape mismatch " + pred.shape_string() + " vs " + target.shape_string());
    const std::size_t n = pred.numel();
    if (n == 0) throw Error("mse_loss: empty tensors");
    Tensor grad(pred.shape);
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = pred.data[i] - target.data[i];
        loss += e * e;
        grad.data[i] = 2.0 * e / static_cast<double>(n);
    }
    return {loss / static_cast<double>(n), std::move(grad)};
}

struct AdamState {
    std::map<std::string, Tensor> m;
    std::map<std::string, Tensor> v;
    long timestep = 0;
};

// Standard Adam update with bias correction. Skips the whole step (and
// reports false) when any gradient is non-finite. Updated weights are stored
// at file precision.
inline bool adam_step(std::map<std::string, Tensor>& weights,
                      const std::map<std::string, Tensor>& grads, AdamState& state, double lr,
                      double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8) {
    for (const auto& [name, g] : grads)
        for (const double v : g.data)
            if (!std::isfinite(v)) return false;

    state.timestep += 1;
    const double t = static_cast<double>(state.timestep);
    const double c1 = 1.0 - std::pow(beta1, t);
    const double c2 = 1.0 - std::pow(beta2, t);
    for (const auto& [name, g] : grads) {
        auto wit = weights.find(name);
        if (wit == weights.end()) throw Error("adam_step: unknown weight '" + name + "'");
        Tensor& w = wit->second;
        auto& m = state.m.try_emplace(name, Tensor(w.shape)).first->second;
        auto& v = state.v.try_emplace(name, Tensor(w.shape)).first->second;
        for (std::size_t i = 0; i < w.numel(); ++i) {
            m.data[i] = beta1 * m.data[i] + (1.0 - beta1) * g.data[i];
            v.data[i] = beta2 * v.data[i] + (1.0 - beta2) * g.data[i] * g.data[i];
            const double mhat = m.data[i] / c1;
            const double vhat = v.data[i] / c2;
            w.data[i] = to_file_precision(w.data[i] - lr * mhat / (std::sqrt(vhat) + epsilon));
        }
    }
    return true;
}

struct TrainConfig {
    int epochs = 100;
    int batch_size = 32;
    double learning_rate = 1e-3;
    int early_stop_patience = 10;
    int lr_reduce_patience = 5;
    double lr_reduce_factor = 0.5;
    double min_lr = 1e-5;
    double validation_fraction = 0.2;
    std::uint64_t seed = 0;

    void check() const {
        if (epochs < 1 || batch_size < 1) throw Error("TrainConfig: epochs and batch_size must be >= 1");
        if (lr_reduce_factor <= 0.0 || lr_reduce_factor >= 1.0)
            throw Error("TrainConfig: lr_reduce_factor must be in (0, 1)");
        if (early_stop_patience < 1 || lr_reduce_patience < 1)
            throw Error("TrainConfig: patience values must be >= 1");
        if (validation_fraction <= 0.0 || validation_fraction >= 1.0)
            throw Error("TrainConfig: validation_fraction must be in (0, 1)");
    }
};

struct EpochStats {
    int epoch = 0;
    double train_mse = 0.0;
    double val_mse = 0.0;
    double lr = 0.0;
};

struct History {
    std::vector<EpochStats> epochs;
    int best_epoch = -1;
    double best_val_mse = 0.0;
};

// Named sample-major tensors feeding a multi-input graph; all tensors share
// the leading sample axis.
using NamedData = std::vector<std::pair<std::string, Tensor>>;

namespace detail {

inline std::map<std::string, Tensor> batch_of(const NamedData& data,
                                              const std::vector<std::size_t>& idxs) {
    std::map<std::string, Tensor> out;
    for (const auto& [name, t] : data) out.emplace(name, t.gather_rows(idxs));
    return out;
}

}  // namespace detail

// Mini-batch Adam with chronological-tail validation split, early stopping,
// learning-rate reduction, and best-weight restoration. Bit-reproducible for
// a fixed seed.
inline History train(Network& model, const NamedData& data, const Tensor& targets,
                     const TrainConfig& cfg) {
    cfg.check();
    if (data.empty()) throw Error("train: no input data");
    const std::size_t n_samples = targets.shape[0];
    for (const auto& [name, t] : data)
        if (t.shape[0] != n_samples) throw Error("train: sample count mismatch on input '" + name + "'");
    const auto n_val = static_cast<std::size_t>(std::floor(cfg.validation_fraction *
                                                           static_cast<double>(n_samples)));
    if (n_val == 0 || n_val >= n_samples)
        throw Error("train: validation split leaves an empty set");
    const std::size_t n_train = n_samples - n_val;

    std::vector<std::size_t> val_idx(n_val);
    for (std::size_t i = 0; i < n_val; ++i) val_idx[i] = n_train + i;
    const auto val_inputs = detail::batch_of(data, val_idx);
    const Tensor val_targets = targets.gather_rows(val_idx);

    History history;
    std::map<std::string, Tensor> best_weights = model.weights();
    double best_val = std::numeric_limits<double>::infinity();
    AdamState adam;
    double lr = cfg.learning_rate;
    int stall = 0;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng shuffle_rng(derive_seed(cfg.seed, 0x400 + static_cast<std::uint64_t>(epoch)));
        std::vector<std::size_t> order = shuffle_rng.permutation(n_train);
        double train_sse = 0.0;
        std::size_t train_count = 0;
        for (std::size_t begin = 0; begin < n_train; begin += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end = std::min(n_train, begin + static_cast<std::size_t>(cfg.batch_size));
            const std::vector<std::size_t> idxs(order.begin() + static_cast<std::ptrdiff_t>(begin),
                                                order.begin() + static_cast<std::ptrdiff_t>(end));
            const auto batch_inputs = detail::batch_of(data, idxs);
            const Tensor batch_targets = targets.gather_rows(idxs);
            Network::ForwardState state;
            const Tensor pred = model.forward(batch_inputs, state, true);
            const auto [loss, dloss] = mse_loss(pred, batch_targets);
            if (!std::isfinite(loss))
                throw Error("train: non-finite loss at epoch " + std::to_string(epoch));
            train_sse += loss * static_cast<double>(pred.numel());
            train_count += pred.numel();
            const auto grads = model.backward(state, dloss);
            if (!adam_step(model.weights(), grads.weights, adam, lr))
                throw Error("train: non-finite gradient at epoch " + std::to_string(epoch));
        }

        const Tensor val_pred = model.forward(val_inputs, false);
        const auto [val_mse, unused] = mse_loss(val_pred, val_targets);
        if (!std::isfinite(val_mse))
            throw Error("train: non-finite validation loss at epoch " + std::to_string(epoch));
        history.epochs.push_back({epoch, train_sse / static_cast<double>(train_count), val_mse, lr});

        if (val_mse < best_val) {
            best_val = val_mse;
            best_weights = model.weights();
            history.best_epoch = epoch;
            stall = 0;
        } else {
            ++stall;
            if (stall % cfg.lr_reduce_patience == 0)
                lr = std::max(cfg.min_lr, lr * cfg.lr_reduce_factor);
            if (stall >= cfg.early_stop_patience) break;
        }
    }

    model.weights() = std::move(best_weights);
    history.best_val_mse = best_val;
    return history;
}

// Compares analytic gradients against central finite differences on a
// deterministic sample of weights (at least 20 per layer type when
// available). Returns the max relative error.
inline double grad_check(Network& model, const NamedData& data, const Tensor& targets,
                         double epsilon = 1e-4, std::size_t per_tensor = 12) {
    std::map<std::string, Tensor> inputs;
    for (const auto& [name, t] : data) inputs.emplace(name, t);

    Network::ForwardState state;
    const Tensor pred = model.forward(inputs, state, true);
    const auto [loss0, dloss] = mse_loss(pred, targets);
    const auto grads = model.backward(state, dloss);

    double max_rel = 0.0;
    Rng rng(0xfd17);
    for (auto& [name, w] : model.weights()) {
        if (!model.is_trainable(name)) continue;
        const Tensor& analytic = grads.weights.at(name);
        const std::size_t n = w.numel();
        const std::size_t n_checks = std::min(n, per_tensor);
        for (std::size_t probe = 0; probe < n_checks; ++probe) {
            const std::size_t i = n_checks == n ? probe : rng.uniform_int(n);
            const double saved = w.data[i];
            w.data[i] = saved + epsilon;
            const auto [lp, g1] = mse_loss(model.forward(inputs, true), targets);
            w.data[i] = saved - epsilon;
            const auto [lm, g2] = mse_loss(model.forward(inputs, true), targets);
            w.data[i] = saved;
            const double numeric = (lp - lm) / (2.0 * epsilon);
            // below this both values are central-difference rounding noise
            // (a structurally-zero gradient, e.g. a bias feeding batchnorm)
            if (std::abs(analytic.data[i]) + std::abs(numeric) < 1e-7) continue;
            const double rel = std::abs(analytic.data[i] - numeric) /
                               (std::abs(analytic.data[i]) + std::abs(numeric) + 1e-12);
            if (rel > max_rel) max_rel = rel;
        }
    }
    return max_rel;
}

}  // namespace hydronet
