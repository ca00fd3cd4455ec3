#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "hydronet/nn_layers.hpp"

namespace hydronet {

// ---- Layer specifications ----

struct InputSpec {
    std::size_t channels = 0;
    std::size_t rank = 3;  // 3: [B,T,C] sequence, 2: [B,C] feature vector
};
struct Conv1DSpec {
    int filters = 1;
    int kernel_size = 1;
    int dilation = 1;
    Activation activation = Activation::linear;
    // always causal
};
struct BatchNormSpec {
    double momentum = 0.99;
    double epsilon = 1e-5;
};
struct LstmSpec {
    int units = 1;
    bool return_sequences = false;
};
struct DenseSpec {
    int units = 1;
    Activation activation = Activation::linear;
};
struct ConcatSpec {};
struct LastStepSpec {};  // [B,T,C] -> [B,C], final time step

using LayerSpec =
    std::variant<InputSpec, Conv1DSpec, BatchNormSpec, LstmSpec, DenseSpec, ConcatSpec, LastStepSpec>;

struct Node {
    std::string name;
    LayerSpec spec;
    std::vector<std::string> inputs;
};

// Rounds through float so in-memory weights always equal their 32-bit file
// representation; serialization is then lossless in both directions.
inline double to_file_precision(double v) { return static_cast<double>(static_cast<float>(v)); }

// A DAG of layers with a flat weight store. Nodes are appended in topological
// order by construction: every input must already be defined, so cycles are
// impossible.
class Network {
public:
    void add_input(const std::string& name, std::size_t channels, std::size_t rank = 3) {
        check_new_name(name);
        nodes_.push_back({name, InputSpec{channels, rank}, {}});
        input_names_.push_back(name);
    }

    void add(const std::string& name, LayerSpec spec, std::vector<std::string> inputs) {
        if (inputs.empty()) throw Error("Network: layer '" + name + "' needs at least one input");
        if (!std::holds_alternative<ConcatSpec>(spec) && inputs.size() != 1)
            throw Error("Network: layer '" + name + "' takes exactly one input");
        for (const auto& in : inputs)
            if (node_index_.find(in) == node_index_.end())
                throw Error("Network: layer '" + name + "' references undefined input '" + in + "'");
        check_new_name(name);
        nodes_.push_back({name, std::move(spec), std::move(inputs)});
        allocate_weights(nodes_.back());
    }

    void set_output(const std::string& name) {
        if (node_index_.find(name) == node_index_.end())
            throw Error("Network: unknown output node '" + name + "'");
        output_name_ = name;
    }

    const std::string& output_name() const { return output_name_; }
    const std::vector<std::string>& input_names() const { return input_names_; }
    const std::vector<Node>& nodes() const { return nodes_; }

    std::map<std::string, Tensor>& weights() { return weights_; }
    const std::map<std::string, Tensor>& weights() const { return weights_; }

    bool is_trainable(const std::string& weight_name) const {
        return weight_name.find(".running_") == std::string::npos;
    }

    // Glorot-uniform initialization, deterministic per seed, stored at file
    // precision.
    void init_weights(std::uint64_t seed) {
        Rng rng(derive_seed(seed, 0x6e6e));
        for (auto& [name, w] : weights_) {
            if (name.ends_with(".b") || name.ends_with(".beta") || name.ends_with(".running_mean")) {
                for (auto& v : w.data) v = 0.0;
            } else if (name.ends_with(".gamma") || name.ends_with(".running_var")) {
                for (auto& v : w.data) v = 1.0;
            } else {
                const std::size_t fan_in = w.rank() >= 2 ? w.numel() / w.shape.back() : w.numel();
                const std::size_t fan_out = w.shape.back();
                const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
                for (auto& v : w.data) v = to_file_precision(rng.uniform(-limit, limit));
            }
        }
    }

    struct ForwardState {
        std::map<std::string, Tensor> outputs;
        std::map<std::string, LstmCache> lstm;
        std::map<std::string, BatchNormCache> batchnorm;
    };

    // Evaluates the graph in topological order. The state holds every node
    // output (and layer caches) for backward().
    Tensor forward(const std::map<std::string, Tensor>& inputs, ForwardState& state,
                   bool training = false) {
        if (output_name_.empty()) throw Error("Network: output node not set");
        state.outputs.clear();
        state.lstm.clear();
        state.batchnorm.clear();
        for (const auto& node : nodes_) {
            if (std::holds_alternative<InputSpec>(node.spec)) {
                const auto it = inputs.find(node.name);
                if (it == inputs.end()) throw Error("Network: missing input '" + node.name + "'");
                const auto& spec = std::get<InputSpec>(node.spec);
                if (it->second.rank() != spec.rank || it->second.shape.back() != spec.channels)
                    throw Error("Network: input '" + node.name + "' has shape " +
                                it->second.shape_string() + ", expected rank " +
                                std::to_string(spec.rank) + " with " + std::to_string(spec.channels) +
                                " channels");
                state.outputs[node.name] = it->second;
                continue;
            }
            state.outputs[node.name] = eval_node(node, state, training);
        }
        return state.outputs.at(output_name_);
    }

    Tensor forward(const std::map<std::string, Tensor>& inputs, bool training = false) {
        ForwardState state;
        return forward(inputs, state, training);
    }

    // Inference entry point. Evaluation mode never mutates weights or running
    // statistics, so this is safe on a shared const model.
    Tensor predict(const std::map<std::string, Tensor>& inputs) const {
        return const_cast<Network*>(this)->forward(inputs, false);
    }

    struct Gradients {
        std::map<std::string, Tensor> weights;
        std::map<std::string, Tensor> inputs;
    };

    // Reverse topological sweep; d_output is the loss gradient at the output
    // node. Returns gradients for every trainable weight and graph input.
    Gradients backward(const ForwardState& state, const Tensor& d_output) {
        Gradients grads;
        std::map<std::string, Tensor> d_out;
        d_out[output_name_] = d_output;
        auto accumulate = [](Tensor& dst, const Tensor& src) {
            for (std::size_t i = 0; i < dst.numel(); ++i) dst.data[i] += src.data[i];
        };
        auto take = [&](const std::string& name) -> Tensor {
            auto it = d_out.find(name);
            if (it != d_out.end()) return it->second;
            return Tensor(state.outputs.at(name).shape);  // zeros: no consumer gradient
        };
        auto add_to = [&](const std::string& name, Tensor&& t) {
            auto it = d_out.find(name);
            if (it == d_out.end()) d_out.emplace(name, std::move(t));
            else accumulate(it->second, t);
        };

        for (std::size_t i = nodes_.size(); i-- > 0;) {
            const Node& node = nodes_[i];
            if (std::holds_alternative<InputSpec>(node.spec)) {
                grads.inputs[node.name] = take(node.name);
                continue;
            }
            const Tensor dy = take(node.name);
            backprop_node(node, state, dy, grads, add_to);
        }
        for (const auto& [name, w] : weights_)
            if (is_trainable(name) && grads.weights.find(name) == grads.weights.end())
                grads.weights.emplace(name, Tensor(w.shape));
        return grads;
    }

    // Stable structural fingerprint covering topology, specs, and weight
    // shapes; weight files must match it to load.
    std::uint64_t fingerprint() const {
        std::string desc;
        for (const auto& node : nodes_) {
            desc += node.name + "|" + spec_string(node.spec) + "|";
            for (const auto& in : node.inputs) desc += in + ",";
            desc += ";";
        }
        for (const auto& [name, w] : weights_) desc += name + w.shape_string();
        desc += "->" + output_name_;
        std::uint64_t h = 1469598103934665603ULL;
        for (const unsigned char ch : desc) {
            h ^= ch;
            h *= 1099511628211ULL;
        }
        return h;
    }

private:
    void check_new_name(const std::string& name) {
        if (name.empty()) throw Error("Network: empty layer name");
        if (name.find('.') != std::string::npos || name.find('|') != std::string::npos)
            throw Error("Network: layer name '" + name + "' contains a reserved character");
        if (!node_index_.emplace(name, nodes_.size()).second)
            throw Error("Network: duplicate layer name '" + name + "'");
    }

    static std::string spec_string(const LayerSpec& spec) {
        if (const auto* s = std::get_if<InputSpec>(&spec))
            return "input(" + std::to_string(s->channels) + "," + std::to_string(s->rank) + ")";
        if (const auto* s = std::get_if<Conv1DSpec>(&spec))
            return "conv1d(" + std::to_string(s->filters) + "," + std::to_string(s->kernel_size) +
                   "," + std::to_string(s->dilation) + "," + to_string(s->activation) + ")";
        if (const auto* s = std::get_if<BatchNormSpec>(&spec))
            return "batchnorm(" + format_double(s->momentum) + "," + format_double(s->epsilon) + ")";
        if (const auto* s = std::get_if<LstmSpec>(&spec))
            return "lstm(" + std::to_string(s->units) + "," + (s->return_sequences ? "seq" : "last") + ")";
        if (const auto* s = std::get_if<DenseSpec>(&spec))
            return "dense(" + std::to_string(s->units) + "," + to_string(s->activation) + ")";
        if (std::holds_alternative<ConcatSpec>(spec)) return "concat";
        return "laststep";
    }

    std::size_t out_channels_of(const std::string& name) const {
        const Node& node = nodes_[node_index_.at(name)];
        if (const auto* s = std::get_if<InputSpec>(&node.spec)) return s->channels;
        if (const auto* s = std::get_if<Conv1DSpec>(&node.spec)) return static_cast<std::size_t>(s->filters);
        if (const auto* s = std::get_if<LstmSpec>(&node.spec)) return static_cast<std::size_t>(s->units);
        if (const auto* s = std::get_if<DenseSpec>(&node.spec)) return static_cast<std::size_t>(s->units);
        if (std::holds_alternative<BatchNormSpec>(node.spec) ||
            std::holds_alternative<LastStepSpec>(node.spec))
            return out_channels_of(node.inputs[0]);
        std::size_t total = 0;  // concat
        for (const auto& in : node.inputs) total += out_channels_of(in);
        return total;
    }

    void allocate_weights(const Node& node) {
        const std::size_t in_ch = out_channels_of(node.inputs[0]);
        if (const auto* s = std::get_if<Conv1DSpec>(&node.spec)) {
            if (s->filters < 1 || s->kernel_size < 1 || s->dilation < 1)
                throw Error("Network: conv1d '" + node.name + "' has invalid spec");
            weights_.emplace(node.name + ".W",
                             Tensor({static_cast<std::size_t>(s->kernel_size), in_ch,
                                     static_cast<std::size_t>(s->filters)}));
            weights_.emplace(node.name + ".b", Tensor({static_cast<std::size_t>(s->filters)}));
        } else if (const auto* s = std::get_if<LstmSpec>(&node.spec)) {
            if (s->units < 1) throw Error("Network: lstm '" + node.name + "' has invalid spec");
            const auto u = static_cast<std::size_t>(s->units);
            weights_.emplace(node.name + ".Wx", Tensor({in_ch, 4 * u}));
            weights_.emplace(node.name + ".Wh", Tensor({u, 4 * u}));
            weights_.emplace(node.name + ".b", Tensor({4 * u}));
        } else if (const auto* s = std::get_if<DenseSpec>(&node.spec)) {
            if (s->units < 1) throw Error("Network: dense '" + node.name + "' has invalid spec");
            weights_.emplace(node.name + ".W", Tensor({in_ch, static_cast<std::size_t>(s->units)}));
            weights_.emplace(node.name + ".b", Tensor({static_cast<std::size_t>(s->units)}));
        } else if (std::get_if<BatchNormSpec>(&node.spec)) {
            weights_.emplace(node.name + ".gamma", Tensor({in_ch}));
            weights_.emplace(node.name + ".beta", Tensor({in_ch}));
            weights_.emplace(node.name + ".running_mean", Tensor({in_ch}));
            weights_.emplace(node.name + ".running_var", Tensor({in_ch}));
        }
    }

    Tensor eval_node(const Node& node, ForwardState& state, bool training) {
        const Tensor& x = state.outputs.at(node.inputs[0]);
        if (const auto* s = std::get_if<Conv1DSpec>(&node.spec)) {
            return conv1d_forward(x, weights_.at(node.name + ".W"), weights_.at(node.name + ".b"),
                                  s->dilation, s->activation);
        }
        if (const auto* s = std::get_if<LstmSpec>(&node.spec)) {
            return lstm_forward(x, weights_.at(node.name + ".Wx"), weights_.at(node.name + ".Wh"),
                                weights_.at(node.name + ".b"), s->return_sequences,
                                &state.lstm[node.name]);
        }
        if (const auto* s = std::get_if<DenseSpec>(&node.spec)) {
            return dense_forward(x, weights_.at(node.name + ".W"), weights_.at(node.name + ".b"),
                                 s->activation);
        }
        if (const auto* s = std::get_if<BatchNormSpec>(&node.spec)) {
            return batchnorm_forward(x, weights_.at(node.name + ".gamma"),
                                     weights_.at(node.name + ".beta"),
                                     weights_.at(node.name + ".running_mean"),
                                     weights_.at(node.name + ".running_var"), s->momentum, s->epsilon,
                                     training, &state.batchnorm[node.name]);
        }
        if (std::holds_alternative<LastStepSpec>(node.spec)) {
            if (x.rank() != 3) throw Error("Network: laststep '" + node.name + "' needs rank-3 input");
            const std::size_t B = x.shape[0], T = x.shape[1], C = x.shape[2];
            Tensor y({B, C});
            for (std::size_t b = 0; b < B; ++b)
                for (std::size_t c = 0; c < C; ++c) y.data[b * C + c] = x.data[(b * T + T - 1) * C + c];
            return y;
        }
        // concat along the trailing (channel) axis
        std::vector<const Tensor*> parts;
        for (const auto& in : node.inputs) parts.push_back(&state.outputs.at(in));
        const std::size_t rank = parts[0]->rank();
        std::size_t total_c = 0;
        for (const auto* p : parts) {
            if (p->rank() != rank || p->shape[0] != parts[0]->shape[0] ||
                (rank == 3 && p->shape[1] != parts[0]->shape[1]))
                throw Error("Network: concat '" + node.name + "' input shapes incompatible");
            total_c += p->shape.back();
        }
        std::vector<std::size_t> shape = parts[0]->shape;
        shape.back() = total_c;
        Tensor y(shape);
        const std::size_t rows = y.numel() / total_c;
        for (std::size_t r = 0; r < rows; ++r) {
            std::size_t offset = 0;
            for (const auto* p : parts) {
                const std::size_t c = p->shape.back();
                for (std::size_t j = 0; j < c; ++j) y.data[r * total_c + offset + j] = p->data[r * c + j];
                offset += c;
            }
        }
        return y;
    }

    template <typename AddTo>
    void backprop_node(const Node& node, const ForwardState& state, const Tensor& dy,
                       Gradients& grads, AddTo&& add_to) {
        const Tensor& x = state.outputs.at(node.inputs[0]);
        const Tensor& y = state.outputs.at(node.name);
        if (const auto* s = std::get_if<Conv1DSpec>(&node.spec)) {
            auto g = conv1d_backward(x, weights_.at(node.name + ".W"), s->dilation, s->activation, y, dy);
            grads.weights[node.name + ".W"] = std::move(g.dw);
            grads.weights[node.name + ".b"] = std::move(g.db);
            add_to(node.inputs[0], std::move(g.dx));
            return;
        }
        if (const auto* s = std::get_if<LstmSpec>(&node.spec)) {
            auto g = lstm_backward(x, weights_.at(node.name + ".Wx"), weights_.at(node.name + ".Wh"),
                                   s->return_sequences, state.lstm.at(node.name), dy);
            grads.weights[node.name + ".Wx"] = std::move(g.dwx);
            grads.weights[node.name + ".Wh"] = std::move(g.dwh);
            grads.weights[node.name + ".b"] = std::move(g.db);
            add_to(node.inputs[0], std::move(g.dx));
            return;
        }
        if (const auto* s = std::get_if<DenseSpec>(&node.spec)) {
            auto g = dense_backward(x, weights_.at(node.name + ".W"), s->activation, y, dy);
            grads.weights[node.name + ".W"] = std::move(g.dw);
            grads.weights[node.name + ".b"] = std::move(g.db);
            add_to(node.inputs[0], std::move(g.dx));
            return;
        }
        if (const auto* s = std::get_if<BatchNormSpec>(&node.spec)) {
            auto g = batchnorm_backward(x, weights_.at(node.name + ".gamma"), s->epsilon,
                                        state.batchnorm.at(node.name), dy);
            grads.weights[node.name + ".gamma"] = std::move(g.dgamma);
            grads.weights[node.name + ".beta"] = std::move(g.dbeta);
            add_to(node.inputs[0], std::move(g.dx));
            return;
        }
        if (std::holds_alternative<LastStepSpec>(node.spec)) {
            const std::size_t B = x.shape[0], T = x.shape[1], C = x.shape[2];
            Tensor dx(x.shape);
            for (std::size_t b = 0; b < B; ++b)
                for (std::size_t c = 0; c < C; ++c) dx.data[(b * T + T - 1) * C + c] = dy.data[b * C + c];
            add_to(node.inputs[0], std::move(dx));
            return;
        }
        // concat: split dy by original channel extents
        const std::size_t total_c = y.shape.back();
        const std::size_t rows = y.numel() / total_c;
        std::size_t offset = 0;
        for (const auto& in : node.inputs) {
            const Tensor& part = state.outputs.at(in);
            const std::size_t c = part.shape.back();
            Tensor dpart(part.shape);
            for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t j = 0; j < c; ++j) dpart.data[r * c + j] = dy.data[r * total_c + offset + j];
            offset += c;
            add_to(in, std::move(dpart));
        }
    }

    std::vector<Node> nodes_;
    std::map<std::string, std::size_t> node_index_;
    std::vector<std::string> input_names_;
    std::map<std::string, Tensor> weights_;
    std::string output_name_;
};

}  // namespace hydronet
