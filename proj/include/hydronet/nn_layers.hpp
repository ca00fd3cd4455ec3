#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hydronet/tensor.hpp"

namespace hydronet {

enum class Activation { linear, relu, tanh_, sigmoid };

inline Activation activation_from_string(const std::string& s) {
    if (s == "linear") return Activation::linear;
    if (s == "relu") return Activation::relu;
    if (s == "tanh") return Activation::tanh_;
    if (s == "sigmoid") return Activation::sigmoid;
    throw Error("unknown activation '" + s + "'");
}

inline const char* to_string(Activation a) {
    switch (a) {
        case Activation::linear: return "linear";
        case Activation::relu: return "relu";
        case Activation::tanh_: return "tanh";
        default: return "sigmoid";
    }
}

inline double activate(Activation a, double x) {
    switch (a) {
        case Activation::linear: return x;
        case Activation::relu: return x > 0.0 ? x : 0.0;
        case Activation::tanh_: return std::tanh(x);
        default: return 1.0 / (1.0 + std::exp(-x));
    }
}

// Derivative expressed through the activation output.
inline double activate_grad(Activation a, double y) {
    switch (a) {
        case Activation::linear: return 1.0;
        case Activation::relu: return y > 0.0 ? 1.0 : 0.0;
        case Activation::tanh_: return 1.0 - y * y;
        default: return y * (1.0 - y);
    }
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// ---- Dilated causal 1-D convolution ----
// x: [B,T,C], w: [k,C,F], b: [F]  ->  y: [B,T,F]
// y[b,t,f] = act( sum_{j,c} x[b, t-(k-1-j)*d, c] * w[j,c,f] + b[f] ),
// out-of-range taps read zero (causal left padding).

inline Tensor conv1d_forward(const Tensor& x, const Tensor& w, const Tensor& b, int dilation,
                             Activation act) {
    if (x.rank() != 3) throw Error("conv1d: input must be [batch, time, channels]");
    const std::size_t B = x.shape[0], T = x.shape[1], C = x.shape[2];
    const std::size_t k = w.shape[0], F = w.shape[2];
    if (w.rank() != 3 || w.shape[1] != C)
        throw Error("conv1d: weight shape " + w.shape_string() + " does not match input channels");
    if (b.numel() != F) throw Error("conv1d: bias size mismatch");
    Tensor y({B, T, F});
    const std::size_t d = static_cast<std::size_t>(dilation);
    for (std::size_t bi = 0; bi < B; ++bi) {
        for (std::size_t t = 0; t < T; ++t) {
            double* out = &y.data[(bi * T + t) * F];
            for (std::size_t f = 0; f < F; ++f) out[f] = b.data[f];
            for (std::size_t j = 0; j < k; ++j) {
                const std::size_t back = (k - 1 - j) * d;
                if (back > t) continue;
                const double* xin = &x.data[(bi * T + (t - back)) * C];
                const double* wj = &w.data[j * C * F];
                for (std::size_t c = 0; c < C; ++c) {
                    const double xv = xin[c];
                    if (xv == 0.0) continue;
                    const double* wr = wj + c * F;
                    for (std::size_t f = 0; f < F; ++f) out[f] += xv * wr[f];
                }
            }
            for (std::size_t f = 0; f < F; ++f) out[f] = activate(act, out[f]);
        }
    }
    return y;
}

struct Conv1dGrads {
    Tensor dx, dw, db;
};

inline Conv1dGrads conv1d_backward(const Tensor& x, const Tensor& w, int dilation, Activation act,
                                   const Tensor& y, const Tensor& dy) {
    const std::size_t B = x.shape[0], T = x.shape[1], C = x.shape[2];
    const std::size_t k = w.shape[0], F = w.shape[2];
    Conv1dGrads g{Tensor(x.shape), Tensor(w.shape), Tensor({F})};
    const std::size_t d = static_cast<std::size_t>(dilation);
    Tensor dpre(y.shape);
    for (std::size_t i = 0; i < y.numel(); ++i)
        dpre.data[i] = dy.data[i] * activate_grad(act, y.data[i]);
    for (std::size_t bi = 0; bi < B; ++bi) {
        for (std::size_t t = 0; t < T; ++t) {
            const double* dp = &dpre.data[(bi * T + t) * F];
            for (std::size_t f = 0; f < F; ++f) g.db.data[f] += dp[f];
            for (std::size_t j = 0; j < k; ++j) {
                const std::size_t back = (k - 1 - j) * d;
                if (back > t) continue;
                const double* xin = &x.data[(bi * T + (t - back)) * C];
                double* dxin = &g.dx.data[(bi * T + (t - back)) * C];
                const double* wj = &w.data[j * C * F];
                double* dwj = &g.dw.data[j * C * F];
                for (std::size_t c = 0; c < C; ++c) {
                    const double xv = xin[c];
                    double acc = 0.0;
                    const double* wr = wj + c * F;
                    double* dwr = dwj + c * F;
                    for (std::size_t f = 0; f < F; ++f) {
                        acc += wr[f] * dp[f];
                        dwr[f] += xv * dp[f];
                    }
                    dxin[c] += acc;
                }
            }
        }
    }
    return g;
}

// ---- Dense ----
// x: [B,C], w: [C,U], b: [U] -> y: [B,U]

inline Tensor dense_forward(const Tensor& x, const Tensor& w, const Tensor& b, Activation act) {
    if (x.rank() != 2) throw Error("dense: input must be [batch, features]");
    const std::size_t B = x.shape[0], C = x.shape[1], U = w.shape[1];
    if (w.rank() != 2 || w.shape[0] != C)
        throw Error("dense: weight shape " + w.shape_string() + " does not match input features");
    Tensor y({B, U});
    for (std::size_t bi = 0; bi < B; ++bi) {
        double* out = &y.data[bi * U];
        const double* xin = &x.data[bi * C];
        for (std::size_t u = 0; u < U; ++u) out[u] = b.data[u];
        for (std::size_t c = 0; c < C; ++c) {
            const double xv = xin[c];
            if (xv == 0.0) continue;
            const double* wr = &w.data[c * U];
            for (std::size_t u = 0; u < U; ++u) out[u] += xv * wr[u];
        }
        for (std::size_t u = 0; u < U; ++u) out[u] = activate(act, out[u]);
    }
    return y;
}

struct DenseGrads {
    Tensor dx, dw, db;
};

inline DenseGrads dense_backward(const Tensor& x, const Tensor& w, Activation act, const Tensor& y,
                                 const Tensor& dy) {
    const std::size_t B = x.shape[0], C = x.shape[1], U = w.shape[1];
    DenseGrads g{Tensor(x.shape), Tensor(w.shape), Tensor({U})};
    for (std::size_t bi = 0; bi < B; ++bi) {
        const double* xin = &x.data[bi * C];
        double* dxin = &g.dx.data[bi * C];
        for (std::size_t u = 0; u < U; ++u) {
            const double dpre = dy.data[bi * U + u] * activate_grad(act, y.data[bi * U + u]);
            if (dpre == 0.0) continue;
            g.db.data[u] += dpre;
            for (std::size_t c = 0; c < C; ++c) {
                g.dw.data[c * U + u] += xin[c] * dpre;
                dxin[c] += w.data[c * U + u] * dpre;
            }
        }
    }
    return g;
}

// ---- LSTM ----
// x: [B,T,C]; wx: [C,4U]; wh: [U,4U]; b: [4U]; gate order i,f,g,o.
// Zero initial hidden and cell state. Returns [B,T,U] (return_sequences)
// or [B,U] (final step).

struct LstmCache {
    Tensor gates;   // [B,T,4U] post-nonlinearity
    Tensor cells;   // [B,T,U]
    Tensor hidden;  // [B,T,U]
};

inline Tensor lstm_forward(const Tensor& x, const Tensor& wx, const Tensor& wh, const Tensor& b,
                           bool return_sequences, LstmCache* cache) {
    if (x.rank() != 3) throw Error("lstm: input must be [batch, time, channels]");
    const std::size_t B = x.shape[0], T = x.shape[1], C = x.shape[2];
    const std::size_t U4 = wx.shape[1], U = U4 / 4;
    if (wx.rank() != 2 || wx.shape[0] != C)
        throw Error("lstm: input weight shape " + wx.shape_string() + " does not match channels");
    if (wh.rank() != 2 || wh.shape[0] != U || wh.shape[1] != U4)
        throw Error("lstm: recurrent weight shape mismatch");
    if (b.numel() != U4) throw Error("lstm: bias size mismatch");

    LstmCache local;
    LstmCache& cc = cache ? *cache : local;
    cc.gates = Tensor({B, T, U4});
    cc.cells = Tensor({B, T, U});
    cc.hidden = Tensor({B, T, U});
    std::vector<double> z(U4);

    for (std::size_t bi = 0; bi < B; ++bi) {
        const double* h_prev = nullptr;
        const double* c_prev = nullptr;
        for (std::size_t t = 0; t < T; ++t) {
            for (std::size_t u = 0; u < U4; ++u) z[u] = b.data[u];
            const double* xin = &x.data[(bi * T + t) * C];
            for (std::size_t c = 0; c < C; ++c) {
                const double xv = xin[c];
                if (xv == 0.0) continue;
                const double* wr = &wx.data[c * U4];
                for (std::size_t u = 0; u < U4; ++u) z[u] += xv * wr[u];
            }
            if (t > 0) {
                for (std::size_t j = 0; j < U; ++j) {
                    const double hv = h_prev[j];
                    if (hv == 0.0) continue;
                    const double* wr = &wh.data[j * U4];
                    for (std::size_t u = 0; u < U4; ++u) z[u] += hv * wr[u];
                }
            }
            double* gate = &cc.gates.data[(bi * T + t) * U4];
            double* cell = &cc.cells.data[(bi * T + t) * U];
            double* hid = &cc.hidden.data[(bi * T + t) * U];
            for (std::size_t u = 0; u < U; ++u) {
                const double gi = sigmoid(z[u]);
                const double gf = sigmoid(z[U + u]);
                const double gg = std::tanh(z[2 * U + u]);
                const double go = sigmoid(z[3 * U + u]);
                gate[u] = gi;
                gate[U + u] = gf;
                gate[2 * U + u] = gg;
                gate[3 * U + u] = go;
                const double cp = t > 0 ? c_prev[u] : 0.0;
                cell[u] = gf * cp + gi * gg;
                hid[u] = go * std::tanh(cell[u]);
            }
            h_prev = hid;
            c_prev = cell;
        }
    }
    if (return_sequences) return cc.hidden;
    Tensor y({B, U});
    for (std::size_t bi = 0; bi < B; ++bi)
        for (std::size_t u = 0; u < U; ++u) y.data[bi * U + u] = cc.hidden.data[(bi * T + T - 1) * U + u];
    return y;
}

struct LstmGrads {
    Tensor dx, dwx, dwh, db;
};

inline LstmGrads lstm_backward(const Tensor& x, const Tensor& wx, const Tensor& wh,
                               bool return_sequences, const LstmCache& cc, const Tensor& dy) {
    const std::size_t B = x.shape[0], T = x.shape[1], C = x.shape[2];
    const std::size_t U4 = wx.shape[1], U = U4 / 4;
    LstmGrads g{Tensor(x.shape), Tensor(wx.shape), Tensor(wh.shape), Tensor({U4})};
    std::vector<double> dh(U), dc(U), dz(U4), dh_prev(U);

    for (std::size_t bi = 0; bi < B; ++bi) {
        std::fill(dh.begin(), dh.end(), 0.0);
        std::fill(dc.begin(), dc.end(), 0.0);
        for (std::size_t t = T; t-- > 0;) {
            if (return_sequences) {
                for (std::size_t u = 0; u < U; ++u) dh[u] += dy.data[(bi * T + t) * U + u];
            } else if (t == T - 1) {
                for (std::size_t u = 0; u < U; ++u) dh[u] += dy.data[bi * U + u];
            }
            const double* gate = &cc.gates.data[(bi * T + t) * U4];
            const double* cell = &cc.cells.data[(bi * T + t) * U];
            const double* cp = t > 0 ? &cc.cells.data[(bi * T + t - 1) * U] : nullptr;
            for (std::size_t u = 0; u < U; ++u) {
                const double gi = gate[u], gf = gate[U + u], gg = gate[2 * U + u], go = gate[3 * U + u];
                const double tc = std::tanh(cell[u]);
                const double dct = dc[u] + dh[u] * go * (1.0 - tc * tc);
                const double dgo = dh[u] * tc;
                const double dgi = dct * gg;
                const double dgg = dct * gi;
                const double dgf = dct * (t > 0 ? cp[u] : 0.0);
                dc[u] = dct * gf;
                dz[u] = dgi * gi * (1.0 - gi);
                dz[U + u] = dgf * gf * (1.0 - gf);
                dz[2 * U + u] = dgg * (1.0 - gg * gg);
                dz[3 * U + u] = dgo * go * (1.0 - go);
            }
            for (std::size_t u = 0; u < U4; ++u) g.db.data[u] += dz[u];
            const double* xin = &x.data[(bi * T + t) * C];
            double* dxin = &g.dx.data[(bi * T + t) * C];
            for (std::size_t c = 0; c < C; ++c) {
                const double xv = xin[c];
                double acc = 0.0;
                const double* wr = &wx.data[c * U4];
                double* dwr = &g.dwx.data[c * U4];
                for (std::size_t u = 0; u < U4; ++u) {
                    acc += wr[u] * dz[u];
                    dwr[u] += xv * dz[u];
                }
                dxin[c] = acc;
            }
            std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
            if (t > 0) {
                const double* hp = &cc.hidden.data[(bi * T + t - 1) * U];
                for (std::size_t j = 0; j < U; ++j) {
                    const double hv = hp[j];
                    double acc = 0.0;
                    const double* wr = &wh.data[j * U4];
                    double* dwr = &g.dwh.data[j * U4];
                    for (std::size_t u = 0; u < U4; ++u) {
                        acc += wr[u] * dz[u];
                        dwr[u] += hv * dz[u];
                    }
                    dh_prev[j] = acc;
                }
            }
            dh = dh_prev;
        }
    }
    return g;
}

// ---- Batch normalization ----
// Per-channel over (batch, time) in training mode; running statistics in
// inference mode.

struct BatchNormCache {
    Tensor xhat;
    std::vector<double> mean, var;
    bool training = false;
};

inline Tensor batchnorm_forward(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                                Tensor& running_mean, Tensor& running_var, double momentum,
                                double epsilon, bool training, BatchNormCache* cache) {
    if (x.rank() != 3 && x.rank() != 2) throw Error("batchnorm: input must be rank 2 or 3");
    const std::size_t C = x.shape.back();
    const std::size_t rows = x.numel() / C;
    if (gamma.numel() != C || beta.numel() != C) throw Error("batchnorm: parameter size mismatch");
    Tensor y(x.shape);
    std::vector<double> mean(C, 0.0), var(C, 0.0);
    if (training) {
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < C; ++c) mean[c] += x.data[r * C + c];
        for (std::size_t c = 0; c < C; ++c) mean[c] /= static_cast<double>(rows);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < C; ++c) {
                const double d = x.data[r * C + c] - mean[c];
                var[c] += d * d;
            }
        for (std::size_t c = 0; c < C; ++c) var[c] /= static_cast<double>(rows);
        for (std::size_t c = 0; c < C; ++c) {
            running_mean.data[c] = momentum * running_mean.data[c] + (1.0 - momentum) * mean[c];
            running_var.data[c] = momentum * running_var.data[c] + (1.0 - momentum) * var[c];
        }
    } else {
        for (std::size_t c = 0; c < C; ++c) {
            mean[c] = running_mean.data[c];
            var[c] = running_var.data[c];
        }
    }
    if (cache) {
        cache->xhat = Tensor(x.shape);
        cache->mean = mean;
        cache->var = var;
        cache->training = training;
    }
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < C; ++c) {
            const double xh = (x.data[r * C + c] - mean[c]) / std::sqrt(var[c] + epsilon);
            if (cache) cache->xhat.data[r * C + c] = xh;
            y.data[r * C + c] = gamma.data[c] * xh + beta.data[c];
        }
    return y;
}

struct BatchNormGrads {
    Tensor dx, dgamma, dbeta;
};

inline BatchNormGrads batchnorm_backward(const Tensor& x, const Tensor& gamma, double epsilon,
                                         const BatchNormCache& cc, const Tensor& dy) {
    const std::size_t C = x.shape.back();
    const std::size_t rows = x.numel() / C;
    BatchNormGrads g{Tensor(x.shape), Tensor({C}), Tensor({C})};
    std::vector<double> sum_dy(C, 0.0), sum_dy_xhat(C, 0.0);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < C; ++c) {
            const double d = dy.data[r * C + c];
            sum_dy[c] += d;
            sum_dy_xhat[c] += d * cc.xhat.data[r * C + c];
        }
    for (std::size_t c = 0; c < C; ++c) {
        g.dbeta.data[c] = sum_dy[c];
        g.dgamma.data[c] = sum_dy_xhat[c];
    }
    const double n = static_cast<double>(rows);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < C; ++c) {
            const double inv_std = 1.0 / std::sqrt(cc.var[c] + epsilon);
            if (cc.training) {
                g.dx.data[r * C + c] = gamma.data[c] * inv_std / n *
                                       (n * dy.data[r * C + c] - sum_dy[c] -
                                        cc.xhat.data[r * C + c] * sum_dy_xhat[c]);
            } else {
                g.dx.data[r * C + c] = gamma.data[c] * inv_std * dy.data[r * C + c];
            }
        }
    return g;
}

}  // namespace hydronet
