/*
 * Copyright 2026 The rqkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "rq/neural.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "rq/metrics.hpp"

namespace rq::neural {

void NetworkConfig::validate() const {
    auto fail = [](const std::string &msg) { throw Error("invalid network config: " + msg); };
    if (max_len == 0 || embed_dim == 0 || conv_filters == 0 || conv_kernel == 0 || pool_width == 0 ||
        lstm_hidden == 0) {
        fail("all widths must be positive");
    }
    if (conv_kernel > max_len) fail("conv_kernel exceeds max_len");
    if (conv_len() < pool_width) fail("pool_width exceeds the convolution output length");
    if (dense_widths.empty()) fail("dense_widths must not be empty");
    for (auto w : dense_widths) {
        if (w == 0) fail("dense widths must be positive");
    }
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) fail("dropout_rate must be in [0, 1)");
    if (!(learning_rate >= 0.0)) fail("learning_rate must be non-negative");
    if (batch_size == 0) fail("batch_size must be positive");
}

std::string format_config(const NetworkConfig &c) {
    std::ostringstream out;
    char lr[40], dr[40];
    std::snprintf(lr, sizeof lr, "%.17g", c.learning_rate);
    std::snprintf(dr, sizeof dr, "%.17g", c.dropout_rate);
    out << "max_len=" << c.max_len << " embed_dim=" << c.embed_dim << " conv_filters=" << c.conv_filters
        << " conv_kernel=" << c.conv_kernel << " pool_width=" << c.pool_width << " lstm_hidden=" << c.lstm_hidden
        << " dense_widths=";
    for (std::size_t i = 0; i < c.dense_widths.size(); ++i) out << (i ? "," : "") << c.dense_widths[i];
    out << " dropout_rate=" << dr << " aux_dim=" << c.aux_dim << " learning_rate=" << lr << " epochs=" << c.epochs
        << " batch_size=" << c.batch_size << " seed=" << c.seed;
    return out.str();
}

NetworkConfig parse_config(const std::string &line) {
    NetworkConfig c;
    std::istringstream in(line);
    std::string kv;
    while (in >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw Error("network config: expected key=value, got '" + kv + "'");
        const std::string key = kv.substr(0, eq);
        const std::string value = kv.substr(eq + 1);
        auto as_size = [&] {
            try {
                return static_cast<std::size_t>(std::stoull(value));
            } catch (const std::exception &) {
                throw Error("network config: bad value for " + key);
            }
        };
        auto as_double = [&] {
            try {
                return std::stod(value);
            } catch (const std::exception &) {
                throw Error("network config: bad value for " + key);
            }
        };
        if (key == "max_len") c.max_len = as_size();
        else if (key == "embed_dim") c.embed_dim = as_size();
        else if (key == "conv_filters") c.conv_filters = as_size();
        else if (key == "conv_kernel") c.conv_kernel = as_size();
        else if (key == "pool_width") c.pool_width = as_size();
        else if (key == "lstm_hidden") c.lstm_hidden = as_size();
        else if (key == "dropout_rate") c.dropout_rate = as_double();
        else if (key == "aux_dim") c.aux_dim = as_size();
        else if (key == "learning_rate") c.learning_rate = as_double();
        else if (key == "epochs") c.epochs = as_size();
        else if (key == "batch_size") c.batch_size = as_size();
        else if (key == "seed") c.seed = static_cast<std::uint64_t>(as_size());
        else if (key == "dense_widths") {
            c.dense_widths.clear();
            std::istringstream ws(value);
            std::string w;
            while (std::getline(ws, w, ',')) {
                try {
                    c.dense_widths.push_back(static_cast<std::size_t>(std::stoull(w)));
                } catch (const std::exception &) {
                    throw Error("network config: bad value for dense_widths");
                }
            }
        } else {
            throw Error("network config: unknown key '" + key + "'");
        }
    }
    return c;
}

std::vector<std::pair<std::string, Matrix *>> NetworkParams::tensors() {
    std::vector<std::pair<std::string, Matrix *>> t = {
        {"conv_w", &conv_w}, {"conv_b", &conv_b}, {"fwd_wx", &fwd_wx}, {"fwd_wh", &fwd_wh}, {"fwd_b", &fwd_b},
        {"bwd_wx", &bwd_wx}, {"bwd_wh", &bwd_wh}, {"bwd_b", &bwd_b}};
    if (aux_w.size() > 0) {
        t.emplace_back("aux_w", &aux_w);
        t.emplace_back("aux_b", &aux_b);
    }
    for (std::size_t i = 0; i < dense_w.size(); ++i) {
        t.emplace_back("dense" + std::to_string(i) + "_w", &dense_w[i]);
        t.emplace_back("dense" + std::to_string(i) + "_b", &dense_b[i]);
    }
    t.emplace_back("out_w", &out_w);
    t.emplace_back("out_b", &out_b);
    return t;
}

std::vector<std::pair<std::string, const Matrix *>> NetworkParams::tensors() const {
    std::vector<std::pair<std::string, const Matrix *>> out;
    for (auto &[name, m] : const_cast<NetworkParams *>(this)->tensors()) out.emplace_back(name, m);
    return out;
}

NetworkParams NetworkParams::zeros_like() const {
    NetworkParams z = *this;
    for (auto &[name, m] : z.tensors()) std::fill(m->data().begin(), m->data().end(), 0.0);
    return z;
}

NetworkParams init_params(const NetworkConfig &config) {
    config.validate();
    const std::size_t F = config.conv_filters, K = config.conv_kernel, E = config.embed_dim;
    const std::size_t H = config.lstm_hidden, A = config.aux_dim;

    NetworkParams p;
    p.conv_w = Matrix(F, K * E);
    p.conv_b = Matrix(1, F);
    for (Matrix *wx : {&p.fwd_wx, &p.bwd_wx}) *wx = Matrix(4 * H, F);
    for (Matrix *wh : {&p.fwd_wh, &p.bwd_wh}) *wh = Matrix(4 * H, H);
    for (Matrix *b : {&p.fwd_b, &p.bwd_b}) {
        *b = Matrix(1, 4 * H);
        for (std::size_t j = H; j < 2 * H; ++j) (*b)(0, j) = 1.0;
    }
    if (A > 0) {
        p.aux_w = Matrix(A, A);
        p.aux_b = Matrix(1, A);
    }
    std::size_t in = 2 * H + A;
    for (std::size_t w : config.dense_widths) {
        p.dense_w.emplace_back(w, in);
        p.dense_b.emplace_back(1, w);
        in = w;
    }
    p.out_w = Matrix(1, in);
    p.out_b = Matrix(1, 1);

    Rng rng(config.seed);
    for (auto &[name, m] : p.tensors()) {
        if (m->rows() == 1 && name.ends_with("_b")) continue;  // biases
        const double s = std::sqrt(6.0 / static_cast<double>(m->rows() + m->cols()));
        for (double &v : m->data()) v = rng.uniform(-s, s);
    }
    return p;
}

namespace {

double sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

constexpr double kClamp = 1e-7;

// y = W x + b for a row-vector bias.
std::vector<double> affine(const Matrix &w, const Matrix &b, std::span<const double> x) {
    std::vector<double> y(w.rows());
    for (std::size_t r = 0; r < w.rows(); ++r) {
        double s = b(0, r);
        const auto row = w.row(r);
        for (std::size_t c = 0; c < x.size(); ++c) s += row[c] * x[c];
        y[r] = s;
    }
    return y;
}

// dW += dy ⊗ x, db += dy, returns Wᵀ dy.
std::vector<double> affine_backward(const Matrix &w, std::span<const double> x, std::span<const double> dy,
                                    Matrix &dw, Matrix &db) {
    std::vector<double> dx(w.cols(), 0.0);
    for (std::size_t r = 0; r < w.rows(); ++r) {
        const double g = dy[r];
        if (g == 0.0) continue;
        db(0, r) += g;
        auto grow = dw.row(r);
        const auto wrow = w.row(r);
        for (std::size_t c = 0; c < x.size(); ++c) {
            grow[c] += g * x[c];
            dx[c] += g * wrow[c];
        }
    }
    return dx;
}

std::vector<double> dropout_mask(std::size_t n, double rate, bool train_mode, Rng &rng) {
    std::vector<double> mask(n, 1.0);
    if (!train_mode) return mask;
    const double keep_scale = 1.0 / (1.0 - rate);
    for (double &m : mask) m = rng.uniform() >= rate ? keep_scale : 0.0;
    return mask;
}

void lstm_forward(const Matrix &wx, const Matrix &wh, const Matrix &b, const Matrix &pooled, bool reverse,
                  std::size_t H, ForwardCache::LstmTrace &trace) {
    const std::size_t T = pooled.rows(), F = pooled.cols();
    trace.xs = Matrix(T, F);
    for (Matrix *m : {&trace.gate_i, &trace.gate_f, &trace.gate_g, &trace.gate_o, &trace.cell, &trace.hidden}) {
        *m = Matrix(T, H);
    }
    std::vector<double> h(H, 0.0), c(H, 0.0), a(4 * H);
    for (std::size_t step = 0; step < T; ++step) {
        const std::size_t src = reverse ? T - 1 - step : step;
        const auto x = pooled.row(src);
        std::copy(x.begin(), x.end(), trace.xs.row(step).begin());
        for (std::size_t r = 0; r < 4 * H; ++r) {
            double s = b(0, r);
            const auto xr = wx.row(r);
            for (std::size_t k = 0; k < F; ++k) s += xr[k] * x[k];
            const auto hr = wh.row(r);
            for (std::size_t k = 0; k < H; ++k) s += hr[k] * h[k];
            a[r] = s;
        }
        for (std::size_t j = 0; j < H; ++j) {
            const double i = sigmoid(a[j]);
            const double f = sigmoid(a[H + j]);
            const double g = std::tanh(a[2 * H + j]);
            const double o = sigmoid(a[3 * H + j]);
            c[j] = f * c[j] + i * g;
            h[j] = o * std::tanh(c[j]);
            trace.gate_i(step, j) = i;
            trace.gate_f(step, j) = f;
            trace.gate_g(step, j) = g;
            trace.gate_o(step, j) = o;
            trace.cell(step, j) = c[j];
            trace.hidden(step, j) = h[j];
        }
    }
}

// Backpropagation through time for one direction. Adds input gradients into
// d_pooled (mapped back to source positions).
void lstm_backward(const Matrix &wx, const Matrix &wh, const ForwardCache::LstmTrace &trace, bool reverse,
                   std::size_t H, std::span<const double> dh_final, Matrix &dwx, Matrix &dwh, Matrix &db,
                   Matrix &d_pooled) {
    const std::size_t T = trace.xs.rows(), F = trace.xs.cols();
    std::vector<double> dh(dh_final.begin(), dh_final.end()), dc(H, 0.0), da(4 * H);
    for (std::size_t step = T; step-- > 0;) {
        for (std::size_t j = 0; j < H; ++j) {
            const double i = trace.gate_i(step, j), f = trace.gate_f(step, j);
            const double g = trace.gate_g(step, j), o = trace.gate_o(step, j);
            const double c = trace.cell(step, j);
            const double c_prev = step > 0 ? trace.cell(step - 1, j) : 0.0;
            const double tc = std::tanh(c);
            const double d_o = dh[j] * tc;
            dc[j] += dh[j] * o * (1.0 - tc * tc);
            da[j] = dc[j] * g * i * (1.0 - i);
            da[H + j] = dc[j] * c_prev * f * (1.0 - f);
            da[2 * H + j] = dc[j] * i * (1.0 - g * g);
            da[3 * H + j] = d_o * o * (1.0 - o);
            dc[j] *= f;
        }
        const auto x = trace.xs.row(step);
        const std::size_t src = reverse ? T - 1 - step : step;
        auto dx = d_pooled.row(src);
        std::vector<double> dh_prev(H, 0.0);
        for (std::size_t r = 0; r < 4 * H; ++r) {
            const double g = da[r];
            db(0, r) += g;
            auto dwx_r = dwx.row(r);
            const auto wx_r = wx.row(r);
            for (std::size_t k = 0; k < F; ++k) {
                dwx_r[k] += g * x[k];
                dx[k] += g * wx_r[k];
            }
            if (step > 0) {
                auto dwh_r = dwh.row(r);
                const auto wh_r = wh.row(r);
                const auto h_prev = trace.hidden.row(step - 1);
                for (std::size_t k = 0; k < H; ++k) {
                    dwh_r[k] += g * h_prev[k];
                    dh_prev[k] += g * wh_r[k];
                }
            }
        }
        dh = std::move(dh_prev);
    }
}

}  // namespace

ForwardResult forward(const NetworkParams &params, const NetworkConfig &config, const Matrix &input,
                      std::span<const double> aux, bool train_mode, std::uint64_t dropout_seed) {
    const std::size_t L = config.max_len, E = config.embed_dim, F = config.conv_filters, K = config.conv_kernel;
    const std::size_t H = config.lstm_hidden, A = config.aux_dim, P = config.pool_width;
    if (input.rows() != L || input.cols() != E) {
        throw Error("forward: input is " + std::to_string(input.rows()) + "x" + std::to_string(input.cols()) +
                    ", expected " + std::to_string(L) + "x" + std::to_string(E));
    }
    if (aux.size() != A) throw Error("forward: aux has " + std::to_string(aux.size()) + " values, expected " + std::to_string(A));

    ForwardResult res{0.5, {}};
    ForwardCache &c = res.cache;
    c.input = input;

    // Valid 1D convolution + ReLU.
    const std::size_t Lc = config.conv_len();
    c.conv_pre = Matrix(Lc, F);
    c.conv_out = Matrix(Lc, F);
    for (std::size_t t = 0; t < Lc; ++t) {
        // The window rows t..t+K-1 are contiguous in row-major storage.
        const double *window = input.data().data() + t * E;
        for (std::size_t f = 0; f < F; ++f) {
            double s = params.conv_b(0, f);
            const auto w = params.conv_w.row(f);
            for (std::size_t k = 0; k < K * E; ++k) s += w[k] * window[k];
            c.conv_pre(t, f) = s;
            c.conv_out(t, f) = s > 0.0 ? s : 0.0;
        }
    }

    // Non-overlapping max pooling.
    const std::size_t Lp = config.pooled_len();
    c.pooled = Matrix(Lp, F);
    c.pool_arg.assign(Lp * F, 0);
    for (std::size_t t = 0; t < Lp; ++t) {
        for (std::size_t f = 0; f < F; ++f) {
            std::size_t arg = t * P;
            for (std::size_t q = t * P + 1; q < (t + 1) * P; ++q) {
                if (c.conv_out(q, f) > c.conv_out(arg, f)) arg = q;
            }
            c.pooled(t, f) = c.conv_out(arg, f);
            c.pool_arg[t * F + f] = arg;
        }
    }

    lstm_forward(params.fwd_wx, params.fwd_wh, params.fwd_b, c.pooled, false, H, c.fwd);
    lstm_forward(params.bwd_wx, params.bwd_wh, params.bwd_b, c.pooled, true, H, c.bwd);
    c.lstm_concat.resize(2 * H);
    for (std::size_t j = 0; j < H; ++j) {
        c.lstm_concat[j] = c.fwd.hidden(Lp - 1, j);
        c.lstm_concat[H + j] = c.bwd.hidden(Lp - 1, j);
    }

    Rng rng(dropout_seed);
    c.lstm_mask = dropout_mask(2 * H, config.dropout_rate, train_mode, rng);
    c.merged.resize(2 * H);
    for (std::size_t j = 0; j < 2 * H; ++j) c.merged[j] = c.lstm_concat[j] * c.lstm_mask[j];

    if (A > 0) {
        c.aux_in.assign(aux.begin(), aux.end());
        c.aux_pre = affine(params.aux_w, params.aux_b, c.aux_in);
        c.aux_out.resize(A);
        for (std::size_t j = 0; j < A; ++j) c.aux_out[j] = c.aux_pre[j] > 0.0 ? c.aux_pre[j] : 0.0;
        c.merged.insert(c.merged.end(), c.aux_out.begin(), c.aux_out.end());
    }

    std::vector<double> x = c.merged;
    const std::size_t D = params.dense_w.size();
    for (std::size_t l = 0; l < D; ++l) {
        c.dense_in.push_back(x);
        auto pre = affine(params.dense_w[l], params.dense_b[l], x);
        std::vector<double> mask = l + 1 < D ? dropout_mask(pre.size(), config.dropout_rate, train_mode, rng)
                                             : std::vector<double>(pre.size(), 1.0);
        x.resize(pre.size());
        for (std::size_t j = 0; j < pre.size(); ++j) x[j] = (pre[j] > 0.0 ? pre[j] : 0.0) * mask[j];
        c.dense_pre.push_back(std::move(pre));
        c.dense_mask.push_back(std::move(mask));
    }
    c.head_in = x;
    c.logit = affine(params.out_w, params.out_b, x)[0];
    c.probability = sigmoid(c.logit);
    res.probability = c.probability;
    return res;
}

double loss(double p, int y) {
    const double q = std::clamp(p, kClamp, 1.0 - kClamp);
    return -(y * std::log(q) + (1 - y) * std::log(1.0 - q));
}

NetworkParams backward(const NetworkParams &params, const NetworkConfig &config, const ForwardCache &c, int y) {
    const std::size_t E = config.embed_dim, F = config.conv_filters, K = config.conv_kernel;
    const std::size_t H = config.lstm_hidden, A = config.aux_dim;
    NetworkParams g = params.zeros_like();

    const double p = c.probability;
    // The clamped loss is flat outside [kClamp, 1 - kClamp].
    const double dlogit = (p < kClamp || p > 1.0 - kClamp) ? 0.0 : p - static_cast<double>(y);
    const double dl[] = {dlogit};
    std::vector<double> dx = affine_backward(params.out_w, c.head_in, dl, g.out_w, g.out_b);

    for (std::size_t l = params.dense_w.size(); l-- > 0;) {
        std::vector<double> dpre(dx.size());
        for (std::size_t j = 0; j < dx.size(); ++j) {
            dpre[j] = c.dense_pre[l][j] > 0.0 ? dx[j] * c.dense_mask[l][j] : 0.0;
        }
        dx = affine_backward(params.dense_w[l], c.dense_in[l], dpre, g.dense_w[l], g.dense_b[l]);
    }

    // dx is now d(merged).
    if (A > 0) {
        std::vector<double> daux(A);
        for (std::size_t j = 0; j < A; ++j) daux[j] = c.aux_pre[j] > 0.0 ? dx[2 * H + j] : 0.0;
        affine_backward(params.aux_w, c.aux_in, daux, g.aux_w, g.aux_b);
    }
    std::vector<double> dh_fwd(H), dh_bwd(H);
    for (std::size_t j = 0; j < H; ++j) {
        dh_fwd[j] = dx[j] * c.lstm_mask[j];
        dh_bwd[j] = dx[H + j] * c.lstm_mask[H + j];
    }

    Matrix d_pooled(c.pooled.rows(), F);
    lstm_backward(params.fwd_wx, params.fwd_wh, c.fwd, false, H, dh_fwd, g.fwd_wx, g.fwd_wh, g.fwd_b, d_pooled);
    lstm_backward(params.bwd_wx, params.bwd_wh, c.bwd, true, H, dh_bwd, g.bwd_wx, g.bwd_wh, g.bwd_b, d_pooled);

    // Route pooled gradients to the argmax conv positions, then through ReLU.
    Matrix d_conv(c.conv_pre.rows(), F);
    for (std::size_t t = 0; t < c.pooled.rows(); ++t) {
        for (std::size_t f = 0; f < F; ++f) d_conv(c.pool_arg[t * F + f], f) += d_pooled(t, f);
    }
    for (std::size_t t = 0; t < d_conv.rows(); ++t) {
        const double *window = c.input.data().data() + t * E;
        for (std::size_t f = 0; f < F; ++f) {
            const double d = c.conv_pre(t, f) > 0.0 ? d_conv(t, f) : 0.0;
            if (d == 0.0) continue;
            g.conv_b(0, f) += d;
            auto gw = g.conv_w.row(f);
            for (std::size_t k = 0; k < K * E; ++k) gw[k] += d * window[k];
        }
    }
    return g;
}

NetworkParams accumulate_gradients(const NetworkParams &params, const NetworkConfig &config,
                                   std::span<const NetExample> batch, std::span<const std::uint64_t> dropout_seeds,
                                   double *loss_sum) {
    if (dropout_seeds.size() != batch.size()) throw Error("accumulate_gradients: one dropout seed per example required");
    NetworkParams total = params.zeros_like();
    auto total_tensors = total.tensors();
    double l = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto fr = forward(params, config, batch[i].input, batch[i].aux, true, dropout_seeds[i]);
        l += loss(fr.probability, batch[i].label);
        NetworkParams gi = backward(params, config, fr.cache, batch[i].label);
        auto gi_tensors = gi.tensors();
        for (std::size_t t = 0; t < total_tensors.size(); ++t) {
            auto &dst = total_tensors[t].second->data();
            const auto &src = gi_tensors[t].second->data();
            for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
        }
    }
    if (loss_sum) *loss_sum = l;
    return total;
}

double predict_probability(const NetworkParams &params, const NetworkConfig &config, const Matrix &input,
                           std::span<const double> aux) {
    return forward(params, config, input, aux, false, 0).probability;
}

namespace {

struct Evaluation {
    double mean_loss = 0.0;
    double macro_f1 = 0.0;
};

Evaluation evaluate(const NetworkParams &params, const NetworkConfig &config, std::span<const NetExample> data) {
    Evaluation e;
    if (data.empty()) return e;
    std::vector<Label> pred, gold;
    for (const auto &ex : data) {
        const double p = predict_probability(params, config, ex.input, ex.aux);
        e.mean_loss += loss(p, ex.label);
        pred.push_back(p >= 0.5 ? Label::positive : Label::negative);
        gold.push_back(ex.label == 1 ? Label::positive : Label::negative);
    }
    e.mean_loss /= static_cast<double>(data.size());
    e.macro_f1 = eval::macro_f1(pred, gold);
    return e;
}

}  // namespace

TrainedNetwork train_network(const NetworkConfig &config, std::span<const NetExample> examples,
                             std::span<const NetExample> val) {
    if (examples.empty()) throw Error("train_network: no training examples");
    config.validate();
    const auto validation = val.empty() ? examples : val;

    TrainedNetwork result;
    NetworkParams params = init_params(config);
    NetworkParams m = params.zeros_like(), v = params.zeros_like();
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

    auto record = [&](const NetworkParams &p) {
        const Evaluation tr = evaluate(p, config, examples);
        const Evaluation va = evaluate(p, config, validation);
        result.history.push_back({tr.mean_loss, va.macro_f1, va.mean_loss});
    };
    record(params);
    result.params = params;

    Rng rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<std::size_t> order(examples.size());
    std::iota(order.begin(), order.end(), 0);
    std::size_t step = 0;
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t end = std::min(order.size(), start + config.batch_size);
            std::vector<NetExample> batch;
            std::vector<std::uint64_t> seeds;
            for (std::size_t k = start; k < end; ++k) {
                batch.push_back(examples[order[k]]);
                seeds.push_back(rng.next());
            }
            NetworkParams grad = accumulate_gradients(params, config, batch, seeds);
            ++step;
            const double scale = 1.0 / static_cast<double>(batch.size());
            const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
            const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
            auto pt = params.tensors(), gt = grad.tensors(), mt = m.tensors(), vt = v.tensors();
            for (std::size_t t = 0; t < pt.size(); ++t) {
                auto &pw = pt[t].second->data();
                const auto &gw = gt[t].second->data();
                auto &mw = mt[t].second->data();
                auto &vw = vt[t].second->data();
                for (std::size_t k = 0; k < pw.size(); ++k) {
                    const double gk = gw[k] * scale;
                    mw[k] = beta1 * mw[k] + (1.0 - beta1) * gk;
                    vw[k] = beta2 * vw[k] + (1.0 - beta2) * gk * gk;
                    pw[k] -= config.learning_rate * (mw[k] / c1) / (std::sqrt(vw[k] / c2) + eps);
                }
            }
        }
        record(params);
        const EpochStats &now = result.history.back();
        const EpochStats &best = result.history[result.best_epoch];
        if (now.val_macro_f1 > best.val_macro_f1 ||
            (now.val_macro_f1 == best.val_macro_f1 && now.val_loss < best.val_loss)) {
            result.best_epoch = epoch;
            result.params = params;
        }
    }
    return result;
}

namespace {

void write_tensor(std::ostream &out, const std::string &name, const Matrix &m) {
    out << "tensor " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    char num[40];
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            std::snprintf(num, sizeof num, "%.17g", m(r, c));
            out << (c ? " " : "") << num;
        }
        out << '\n';
    }
}

std::pair<std::string, Matrix> read_tensor(std::istream &in) {
    std::string line;
    if (!std::getline(in, line)) throw Error("lstm model: unexpected end of file");
    std::istringstream hs(line);
    std::string key, name;
    std::size_t rows = 0, cols = 0;
    if (!(hs >> key >> name >> rows >> cols) || key != "tensor") throw Error("lstm model: bad tensor header '" + line + "'");
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (!std::getline(in, line)) throw Error("lstm model: truncated tensor " + name);
        std::istringstream ls(line);
        std::string tok;
        for (std::size_t c = 0; c < cols; ++c) {
            if (!(ls >> tok)) throw Error("lstm model: short row in tensor " + name);
            m(r, c) = std::strtod(tok.c_str(), nullptr);
        }
    }
    return {name, std::move(m)};
}

}  // namespace

void write_model(const LstmModel &model, std::ostream &out) {
    out << "rq-lstm v1\n";
    out << "config " << format_config(model.config) << '\n';
    const auto tensors = model.params.tensors();
    const std::size_t extra = model.aux_mean.empty() ? 0 : 2;
    out << "tensors " << tensors.size() + extra << '\n';
    for (const auto &[name, m] : tensors) write_tensor(out, name, *m);
    if (extra) {
        Matrix mean(1, model.aux_mean.size()), sd(1, model.aux_std.size());
        mean.data() = model.aux_mean;
        sd.data() = model.aux_std;
        write_tensor(out, "aux_mean", mean);
        write_tensor(out, "aux_std", sd);
    }
}

LstmModel read_model(std::istream &in) {
    std::string line;
    if (!std::getline(in, line) || line != "rq-lstm v1") throw Error("lstm model: bad header");
    if (!std::getline(in, line) || !line.starts_with("config ")) throw Error("lstm model: missing config line");
    LstmModel model;
    model.config = parse_config(line.substr(7));
    model.config.validate();
    if (!std::getline(in, line) || !line.starts_with("tensors ")) throw Error("lstm model: missing tensor count");
    const std::size_t count = std::stoull(line.substr(8));
    std::map<std::string, Matrix> read;
    for (std::size_t i = 0; i < count; ++i) {
        auto [name, m] = read_tensor(in);
        read.emplace(std::move(name), std::move(m));
    }
    model.params = init_params(model.config);
    for (auto &[name, m] : model.params.tensors()) {
        auto it = read.find(name);
        if (it == read.end()) throw Error("lstm model: missing tensor " + name);
        if (it->second.rows() != m->rows() || it->second.cols() != m->cols()) {
            throw Error("lstm model: tensor " + name + " has the wrong shape");
        }
        *m = it->second;
    }
    if (auto it = read.find("aux_mean"); it != read.end()) model.aux_mean = it->second.data();
    if (auto it = read.find("aux_std"); it != read.end()) model.aux_std = it->second.data();
    return model;
}

void save_model(const LstmModel &model, const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    write_model(model, out);
}

LstmModel load_model(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model " + path.string());
    return read_model(in);
}

}  // namespace rq::neural
