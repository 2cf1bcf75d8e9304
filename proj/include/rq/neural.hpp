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

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rq/common.hpp"
#include "rq/matrix.hpp"

namespace rq::neural {

struct NetworkConfig {
    std::size_t max_len = 80;
    std::size_t embed_dim = 300;
    std::size_t conv_filters = 32;
    std::size_t conv_kernel = 3;
    std::size_t pool_width = 2;
    std::size_t lstm_hidden = 64;
    std::vector<std::size_t> dense_widths{64, 16};
    double dropout_rate = 0.3;
    std::size_t aux_dim = 0;  // 0 disables the merge branch
    double learning_rate = 1e-3;
    std::size_t epochs = 30;
    std::size_t batch_size = 32;
    std::uint64_t seed = 1;

    /// Throws rq::Error on an inconsistent configuration.
    void validate() const;

    std::size_t conv_len() const { return max_len - conv_kernel + 1; }
    std::size_t pooled_len() const { return conv_len() / pool_width; }

    bool operator==(const NetworkConfig &) const = default;
};

/// `key=value` pairs separated by spaces, e.g. `max_len=40 ... dense_widths=64,16`.
std::string format_config(const NetworkConfig &config);
NetworkConfig parse_config(const std::string &line);

/// Trainable tensors. Gradients use the same type. LSTM gate blocks are stacked
/// as [input; forget; cell; output], each lstm_hidden rows.
struct NetworkParams {
    Matrix conv_w;  // filters × (kernel·embed_dim)
    Matrix conv_b;  // 1 × filters
    Matrix fwd_wx, fwd_wh, fwd_b;
    Matrix bwd_wx, bwd_wh, bwd_b;
    Matrix aux_w, aux_b;  // empty when aux_dim = 0
    std::vector<Matrix> dense_w, dense_b;
    Matrix out_w;  // 1 × last dense width
    Matrix out_b;  // 1 × 1

    /// Stable-ordered named views of every tensor present.
    std::vector<std::pair<std::string, Matrix *>> tensors();
    std::vector<std::pair<std::string, const Matrix *>> tensors() const;

    /// Same shapes, all zeros.
    NetworkParams zeros_like() const;

    bool operator==(const NetworkParams &) const = default;
};

/// Uniform(−s, s) with s = √(6 / (fan_in + fan_out)); biases zero except the
/// forget gates, which start at 1.
NetworkParams init_params(const NetworkConfig &config);

/// Activations kept by a forward pass for backpropagation.
struct ForwardCache {
    Matrix input;
    Matrix conv_pre, conv_out;
    Matrix pooled;
    std::vector<std::size_t> pool_arg;  // pooled index × filters → conv row

    struct LstmTrace {
        // One row per step, in the order the direction reads the sequence.
        Matrix xs, gate_i, gate_f, gate_g, gate_o, cell, hidden;
    };
    LstmTrace fwd, bwd;

    std::vector<double> lstm_concat;  // [h_fwd_final, h_bwd_final]
    std::vector<double> lstm_mask;    // inverted-dropout multipliers
    std::vector<double> aux_in, aux_pre, aux_out;
    std::vector<double> merged;
    std::vector<std::vector<double>> dense_in, dense_pre, dense_mask;
    std::vector<double> head_in;
    double logit = 0.0;
    double probability = 0.5;
};

struct ForwardResult {
    double probability;
    ForwardCache cache;
};

ForwardResult forward(const NetworkParams &params, const NetworkConfig &config, const Matrix &input,
                      std::span<const double> aux, bool train_mode, std::uint64_t dropout_seed);

/// Binary cross-entropy with p clamped to [1e-7, 1 − 1e-7].
double loss(double p, int y);

/// Gradient of loss(forward(...), y) with respect to every tensor.
NetworkParams backward(const NetworkParams &params, const NetworkConfig &config, const ForwardCache &cache, int y);

struct NetExample {
    Matrix input;
    std::vector<double> aux;
    int label = 0;  // 0 or 1
};

/// Sum (not mean) of per-example gradients, with per-example dropout seeds.
NetworkParams accumulate_gradients(const NetworkParams &params, const NetworkConfig &config,
                                   std::span<const NetExample> batch, std::span<const std::uint64_t> dropout_seeds,
                                   double *loss_sum = nullptr);

struct EpochStats {
    double train_loss = 0.0;
    double val_macro_f1 = 0.0;
    double val_loss = 0.0;
};

struct TrainedNetwork {
    NetworkParams params;
    std::size_t best_epoch = 0;       // 0 means the initial parameters
    std::vector<EpochStats> history;  // history[0] is before any update
};

/// Mini-batch Adam (β₁ 0.9, β₂ 0.999, ε 1e-8) for a fixed number of epochs.
/// Keeps the epoch with the best validation macro-F1, ties going to the lower
/// validation loss. An empty validation set means the training set is used.
TrainedNetwork train_network(const NetworkConfig &config, std::span<const NetExample> examples,
                             std::span<const NetExample> val);

double predict_probability(const NetworkParams &params, const NetworkConfig &config, const Matrix &input,
                           std::span<const double> aux);

/// Config plus parameters and the aux-feature standardizer.
struct LstmModel {
    NetworkConfig config;
    NetworkParams params;
    std::vector<double> aux_mean;
    std::vector<double> aux_std;

    bool operator==(const LstmModel &) const = default;
};

void write_model(const LstmModel &model, std::ostream &out);
LstmModel read_model(std::istream &in);
void save_model(const LstmModel &model, const std::filesystem::path &path);
LstmModel load_model(const std::filesystem::path &path);

}  // namespace rq::neural
