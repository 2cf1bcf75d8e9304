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

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "rq/neural.hpp"

using namespace rq;
using namespace rq::neural;

namespace {

NetworkConfig tiny() {
    NetworkConfig c;
    c.max_len = 6;
    c.embed_dim = 4;
    c.conv_filters = 3;
    c.conv_kernel = 3;
    c.pool_width = 2;
    c.lstm_hidden = 5;
    c.dense_widths = {4, 3};
    c.dropout_rate = 0.25;
    c.aux_dim = 2;
    c.seed = 7;
    return c;
}

Matrix random_input(Rng &rng, std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    for (double &x : m.data()) x = rng.uniform(-1.0, 1.0);
    return m;
}

std::vector<double> random_aux(Rng &rng, std::size_t n) {
    std::vector<double> a(n);
    for (double &x : a) x = rng.uniform(-1.0, 1.0);
    return a;
}

double norm_of(const std::vector<double> &v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// Keyword-planted sequences: positives contain a fixed marker row.
std::vector<NetExample> planted(Rng &rng, std::size_t n, const NetworkConfig &c) {
    std::vector<NetExample> out;
    for (std::size_t i = 0; i < n; ++i) {
        NetExample ex;
        ex.input = Matrix(c.max_len, c.embed_dim);
        for (double &x : ex.input.data()) x = rng.uniform(-0.3, 0.3);
        ex.label = static_cast<int>(i % 2);
        if (ex.label == 1) {
            const std::size_t at = rng.below(c.max_len);
            for (std::size_t d = 0; d < c.embed_dim; ++d) ex.input(at, d) = 1.0;
        }
        out.push_back(std::move(ex));
    }
    return out;
}

}  // namespace

TEST_CASE("every tensor matches central finite differences") {
    const NetworkConfig c = tiny();
    Rng rng(11);
    NetworkParams params = init_params(c);
    // Move biases off zero so their gradients are exercised away from symmetric points.
    for (auto &[name, t] : params.tensors()) {
        for (double &x : t->data()) x += rng.uniform(-0.1, 0.1);
    }
    for (int y : {0, 1}) {
        const Matrix input = random_input(rng, c.max_len, c.embed_dim);
        const auto aux = random_aux(rng, c.aux_dim);
        const std::uint64_t seed = 1234 + static_cast<std::uint64_t>(y);
        const auto fwd = forward(params, c, input, aux, true, seed);
        const NetworkParams grad = backward(params, c, fwd.cache, y);
        auto gt = grad.tensors();
        auto pt = params.tensors();
        REQUIRE(gt.size() == pt.size());
        const double eps = 1e-4;
        for (std::size_t t = 0; t < pt.size(); ++t) {
            CHECK(gt[t].first == pt[t].first);
            auto &w = pt[t].second->data();
            std::vector<double> analytic(gt[t].second->data().begin(), gt[t].second->data().end());
            std::vector<double> numeric(w.size()), diff(w.size());
            for (std::size_t k = 0; k < w.size(); ++k) {
                const double saved = w[k];
                w[k] = saved + eps;
                const double up = loss(forward(params, c, input, aux, true, seed).probability, y);
                w[k] = saved - eps;
                const double down = loss(forward(params, c, input, aux, true, seed).probability, y);
                w[k] = saved;
                numeric[k] = (up - down) / (2 * eps);
                diff[k] = numeric[k] - analytic[k];
            }
            const double rel = norm_of(diff) / std::max(1e-12, norm_of(numeric) + norm_of(analytic));
            CHECK_MESSAGE(rel <= 1e-3, pt[t].first << " relative error " << rel);
        }
    }
}

TEST_CASE("parameter shapes and initialization") {
    const NetworkConfig c = tiny();
    const NetworkParams p = init_params(c);
    CHECK(p.conv_w.rows() == 3);
    CHECK(p.conv_w.cols() == 12);
    CHECK(p.fwd_wx.rows() == 20);
    CHECK(p.fwd_wx.cols() == 3);
    CHECK(p.fwd_wh.cols() == 5);
    CHECK(p.aux_w.rows() == 2);
    CHECK(p.dense_w.size() == 2);
    CHECK(p.dense_w[0].cols() == 12);
    CHECK(p.out_w.cols() == 3);
    for (std::size_t j = 0; j < 20; ++j) {
        const double expected = (j >= 5 && j < 10) ? 1.0 : 0.0;
        CHECK(p.fwd_b(0, j) == expected);
        CHECK(p.bwd_b(0, j) == expected);
    }
    CHECK(init_params(c) == p);
    NetworkConfig other = c;
    other.seed = 8;
    CHECK_FALSE(init_params(other) == p);

    NetworkConfig no_aux = c;
    no_aux.aux_dim = 0;
    const auto q = init_params(no_aux);
    CHECK(q.aux_w.rows() == 0);
    CHECK(q.tensors().size() + 2 == p.tensors().size());
}

TEST_CASE("config validation and text form") {
    NetworkConfig c = tiny();
    CHECK(parse_config(format_config(c)) == c);
    CHECK(parse_config(format_config(NetworkConfig{})) == NetworkConfig{});
    CHECK_THROWS_AS(parse_config("max_len=abc"), Error);
    CHECK_THROWS_AS(parse_config("colour=blue"), Error);
    c.conv_kernel = 7;
    CHECK_THROWS_AS(c.validate(), Error);
    c = tiny();
    c.dropout_rate = 1.0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = tiny();
    c.dense_widths.clear();
    CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("loss values") {
    CHECK(loss(0.5, 1) == doctest::Approx(std::log(2.0)));
    CHECK(loss(1.0 - 1e-12, 1) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(loss(0.9, 0) == doctest::Approx(-std::log(0.1)));
    CHECK(std::isfinite(loss(0.0, 1)));
    CHECK(loss(0.0, 1) == doctest::Approx(-std::log(1e-7)));
}

TEST_CASE("forward is deterministic and dropout only acts in training") {
    NetworkConfig c = tiny();
    const NetworkParams p = init_params(c);
    Rng rng(3);
    const Matrix input = random_input(rng, c.max_len, c.embed_dim);
    const auto aux = random_aux(rng, c.aux_dim);
    CHECK(forward(p, c, input, aux, true, 5).probability == forward(p, c, input, aux, true, 5).probability);
    CHECK(forward(p, c, input, aux, false, 5).probability == forward(p, c, input, aux, false, 99).probability);

    c.dropout_rate = 0.0;
    CHECK(forward(p, c, input, aux, true, 5).probability == forward(p, c, input, aux, false, 5).probability);

    CHECK_THROWS_AS(forward(p, c, Matrix(5, 4), aux, false, 0), Error);
    CHECK_THROWS_AS(forward(p, c, input, std::vector<double>{1.0}, false, 0), Error);
}

constexpr double kConstantInputProbability = 0.48593003259882028;

TEST_CASE("constant input regression value") {
    NetworkConfig c = tiny();
    c.dense_widths = {4};
    const NetworkParams p = init_params(c);
    Matrix input(c.max_len, c.embed_dim);
    for (double &x : input.data()) x = 0.7;
    const double prob = predict_probability(p, c, input, std::vector<double>{1.0, -0.5});
    CHECK(prob == doctest::Approx(kConstantInputProbability).epsilon(1e-12));
}

TEST_CASE("bidirectional symmetry") {
    NetworkConfig c = tiny();
    c.conv_kernel = 1;
    c.pool_width = 1;
    c.aux_dim = 0;
    NetworkParams p = init_params(c);
    Rng rng(4);
    for (auto &[name, t] : p.tensors()) {
        for (double &x : t->data()) x += rng.uniform(-0.2, 0.2);
    }
    const Matrix input = random_input(rng, c.max_len, c.embed_dim);
    Matrix reversed(c.max_len, c.embed_dim);
    for (std::size_t r = 0; r < c.max_len; ++r) {
        for (std::size_t d = 0; d < c.embed_dim; ++d) reversed(r, d) = input(c.max_len - 1 - r, d);
    }
    NetworkParams swapped = p;
    std::swap(swapped.fwd_wx, swapped.bwd_wx);
    std::swap(swapped.fwd_wh, swapped.bwd_wh);
    std::swap(swapped.fwd_b, swapped.bwd_b);

    const auto a = forward(p, c, input, {}, false, 0).cache.lstm_concat;
    const auto b = forward(swapped, c, reversed, {}, false, 0).cache.lstm_concat;
    const std::size_t H = c.lstm_hidden;
    for (std::size_t j = 0; j < H; ++j) {
        CHECK(b[j] == doctest::Approx(a[H + j]).epsilon(1e-12));
        CHECK(b[H + j] == doctest::Approx(a[j]).epsilon(1e-12));
    }
}

TEST_CASE("pooling over real tokens ignores appended padding") {
    NetworkConfig shorter = tiny();
    NetworkConfig longer = shorter;
    longer.max_len = 10;
    const NetworkParams p = init_params(shorter);
    Rng rng(5);
    const Matrix real = random_input(rng, shorter.max_len, shorter.embed_dim);
    Matrix padded(longer.max_len, longer.embed_dim);
    for (std::size_t r = 0; r < real.rows(); ++r) {
        for (std::size_t d = 0; d < real.cols(); ++d) padded(r, d) = real(r, d);
    }
    const auto aux = std::vector<double>(2, 0.0);
    const auto a = forward(p, shorter, real, aux, false, 0).cache.pooled;
    const auto b = forward(p, longer, padded, aux, false, 0).cache.pooled;
    for (std::size_t t = 0; t < a.rows(); ++t) {
        for (std::size_t f = 0; f < a.cols(); ++f) CHECK(a(t, f) == b(t, f));
    }
}

TEST_CASE("batch gradients are sums") {
    const NetworkConfig c = tiny();
    const NetworkParams p = init_params(c);
    Rng rng(6);
    NetExample ex{random_input(rng, c.max_len, c.embed_dim), random_aux(rng, c.aux_dim), 1};
    const std::vector<NetExample> one{ex}, two{ex, ex};
    const std::vector<std::uint64_t> s1{9}, s2{9, 9};
    double l1 = 0.0, l2 = 0.0;
    const auto g1 = accumulate_gradients(p, c, one, s1, &l1);
    const auto g2 = accumulate_gradients(p, c, two, s2, &l2);
    CHECK(l2 == doctest::Approx(2 * l1));
    const auto t1 = g1.tensors();
    const auto t2 = g2.tensors();
    for (std::size_t t = 0; t < t1.size(); ++t) {
        for (std::size_t k = 0; k < t1[t].second->data().size(); ++k) {
            CHECK(t2[t].second->data()[k] == doctest::Approx(2 * t1[t].second->data()[k]));
        }
    }
    CHECK_THROWS_AS(accumulate_gradients(p, c, two, s1), Error);
}

TEST_CASE("training") {
    NetworkConfig c;
    c.max_len = 10;
    c.embed_dim = 4;
    c.conv_filters = 4;
    c.conv_kernel = 2;
    c.pool_width = 2;
    c.lstm_hidden = 6;
    c.dense_widths = {6};
    c.dropout_rate = 0.0;
    c.learning_rate = 0.01;
    c.epochs = 30;
    c.batch_size = 8;
    c.seed = 2;
    Rng rng(7);
    const auto train = planted(rng, 40, c);
    const auto val = planted(rng, 40, c);

    SUBCASE("keyword task is learned") {
        const auto r = train_network(c, train, val);
        REQUIRE(r.history.size() == c.epochs + 1);
        CHECK(r.history[r.best_epoch].val_macro_f1 >= 0.9);
        CHECK(r.history[r.best_epoch].train_loss <= 0.5 * r.history[0].train_loss);
        const auto again = train_network(c, train, val);
        CHECK(again.params == r.params);
        CHECK(again.best_epoch == r.best_epoch);
    }
    SUBCASE("zero learning rate leaves parameters unchanged") {
        c.learning_rate = 0.0;
        c.epochs = 2;
        CHECK(train_network(c, train, val).params == init_params(c));
    }
    SUBCASE("bad input") {
        CHECK_THROWS_AS(train_network(c, {}, val), Error);
    }
}

TEST_CASE("model files round trip") {
    LstmModel m;
    m.config = tiny();
    m.params = init_params(m.config);
    m.params.conv_w(0, 0) = 1.0 / 3.0;
    m.aux_mean = {0.5, -1e-300};
    m.aux_std = {1.0, 2.0};
    std::stringstream buf;
    write_model(m, buf);
    CHECK(buf.str().rfind("rq-lstm v1\n", 0) == 0);
    CHECK(read_model(buf) == m);
    std::istringstream bad("rq-lstm v9\n");
    CHECK_THROWS_AS(read_model(bad), Error);
    CHECK_THROWS_AS(load_model("/nonexistent/net"), Error);
}
