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
#include <cstring>
#include <limits>
#include <sstream>

#include "rq/common.hpp"
#include "rq/embeddings.hpp"

using namespace rq;
using namespace rq::embeddings;

namespace {

std::string binary_record(const std::string &token, std::initializer_list<float> values) {
    std::string out = token + " ";
    for (float v : values) {
        char buf[sizeof(float)];
        std::memcpy(buf, &v, sizeof v);
        out.append(buf, sizeof buf);
    }
    return out;
}

EmbeddingTable random_table(Rng &rng, std::size_t vocab, std::size_t dim) {
    EmbeddingTable t(dim);
    std::vector<float> v(dim);
    for (std::size_t i = 0; i < vocab; ++i) {
        for (auto &x : v) x = static_cast<float>(rng.uniform(-10.0, 10.0)) * 1e-3f;
        t.add("tok" + std::to_string(i), v);
    }
    return t;
}

}  // namespace

TEST_CASE("text format parses") {
    std::istringstream in("2 3\nthe 0.1 0.2 0.3\ncat -1 0 1e-2\n");
    const EmbeddingTable t = read_text(in);
    REQUIRE(t.size() == 2);
    CHECK(t.dim() == 3);
    REQUIRE(t.find("cat") != nullptr);
    CHECK(t.find("cat")[2] == 1e-2f);
    CHECK(t.find("dog") == nullptr);
}

TEST_CASE("reference binary file with header 2 3") {
    const std::string bytes =
        "2 3\n" + binary_record("hello", {1.0f, -2.5f, 0.125f}) + "\n" + binary_record("world", {0.0f, 3.0f, -1e-3f});
    std::istringstream in(bytes);
    const EmbeddingTable t = read_binary(in);
    REQUIRE(t.size() == 2);
    CHECK(t.tokens() == std::vector<std::string>{"hello", "world"});
    const float *h = t.find("hello");
    CHECK(h[0] == 1.0f);
    CHECK(h[1] == -2.5f);
    CHECK(h[2] == 0.125f);
    CHECK(t.find("world")[2] == -1e-3f);
}

TEST_CASE("binary round trip is float32 exact") {
    Rng rng(5);
    EmbeddingTable t = random_table(rng, 50, 7);
    const float odd[] = {std::numeric_limits<float>::denorm_min(), -0.0f, 3.4e38f, 1.0f / 3.0f, -7.0f, 0.0f, 1e-30f};
    t.add("odd", odd);
    std::stringstream buf;
    write_binary(t, buf);
    const EmbeddingTable back = read_binary(buf);
    CHECK(back == t);

    std::stringstream text;
    write_text(t, text);
    CHECK(read_text(text) == t);
}

TEST_CASE("malformed input names the problem") {
    std::istringstream bad_row("1 3\nthe 0.1 x 0.3\n");
    try {
        read_text(bad_row);
        FAIL("expected an error");
    } catch (const Error &e) {
        CHECK(std::string(e.what()).find("the") != std::string::npos);
    }
    std::istringstream short_row("1 3\nthe 0.1 0.2\n");
    CHECK_THROWS_AS(read_text(short_row), Error);
    std::istringstream missing("3 2\na 1 2\n");
    CHECK_THROWS_AS(read_text(missing), Error);
    std::istringstream header("bogus\n");
    CHECK_THROWS_AS(read_text(header), Error);

    const std::string full = "1 3\n" + binary_record("abc", {1, 2, 3});
    std::istringstream truncated(full.substr(0, full.size() - 2));
    try {
        read_binary(truncated);
        FAIL("expected an error");
    } catch (const Error &e) {
        CHECK(std::string(e.what()).find("abc") != std::string::npos);
    }
    CHECK_THROWS_AS(load_embeddings("/nonexistent/vectors.bin", Format::binary), Error);
    CHECK_THROWS_AS(parse_format("csv"), Error);
}

TEST_CASE("table rejects duplicates and wrong widths") {
    EmbeddingTable t(2);
    const float v[] = {1, 2};
    t.add("a", v);
    CHECK_THROWS_AS(t.add("a", v), Error);
    const float w[] = {1, 2, 3};
    CHECK_THROWS_AS(t.add("b", w), Error);
}

TEST_CASE("average_embedding") {
    EmbeddingTable t(2);
    const float a[] = {1, 2}, b[] = {3, -2};
    t.add("a", a);
    t.add("b", b);
    const text::Tokens toks{"a", "zzz", "b"};
    CHECK(average_embedding(toks, t) == std::vector<double>{2.0, 0.0});
    CHECK(average_embedding(text::Tokens{"zzz"}, t) == std::vector<double>{0.0, 0.0});
    CHECK(average_embedding(text::Tokens{}, t) == std::vector<double>{0.0, 0.0});
}

TEST_CASE("embedding_matrix pads, truncates and zeroes OOV rows") {
    EmbeddingTable t(2);
    const float a[] = {1, 2}, b[] = {3, 4};
    t.add("a", a);
    t.add("b", b);
    const Matrix m = embedding_matrix(text::Tokens{"a", "x", "b"}, t, 5);
    CHECK(m.rows() == 5);
    CHECK(m(0, 1) == 2.0);
    CHECK(m(1, 0) == 0.0);
    CHECK(m(2, 0) == 3.0);
    CHECK(m(4, 1) == 0.0);
    const Matrix tail = embedding_matrix(text::Tokens{"a", "b", "b"}, t, 2);
    CHECK(tail(0, 0) == 3.0);
    CHECK(tail(1, 0) == 3.0);
    CHECK_THROWS_AS(embedding_matrix(text::Tokens{"a"}, t, 0), Error);
}

TEST_CASE("average_embedding properties") {
    Rng rng(17);
    const EmbeddingTable t = random_table(rng, 30, 4);
    for (int trial = 0; trial < 200; ++trial) {
        text::Tokens toks;
        const std::size_t n = rng.below(12);
        for (std::size_t i = 0; i < n; ++i) {
            toks.push_back(rng.uniform() < 0.2 ? "oov" + std::to_string(i) : t.tokens()[rng.below(t.size())]);
        }
        const auto avg = average_embedding(toks, t);
        text::Tokens shuffled = toks;
        rng.shuffle(shuffled);
        const auto avg2 = average_embedding(shuffled, t);
        double bound = 0.0;
        for (const auto &tok : toks) {
            if (const float *v = t.find(tok)) {
                for (std::size_t d = 0; d < t.dim(); ++d) bound = std::max(bound, std::abs(double(v[d])));
            }
        }
        for (std::size_t d = 0; d < t.dim(); ++d) {
            CHECK(avg[d] == doctest::Approx(avg2[d]).epsilon(1e-12));
            CHECK(std::abs(avg[d]) <= bound + 1e-12);
        }
    }
}
