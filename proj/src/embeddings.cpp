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

#include "rq/embeddings.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rq/common.hpp"

namespace rq::embeddings {

Format parse_format(const std::string &s) {
    if (s == "text") return Format::text;
    if (s == "binary") return Format::binary;
    throw Error("unknown embedding format '" + s + "' (expected text|binary)");
}

EmbeddingTable::EmbeddingTable(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw Error("embedding dimension must be positive");
}

void EmbeddingTable::add(const std::string &token, std::span<const float> vector) {
    if (vector.size() != dim_) {
        throw Error("embedding for '" + token + "' has " + std::to_string(vector.size()) + " components, expected " +
                    std::to_string(dim_));
    }
    if (!index_.emplace(token, tokens_.size()).second) throw Error("duplicate embedding token '" + token + "'");
    tokens_.push_back(token);
    values_.insert(values_.end(), vector.begin(), vector.end());
}

const float *EmbeddingTable::find(std::string_view token) const {
    auto it = index_.find(std::string(token));
    return it == index_.end() ? nullptr : values_.data() + it->second * dim_;
}

namespace {

struct Header {
    std::size_t vocab = 0;
    std::size_t dim = 0;
};

Header parse_header(const std::string &line) {
    std::istringstream hs(line);
    long long v = -1, d = -1;
    if (!(hs >> v >> d) || v < 0 || d <= 0) throw Error("embedding header must be `V D`, got '" + line + "'");
    std::string rest;
    if (hs >> rest) throw Error("embedding header must be `V D`, got '" + line + "'");
    return {static_cast<std::size_t>(v), static_cast<std::size_t>(d)};
}

float parse_float(const std::string &s, const std::string &token) {
    char *end = nullptr;
    const float v = std::strtof(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw Error("bad component '" + s + "' for token '" + token + "'");
    return v;
}

float load_le_float(const unsigned char *b) {
    std::uint32_t bits = std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
                         (std::uint32_t(b[3]) << 24);
    return std::bit_cast<float>(bits);
}

void store_le_float(float f, unsigned char *b) {
    const auto bits = std::bit_cast<std::uint32_t>(f);
    b[0] = static_cast<unsigned char>(bits);
    b[1] = static_cast<unsigned char>(bits >> 8);
    b[2] = static_cast<unsigned char>(bits >> 16);
    b[3] = static_cast<unsigned char>(bits >> 24);
}

}  // namespace

EmbeddingTable read_text(std::istream &in) {
    std::string line;
    if (!std::getline(in, line)) throw Error("empty embedding file");
    const Header h = parse_header(line);
    EmbeddingTable table(h.dim);
    std::vector<float> vec;
    std::vector<std::string> fields;
    for (std::size_t row = 0; row < h.vocab; ++row) {
        if (!std::getline(in, line)) {
            throw Error("embedding file ended after " + std::to_string(row) + " of " + std::to_string(h.vocab) + " rows");
        }
        std::istringstream ls(line);
        fields.clear();
        std::string f;
        while (ls >> f) fields.push_back(f);
        if (fields.empty()) throw Error("blank embedding row " + std::to_string(row + 1));
        const std::string &token = fields[0];
        if (fields.size() - 1 != h.dim) {
            throw Error("embedding for '" + token + "' has " + std::to_string(fields.size() - 1) +
                        " components, expected " + std::to_string(h.dim));
        }
        vec.clear();
        for (std::size_t k = 1; k < fields.size(); ++k) vec.push_back(parse_float(fields[k], token));
        table.add(token, vec);
    }
    return table;
}

EmbeddingTable read_binary(std::istream &in) {
    std::string line;
    if (!std::getline(in, line)) throw Error("empty embedding file");
    const Header h = parse_header(line);
    EmbeddingTable table(h.dim);
    std::vector<unsigned char> buf(h.dim * 4);
    std::vector<float> vec(h.dim);
    for (std::size_t row = 0; row < h.vocab; ++row) {
        std::string token;
        int c = in.get();
        // Tolerate the newline the reference word2vec tool writes after each vector.
        while (c == '\n') c = in.get();
        while (c != EOF && c != ' ') {
            token.push_back(static_cast<char>(c));
            c = in.get();
        }
        if (c == EOF) throw Error("truncated binary embedding stream at row " + std::to_string(row + 1));
        if (token.empty()) throw Error("empty token at binary embedding row " + std::to_string(row + 1));
        in.read(reinterpret_cast<char *>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (in.gcount() != static_cast<std::streamsize>(buf.size())) {
            throw Error("truncated binary embedding stream in vector for '" + token + "'");
        }
        for (std::size_t k = 0; k < h.dim; ++k) vec[k] = load_le_float(buf.data() + 4 * k);
        table.add(token, vec);
    }
    return table;
}

EmbeddingTable load_embeddings(const std::filesystem::path &path, Format format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open embeddings " + path.string());
    try {
        return format == Format::text ? read_text(in) : read_binary(in);
    } catch (const Error &e) {
        throw Error(path.string() + ": " + e.what());
    }
}

void write_text(const EmbeddingTable &table, std::ostream &out) {
    out << table.size() << ' ' << table.dim() << '\n';
    char num[32];
    for (std::size_t i = 0; i < table.size(); ++i) {
        out << table.tokens()[i];
        for (float v : table.vector(i)) {
            std::snprintf(num, sizeof num, "%.9g", static_cast<double>(v));
            out << ' ' << num;
        }
        out << '\n';
    }
}

void write_binary(const EmbeddingTable &table, std::ostream &out) {
    out << table.size() << ' ' << table.dim() << '\n';
    std::vector<unsigned char> buf(table.dim() * 4);
    for (std::size_t i = 0; i < table.size(); ++i) {
        out << table.tokens()[i] << ' ';
        const auto v = table.vector(i);
        for (std::size_t k = 0; k < v.size(); ++k) store_le_float(v[k], buf.data() + 4 * k);
        out.write(reinterpret_cast<const char *>(buf.data()), static_cast<std::streamsize>(buf.size()));
    }
}

void save_embeddings(const EmbeddingTable &table, const std::filesystem::path &path, Format format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    format == Format::text ? write_text(table, out) : write_binary(table, out);
}

std::vector<double> average_embedding(std::span<const text::Token> tokens, const EmbeddingTable &table) {
    std::vector<double> sum(table.dim(), 0.0);
    std::size_t used = 0;
    for (const auto &tok : tokens) {
        const float *v = table.find(tok);
        if (!v) continue;
        for (std::size_t k = 0; k < table.dim(); ++k) sum[k] += v[k];
        ++used;
    }
    if (used > 0) {
        for (double &x : sum) x /= static_cast<double>(used);
    }
    return sum;
}

Matrix embedding_matrix(std::span<const text::Token> tokens, const EmbeddingTable &table, std::size_t max_len) {
    if (max_len == 0) throw Error("embedding_matrix: max_len must be positive");
    Matrix m(max_len, table.dim());
    const std::size_t skip = tokens.size() > max_len ? tokens.size() - max_len : 0;
    for (std::size_t i = skip; i < tokens.size(); ++i) {
        const float *v = table.find(tokens[i]);
        if (!v) continue;
        auto row = m.row(i - skip);
        for (std::size_t k = 0; k < table.dim(); ++k) row[k] = v[k];
    }
    return m;
}

}  // namespace rq::embeddings
