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

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rq/matrix.hpp"
#include "rq/text.hpp"

namespace rq::embeddings {

enum class Format { text, binary };

Format parse_format(const std::string &s);

/// Vocabulary → float32 vectors of one fixed dimension, in file order.
class EmbeddingTable {
public:
    EmbeddingTable() = default;
    explicit EmbeddingTable(std::size_t dim);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return tokens_.size(); }

    /// Throws on dimension mismatch or a repeated token.
    void add(const std::string &token, std::span<const float> vector);

    /// Null when the token is out of vocabulary.
    const float *find(std::string_view token) const;

    const std::vector<std::string> &tokens() const { return tokens_; }
    std::span<const float> vector(std::size_t index) const { return {values_.data() + index * dim_, dim_}; }

    bool operator==(const EmbeddingTable &other) const {
        return dim_ == other.dim_ && tokens_ == other.tokens_ && values_ == other.values_;
    }

private:
    std::size_t dim_ = 0;
    std::vector<std::string> tokens_;
    std::vector<float> values_;
    std::unordered_map<std::string, std::size_t> index_;
};

EmbeddingTable load_embeddings(const std::filesystem::path &path, Format format);
EmbeddingTable read_text(std::istream &in);
EmbeddingTable read_binary(std::istream &in);

void save_embeddings(const EmbeddingTable &table, const std::filesystem::path &path, Format format);
void write_text(const EmbeddingTable &table, std::ostream &out);
void write_binary(const EmbeddingTable &table, std::ostream &out);

/// Mean of the in-vocabulary token vectors; zero vector when none are known.
std::vector<double> average_embedding(std::span<const text::Token> tokens, const EmbeddingTable &table);

/// max_len × dim matrix of token vectors. OOV tokens and padding rows are zero.
/// Longer inputs keep their last max_len tokens.
Matrix embedding_matrix(std::span<const text::Token> tokens, const EmbeddingTable &table, std::size_t max_len);

}  // namespace rq::embeddings
