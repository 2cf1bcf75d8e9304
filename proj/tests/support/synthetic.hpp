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
#include <string>
#include <vector>

#include "rq/corpus.hpp"
#include "rq/embeddings.hpp"
#include "rq/lexicon.hpp"

namespace rq::testing {

/// A corpus of extracted instances where one lexicon category (`planted`)
/// appears in the self-answer of every sarcastic instance and never otherwise.
/// All other words are in-vocabulary filler whose vectors carry no label signal;
/// the planted word itself is out of vocabulary.
struct SyntheticCorpus {
    std::vector<corpus::Record> records;
    embeddings::EmbeddingTable table;
    lexicon::Lexicon lexicon;
    std::string lexicon_text;
    std::vector<std::string> categories;  // planted first
    std::string planted;
};

SyntheticCorpus make_synthetic(std::size_t n, std::uint64_t seed, std::size_t dim = 16);

/// Writes train.lines, test.lines, all.lines, embeddings.txt and lexicon.dic
/// into `dir` using a stratified split.
void write_synthetic(const SyntheticCorpus &corpus, const std::filesystem::path &dir, double train_frac,
                     std::uint64_t seed);

/// Fresh empty directory under the system temp directory.
std::filesystem::path scratch_dir(const std::string &name);

}  // namespace rq::testing
