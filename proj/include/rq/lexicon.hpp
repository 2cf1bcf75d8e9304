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
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "rq/corpus.hpp"
#include "rq/text.hpp"

namespace rq::lexicon {

/// Word list for one category: literal tokens plus `stem*` prefix patterns.
struct Category {
    std::unordered_set<std::string> literals;
    std::vector<std::string> prefixes;

    bool matches(std::string_view token) const;
};

/// Categories computed from punctuation tokens. Always available, never loaded from file.
inline constexpr std::string_view kPunctuationCategories[] = {"Comma",       "Colon",      "Semicolon",
                                                             "Parenthesis", "QuoteMarks", "ExclamationMarks"};
inline constexpr std::string_view kWordCount = "WordCount";
inline constexpr std::string_view kWordsPerSentence = "WordsPerSentence";

/// True for the punctuation and structural categories, which a dictionary file may not define.
bool is_builtin_category(std::string_view name);

class Lexicon {
public:
    Lexicon() = default;

    /// Adds a lexical category; entries ending in `*` become prefix patterns.
    void add_category(const std::string &name, const std::vector<std::string> &entries);

    bool has_category(std::string_view name) const;
    const std::map<std::string, Category, std::less<>> &categories() const { return categories_; }

private:
    std::map<std::string, Category, std::less<>> categories_;
};

struct CategoryScores {
    std::vector<std::pair<std::string, double>> scores;  // in requested order
    double word_count = 0.0;
    double words_per_sentence = 0.0;

    std::vector<double> values() const;
};

/// Reads `Name: entry, entry, stem*` lines; `#` starts a comment line.
Lexicon load_lexicon(const std::filesystem::path &path);
Lexicon parse_lexicon(std::string_view contents, const std::string &origin = "<string>");

/// Match counts normalized by the non-punctuation token count. `WordCount`
/// and `WordsPerSentence` are reported raw.
CategoryScores score(std::span<const text::Token> tokens, std::size_t sentences, const Lexicon &lexicon,
                     std::span<const std::string> selected);

/// The 20 categories used as features for a domain, in a fixed order.
const std::vector<std::string> &domain_categories(corpus::Domain domain);

}  // namespace rq::lexicon
