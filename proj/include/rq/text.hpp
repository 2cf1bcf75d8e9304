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

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rq::text {

using Token = std::string;
using Tokens = std::vector<Token>;

struct CharSpan {
    std::size_t start = 0;
    std::size_t end = 0;  // exclusive

    bool operator==(const CharSpan &) const = default;
};

struct Sentence {
    Tokens tokens;
    std::string raw;
    bool is_question = false;
    CharSpan char_span;
};

struct SegmentedText {
    std::vector<Sentence> sentences;
    std::size_t word_count = 0;  // total tokens across sentences
};

/// Lowercased tokens. Punctuation marks . , ! ? : ; " ( ) become single-character
/// tokens, except inside hashtags, @handles, URLs and emoticons, which stay whole.
Tokens tokenize(std::string_view text);

/// Splits at runs of . ! ? that are followed by whitespace or end of input.
/// A sentence is a question when its terminal run contains '?'.
SegmentedText segment_sentences(std::string_view text);

/// True for tokens that carry no word content: no letters or digits, and not an emoticon.
bool is_punctuation(std::string_view token);

bool is_emoticon(std::string_view token);

/// Number of non-punctuation tokens; the "word count" used for lexicon
/// normalization and the forum length filter.
std::size_t count_words(std::span<const Token> tokens);

std::string join(std::span<const Token> tokens, std::string_view sep = " ");

std::string to_lower(std::string_view s);

}  // namespace rq::text
