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

#include "rq/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace rq::text {

namespace {

constexpr std::string_view kSplitMarks = ".,!?:;\"()";

// Compared lowercase, so ":D" and "xD" are listed as ":d" and "xd".
constexpr std::array<std::string_view, 24> kEmoticons = {
    ":)", ":-)", ";)", ";-)", ":(", ":-(", ":d", ":-d", ":p", ":-p", ";p", ":/",
    ":-/", ":o", ":'(", "8)", "8-)", "b-)", ":|", "xd", "<3", "^_^", ":]", "=)"};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool is_split_mark(char c) { return kSplitMarks.find(c) != std::string_view::npos; }
bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

bool starts_with_ci(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
    }
    return true;
}

bool is_url(std::string_view chunk) {
    return starts_with_ci(chunk, "http://") || starts_with_ci(chunk, "https://") ||
           starts_with_ci(chunk, "www.");
}

void push_lower(Tokens &out, std::string_view s) {
    if (!s.empty()) out.push_back(to_lower(s));
}

// Emits the marks trailing a whole-kept token (URL) as separate tokens.
std::string_view peel_trailing_marks(std::string_view chunk, Tokens &tail) {
    std::size_t end = chunk.size();
    while (end > 0 && is_split_mark(chunk[end - 1])) --end;
    for (std::size_t i = end; i < chunk.size(); ++i) tail.emplace_back(1, chunk[i]);
    return chunk.substr(0, end);
}

void tokenize_chunk(std::string_view chunk, Tokens &out) {
    if (is_emoticon(chunk)) {
        push_lower(out, chunk);
        return;
    }
    if (is_url(chunk)) {
        Tokens tail;
        push_lower(out, peel_trailing_marks(chunk, tail));
        out.insert(out.end(), tail.begin(), tail.end());
        return;
    }
    std::size_t i = 0;
    std::size_t word_start = 0;
    auto flush = [&](std::size_t upto) {
        push_lower(out, chunk.substr(word_start, upto - word_start));
    };
    while (i < chunk.size()) {
        const char c = chunk[i];
        const bool tag_start = (c == '#' || c == '@') && i == word_start && i + 1 < chunk.size() &&
                               (is_alnum(chunk[i + 1]) || chunk[i + 1] == '_');
        if (tag_start) {
            std::size_t j = i + 1;
            while (j < chunk.size() && (is_alnum(chunk[j]) || chunk[j] == '_')) ++j;
            push_lower(out, chunk.substr(i, j - i));
            i = j;
            word_start = j;
            continue;
        }
        if (is_split_mark(c)) {
            flush(i);
            out.emplace_back(1, c);
            ++i;
            word_start = i;
            continue;
        }
        ++i;
    }
    flush(chunk.size());
}

}  // namespace

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char &c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool is_emoticon(std::string_view token) {
    const std::string lower = to_lower(token);
    return std::find(kEmoticons.begin(), kEmoticons.end(), std::string_view(lower)) != kEmoticons.end();
}

bool is_punctuation(std::string_view token) {
    if (token.empty() || is_emoticon(token)) return false;
    return std::none_of(token.begin(), token.end(), is_alnum);
}

std::size_t count_words(std::span<const Token> tokens) {
    return static_cast<std::size_t>(
        std::count_if(tokens.begin(), tokens.end(), [](const Token &t) { return !is_punctuation(t); }));
}

std::string join(std::span<const Token> tokens, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += sep;
        out += tokens[i];
    }
    return out;
}

Tokens tokenize(std::string_view text) {
    Tokens out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) ++i;
        const std::size_t start = i;
        while (i < text.size() && !is_space(text[i])) ++i;
        if (i > start) tokenize_chunk(text.substr(start, i - start), out);
    }
    return out;
}

SegmentedText segment_sentences(std::string_view text) {
    SegmentedText seg;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        while (i < n && is_space(text[i])) ++i;
        if (i >= n) break;
        const std::size_t start = i;
        bool question = false;
        std::size_t end = n;
        while (i < n) {
            if (is_terminal(text[i])) {
                std::size_t j = i;
                bool has_q = false;
                while (j < n && is_terminal(text[j])) {
                    has_q = has_q || text[j] == '?';
                    ++j;
                }
                if (j == n || is_space(text[j])) {
                    end = j;
                    question = has_q;
                    i = j;
                    break;
                }
                i = j;
                continue;
            }
            ++i;
        }
        if (end == n) {
            // Trailing text without terminal punctuation: trim trailing whitespace.
            std::size_t e = n;
            while (e > start && is_space(text[e - 1])) --e;
            end = e;
            i = n;
        }
        Sentence s;
        s.raw = std::string(text.substr(start, end - start));
        s.tokens = tokenize(s.raw);
        s.is_question = question;
        s.char_span = {start, end};
        seg.word_count += s.tokens.size();
        seg.sentences.push_back(std::move(s));
    }
    return seg;
}

}  // namespace rq::text
