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

#include "rq/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "rq/common.hpp"

namespace rq::lexicon {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

bool punctuation_match(std::string_view category, std::string_view token) {
    if (token.size() != 1) return false;
    const char c = token[0];
    if (category == "Comma") return c == ',';
    if (category == "Colon") return c == ':';
    if (category == "Semicolon") return c == ';';
    if (category == "Parenthesis") return c == '(' || c == ')';
    if (category == "QuoteMarks") return c == '"';
    if (category == "ExclamationMarks") return c == '!';
    return false;
}

bool is_punctuation_category(std::string_view name) {
    return std::find(std::begin(kPunctuationCategories), std::end(kPunctuationCategories), name) !=
           std::end(kPunctuationCategories);
}

}  // namespace

bool Category::matches(std::string_view token) const {
    if (literals.contains(std::string(token))) return true;
    return std::any_of(prefixes.begin(), prefixes.end(),
                       [&](const std::string &p) { return token.starts_with(p); });
}

bool is_builtin_category(std::string_view name) {
    return is_punctuation_category(name) || name == kWordCount || name == kWordsPerSentence;
}

void Lexicon::add_category(const std::string &name, const std::vector<std::string> &entries) {
    if (name.empty()) throw Error("category name must be nonempty");
    if (is_builtin_category(name)) throw Error("category '" + name + "' is built in and cannot be redefined");
    if (categories_.contains(name)) throw Error("duplicate category '" + name + "'");
    if (entries.empty()) throw Error("category '" + name + "' has no entries");
    Category cat;
    for (const auto &raw : entries) {
        const std::string entry = text::to_lower(raw);
        if (entry.empty()) throw Error("category '" + name + "' has an empty entry");
        if (entry.back() == '*') {
            std::string stem = entry.substr(0, entry.size() - 1);
            if (stem.empty()) throw Error("category '" + name + "' has a prefix pattern with empty stem");
            cat.prefixes.push_back(std::move(stem));
        } else {
            cat.literals.insert(entry);
        }
    }
    categories_.emplace(name, std::move(cat));
}

bool Lexicon::has_category(std::string_view name) const {
    return categories_.find(name) != categories_.end() || is_builtin_category(name);
}

std::vector<double> CategoryScores::values() const {
    std::vector<double> v;
    v.reserve(scores.size());
    for (const auto &[name, value] : scores) v.push_back(value);
    return v;
}

Lexicon parse_lexicon(std::string_view contents, const std::string &origin) {
    Lexicon lex;
    std::istringstream in{std::string(contents)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        try {
            const auto colon = t.find(':');
            if (colon == std::string::npos) throw Error("expected `Name: entries`");
            const std::string name = trim(std::string_view(t).substr(0, colon));
            std::vector<std::string> entries;
            std::istringstream list(t.substr(colon + 1));
            std::string item;
            while (std::getline(list, item, ',')) {
                item = trim(item);
                if (!item.empty()) entries.push_back(item);
            }
            lex.add_category(name, entries);
        } catch (const Error &e) {
            throw Error(origin + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return lex;
}

Lexicon load_lexicon(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open lexicon " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_lexicon(buf.str(), path.string());
}

CategoryScores score(std::span<const text::Token> tokens, std::size_t sentences, const Lexicon &lexicon,
                     std::span<const std::string> selected) {
    for (const auto &name : selected) {
        if (!lexicon.has_category(name)) throw Error("unknown category '" + name + "'");
    }
    CategoryScores out;
    const std::size_t words = text::count_words(tokens);
    out.word_count = static_cast<double>(words);
    out.words_per_sentence = sentences > 0 ? out.word_count / static_cast<double>(sentences) : 0.0;

    for (const auto &name : selected) {
        double value = 0.0;
        if (name == kWordCount) {
            value = out.word_count;
        } else if (name == kWordsPerSentence) {
            value = out.words_per_sentence;
        } else if (words > 0) {
            std::size_t hits = 0;
            if (is_punctuation_category(name)) {
                for (const auto &tok : tokens) hits += punctuation_match(name, tok) ? 1 : 0;
            } else {
                const Category &cat = lexicon.categories().find(name)->second;
                for (const auto &tok : tokens) hits += cat.matches(tok) ? 1 : 0;
            }
            value = static_cast<double>(hits) / static_cast<double>(words);
        }
        out.scores.emplace_back(name, value);
    }
    return out;
}

const std::vector<std::string> &domain_categories(corpus::Domain domain) {
    static const std::vector<std::string> forums = {
        "2ndPerson",        "3rdPersonPlural", "3rdPersonSingular", "Adverbs",     "Affiliation",
        "Assent",           "AuxiliaryVerbs",  "Compare",           "ExclamationMarks", "FocusFuture",
        "Friends",          "Function",        "Health",            "Informal",    "Interrogatives",
        "Netspeak",         "Numerals",        "Quantifiers",       "Rewards",     "Sadness"};
    static const std::vector<std::string> twitter = {
        "2ndPerson",  "3rdPersonPlural", "Articles",   "AuxiliaryVerbs", "Certainty",
        "Colon",      "Comma",           "Conjunction", "Friends",       "Male",
        "Negations",  "NegativeEmotion", "Parenthesis", "QuoteMarks",    "Risk",
        "Sadness",    "Semicolon",       "SwearWords",  "WordCount",     "WordsPerSentence"};
    switch (domain) {
        case corpus::Domain::forums: return forums;
        case corpus::Domain::twitter: return twitter;
    }
    throw Error("unknown domain");
}

}  // namespace rq::lexicon
