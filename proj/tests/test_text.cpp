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

#include "rq/common.hpp"
#include "rq/text.hpp"
#include "support/random_text.hpp"

using namespace rq::text;

TEST_CASE("tokenize splits punctuation and lowercases") {
    CHECK(tokenize("Can you read?") == Tokens{"can", "you", "read", "?"});
    CHECK(tokenize("") == Tokens{});
    CHECK(tokenize("   \t ") == Tokens{});
    CHECK(tokenize("Wait, WAIT!!") == Tokens{"wait", ",", "wait", "!", "!"});
    CHECK(tokenize("(really) \"so\"") == Tokens{"(", "really", ")", "\"", "so", "\""});
}

TEST_CASE("tokenize keeps emoticons, tags, handles and urls whole") {
    CHECK(tokenize("winking ;) now") == Tokens{"winking", ";)", "now"});
    CHECK(tokenize("roll-eyes 8-) ok") == Tokens{"roll-eyes", "8-)", "ok"});
    CHECK(tokenize("happy :)") == Tokens{"happy", ":)"});
    CHECK(tokenize("#NFLlogic #cowboys") == Tokens{"#nfllogic", "#cowboys"});
    CHECK(tokenize("#whatever.") == Tokens{"#whatever", "."});
    CHECK(tokenize("hi @bob, bye") == Tokens{"hi", "@bob", ",", "bye"});
    CHECK(tokenize("see http://x.com/a?b=1.") == Tokens{"see", "http://x.com/a?b=1", "."});
    CHECK(tokenize("you're can't") == Tokens{"you're", "can't"});
}

TEST_CASE("segment_sentences marks questions by the terminal run") {
    auto s = segment_sentences("Can you read? You never listen.");
    REQUIRE(s.sentences.size() == 2);
    CHECK(s.sentences[0].is_question);
    CHECK_FALSE(s.sentences[1].is_question);
    CHECK(s.sentences[0].raw == "Can you read?");

    s = segment_sentences("How obscene!!");
    REQUIRE(s.sentences.size() == 1);
    CHECK_FALSE(s.sentences[0].is_question);

    s = segment_sentences("wait...what?!");
    REQUIRE(s.sentences.size() == 1);
    CHECK(s.sentences[0].is_question);

    s = segment_sentences("First one. trailing words");
    REQUIRE(s.sentences.size() == 2);
    CHECK(s.sentences[1].raw == "trailing words");
    CHECK_FALSE(s.sentences[1].is_question);

    CHECK(segment_sentences("").sentences.empty());
    CHECK(segment_sentences("  ").sentences.empty());
}

TEST_CASE("word counting ignores punctuation but keeps emoticons") {
    const Tokens t = tokenize("Can you read? ;) !!");
    CHECK(count_words(t) == 4);
    CHECK(is_punctuation("?"));
    CHECK(is_punctuation("-"));
    CHECK_FALSE(is_punctuation(";)"));
    CHECK_FALSE(is_punctuation("a"));
}

TEST_CASE("segmentation properties hold on random text") {
    rq::Rng rng(20261018);
    for (int trial = 0; trial < 500; ++trial) {
        const std::string input = rq::testing::random_turn(rng);
        const auto seg = segment_sentences(input);

        // Raw spans plus the original whitespace between them rebuild the input.
        std::string rebuilt;
        std::size_t cursor = 0;
        std::size_t total = 0;
        for (const auto &s : seg.sentences) {
            REQUIRE(s.char_span.start >= cursor);
            rebuilt += input.substr(cursor, s.char_span.start - cursor);
            REQUIRE(input.substr(s.char_span.start, s.char_span.end - s.char_span.start) == s.raw);
            rebuilt += s.raw;
            cursor = s.char_span.end;
            REQUIRE_FALSE(s.tokens.empty());
            total += s.tokens.size();
        }
        rebuilt += input.substr(cursor);
        CHECK(rebuilt == input);
        CHECK(seg.word_count == total);
        if (input.find_first_not_of(" \t\n") != std::string::npos) CHECK(seg.word_count >= seg.sentences.size());

        // Re-tokenizing the space-joined tokens is a fixed point.
        const Tokens once = tokenize(input);
        CHECK(tokenize(join(once)) == once);
    }
}
