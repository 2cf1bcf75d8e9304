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

#include "rq/rq_extract.hpp"

#include "rq/common.hpp"

namespace rq::extract {

using text::Sentence;

std::string to_string(ContextMode m) {
    switch (m) {
        case ContextMode::rq: return "rq";
        case ContextMode::pre_rq: return "pre-rq";
        case ContextMode::rq_post: return "rq-post";
        case ContextMode::full: return "full";
    }
    return "?";
}

ContextMode parse_context_mode(const std::string &s) {
    if (s == "rq") return ContextMode::rq;
    if (s == "pre-rq") return ContextMode::pre_rq;
    if (s == "rq-post") return ContextMode::rq_post;
    if (s == "full") return ContextMode::full;
    throw Error("unknown context mode '" + s + "' (expected rq|pre-rq|rq-post|full)");
}

std::vector<RQInstance> extract_rqs(const text::SegmentedText &turn, const ExtractOptions &options) {
    std::vector<RQInstance> out;
    const auto &s = turn.sentences;
    if (options.apply_length_filter) {
        std::size_t words = 0;
        for (const auto &sentence : s) words += text::count_words(sentence.tokens);
        if (words < options.min_words || words > options.max_words) return out;
    }
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        if (!s[i].is_question || s[i + 1].is_question) continue;
        RQInstance inst;
        inst.pre.assign(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(i));
        inst.question = s[i];
        std::size_t j = i + 1;
        while (j < s.size() && !s[j].is_question && inst.self_answer.size() < options.max_self_answer) {
            inst.self_answer.push_back(s[j]);
            ++j;
        }
        inst.post.assign(s.begin() + static_cast<std::ptrdiff_t>(j), s.end());
        out.push_back(std::move(inst));
    }
    return out;
}

namespace {

void append(text::Tokens &out, const std::vector<Sentence> &sentences) {
    for (const auto &sentence : sentences) out.insert(out.end(), sentence.tokens.begin(), sentence.tokens.end());
}

}  // namespace

text::Tokens context_view(const RQInstance &instance, ContextMode mode) {
    text::Tokens out;
    if (mode == ContextMode::pre_rq || mode == ContextMode::full) append(out, instance.pre);
    out.insert(out.end(), instance.question.tokens.begin(), instance.question.tokens.end());
    append(out, instance.self_answer);
    if (mode == ContextMode::rq_post || mode == ContextMode::full) append(out, instance.post);
    return out;
}

std::size_t view_sentence_count(const RQInstance &instance, ContextMode mode) {
    std::size_t n = 1 + instance.self_answer.size();
    if (mode == ContextMode::pre_rq || mode == ContextMode::full) n += instance.pre.size();
    if (mode == ContextMode::rq_post || mode == ContextMode::full) n += instance.post.size();
    return n;
}

std::string joined_raw(const std::vector<Sentence> &sentences) {
    std::string out;
    for (const auto &sentence : sentences) {
        if (!out.empty()) out += ' ';
        out += sentence.raw;
    }
    return out;
}

namespace {

Sentence merged_sentence(const std::string &raw) {
    const auto seg = text::segment_sentences(raw);
    Sentence merged;
    merged.raw = raw;
    merged.char_span = {0, raw.size()};
    for (const auto &sentence : seg.sentences) {
        merged.tokens.insert(merged.tokens.end(), sentence.tokens.begin(), sentence.tokens.end());
        merged.is_question = merged.is_question || sentence.is_question;
    }
    return merged;
}

}  // namespace

RQInstance instance_from_segments(const std::string &pre, const std::string &question,
                                  const std::string &self_answer, const std::string &post) {
    RQInstance inst;
    inst.pre = text::segment_sentences(pre).sentences;
    inst.question = merged_sentence(question);
    inst.self_answer = text::segment_sentences(self_answer).sentences;
    inst.post = text::segment_sentences(post).sentences;
    return inst;
}

RQInstance instance_from_text(const std::string &text) {
    RQInstance inst;
    inst.question = merged_sentence(text);
    return inst;
}

}  // namespace rq::extract
