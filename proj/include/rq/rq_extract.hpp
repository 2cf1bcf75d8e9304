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

#include <optional>
#include <string>
#include <vector>

#include "rq/text.hpp"

namespace rq::extract {

/// A question answered by its own speaker, with the surrounding turn split
/// into the context before it and the context after the self-answer.
struct RQInstance {
    std::vector<text::Sentence> pre;
    text::Sentence question;
    std::vector<text::Sentence> self_answer;
    std::vector<text::Sentence> post;
    std::string source_id;
};

enum class ContextMode { rq, pre_rq, rq_post, full };

inline constexpr ContextMode kAllContextModes[] = {ContextMode::rq, ContextMode::pre_rq, ContextMode::rq_post,
                                                   ContextMode::full};

std::string to_string(ContextMode m);  // "rq", "pre-rq", "rq-post", "full"
ContextMode parse_context_mode(const std::string &s);

struct ExtractOptions {
    std::size_t min_words = 10;
    std::size_t max_words = 150;
    bool apply_length_filter = true;
    /// Longest self-answer run; the remaining statements move to `post`.
    std::size_t max_self_answer = 3;
};

/// Every mid-turn question immediately followed by a statement from the same
/// speaker, ordered by position. With the length filter on, turns whose word
/// count falls outside [min_words, max_words] yield nothing.
std::vector<RQInstance> extract_rqs(const text::SegmentedText &turn, const ExtractOptions &options = {});

text::Tokens context_view(const RQInstance &instance, ContextMode mode);

/// Number of sentences covered by a view.
std::size_t view_sentence_count(const RQInstance &instance, ContextMode mode);

/// Concatenated raw text of a sentence run, single-space separated.
std::string joined_raw(const std::vector<text::Sentence> &sentences);

/// Rebuilds an instance from stored segment strings (the extracted-record fields).
RQInstance instance_from_segments(const std::string &pre, const std::string &question,
                                  const std::string &self_answer, const std::string &post);

/// Treats a whole text as the question segment. Used for standalone
/// information-seeking questions, which have no self-answer.
RQInstance instance_from_text(const std::string &text);

}  // namespace rq::extract
