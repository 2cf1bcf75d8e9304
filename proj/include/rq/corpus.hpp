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

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rq/common.hpp"

namespace rq::corpus {

enum class Domain { forums, twitter };

enum class HashtagLabel { sarcastic, none };

/// Class a record resolves to. `ambiguous` only arises from a 2-of-5 vote.
enum class ResolvedClass { sarcastic, other, rq, factual, ambiguous };

enum class VoteOutcome { sarcastic, other, ambiguous };

std::string to_string(Domain d);
std::string to_string(HashtagLabel h);
std::string to_string(ResolvedClass c);
Domain parse_domain(const std::string &s);
ResolvedClass parse_class(const std::string &s);

struct Record {
    std::string id;
    Domain domain = Domain::forums;
    std::string text;
    std::optional<std::vector<int>> votes;
    std::optional<HashtagLabel> hashtag_label;
    std::optional<ResolvedClass> gold;
    /// Additional string fields carried through unchanged (e.g. the extracted
    /// `pre`/`question`/`self_answer`/`post` segments). Serialized in key order.
    std::map<std::string, std::string> extra;
};

/// The two classes of a binary task; `positive` maps to Label::positive.
struct Task {
    ResolvedClass positive;
    ResolvedClass negative;

    bool operator==(const Task &) const = default;
};

inline constexpr Task kSarcasmTask{ResolvedClass::sarcastic, ResolvedClass::other};
inline constexpr Task kQuestionTask{ResolvedClass::rq, ResolvedClass::factual};

class Dataset {
public:
    Dataset() = default;

    /// Validates record invariants, resolves labels and checks that all
    /// non-ambiguous classes come from a single binary task.
    explicit Dataset(std::vector<Record> records);

    const std::vector<Record> &records() const { return records_; }
    const std::map<std::string, ResolvedClass> &label_map() const { return label_map_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    ResolvedClass class_of(const std::string &id) const;

    /// The task implied by the resolved classes, if any non-ambiguous record exists.
    std::optional<Task> task() const { return task_; }

    std::size_t count(ResolvedClass c) const;

private:
    std::vector<Record> records_;
    std::map<std::string, ResolvedClass> label_map_;
    std::optional<Task> task_;
};

Record parse_record(const std::string &line);
std::string serialize_record(const Record &r);

/// One record per line; blank lines are skipped.
Dataset load_corpus(const std::filesystem::path &path);
void save_corpus(const Dataset &dataset, const std::filesystem::path &path);

VoteOutcome aggregate_votes(std::span<const int> votes);

ResolvedClass resolve_class(const Record &r);

/// Removes the sarcasm marker hashtags and @mentions; collapses whitespace.
std::string clean_tweet(const std::string &text);

/// Downsamples the majority class to the minority size. Ambiguous records are dropped.
Dataset balance_classes(const Dataset &dataset, std::uint64_t seed);

/// Stratified (by resolved class) train/test partition.
std::pair<Dataset, Dataset> split_dataset(const Dataset &dataset, double train_fraction,
                                          std::uint64_t seed);

}  // namespace rq::corpus
