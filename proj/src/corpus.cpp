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

#include "rq/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rq/text.hpp"

namespace rq::corpus {

using nlohmann::json;

std::string to_string(Domain d) { return d == Domain::forums ? "forums" : "twitter"; }

std::string to_string(HashtagLabel h) { return h == HashtagLabel::sarcastic ? "sarcastic" : "none"; }

std::string to_string(ResolvedClass c) {
    switch (c) {
        case ResolvedClass::sarcastic: return "sarcastic";
        case ResolvedClass::other: return "other";
        case ResolvedClass::rq: return "rq";
        case ResolvedClass::factual: return "factual";
        case ResolvedClass::ambiguous: return "ambiguous";
    }
    return "?";
}

Domain parse_domain(const std::string &s) {
    if (s == "forums") return Domain::forums;
    if (s == "twitter") return Domain::twitter;
    throw Error("unknown domain '" + s + "' (expected forums|twitter)");
}

ResolvedClass parse_class(const std::string &s) {
    if (s == "sarcastic") return ResolvedClass::sarcastic;
    if (s == "other") return ResolvedClass::other;
    if (s == "rq") return ResolvedClass::rq;
    if (s == "factual") return ResolvedClass::factual;
    throw Error("unknown class '" + s + "' (expected sarcastic|other|rq|factual)");
}

namespace {

std::optional<Task> task_of(ResolvedClass c) {
    switch (c) {
        case ResolvedClass::sarcastic:
        case ResolvedClass::other: return kSarcasmTask;
        case ResolvedClass::rq:
        case ResolvedClass::factual: return kQuestionTask;
        case ResolvedClass::ambiguous: return std::nullopt;
    }
    return std::nullopt;
}

const std::string &require_string(const json &j, const char *key) {
    auto it = j.find(key);
    if (it == j.end()) throw Error(std::string("missing `") + key + "`");
    if (!it->is_string()) throw Error(std::string("`") + key + "` must be a string");
    return it->get_ref<const std::string &>();
}

void validate_label_source(const Record &r) {
    const int sources = int(r.votes.has_value()) + int(r.hashtag_label.has_value()) + int(r.gold.has_value());
    if (sources != 1) throw Error("exactly one of `votes`, `hashtag_label`, `gold` is required");
    if (r.domain == Domain::forums && r.hashtag_label) throw Error("forums records cannot carry `hashtag_label`");
    if (r.domain == Domain::twitter && r.votes) throw Error("twitter records cannot carry `votes`");
}

}  // namespace

Record parse_record(const std::string &line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error &e) {
        throw Error(std::string("invalid record syntax: ") + e.what());
    }
    if (!j.is_object()) throw Error("record must be an object");

    Record r;
    r.id = require_string(j, "id");
    if (r.id.empty()) throw Error("`id` must be nonempty");
    r.domain = parse_domain(require_string(j, "domain"));
    r.text = require_string(j, "text");

    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string &key = it.key();
        if (key == "id" || key == "domain" || key == "text") continue;
        if (key == "votes") {
            if (!it->is_array()) throw Error("`votes` must be an array");
            std::vector<int> votes;
            for (const auto &v : *it) {
                if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1)) {
                    throw Error("`votes` entries must be 0 or 1");
                }
                votes.push_back(v.get<int>());
            }
            if (votes.size() != 5) throw Error("`votes` must have exactly 5 entries");
            r.votes = std::move(votes);
        } else if (key == "hashtag_label") {
            if (!it->is_string()) throw Error("`hashtag_label` must be a string");
            const auto s = it->get<std::string>();
            if (s == "sarcastic") r.hashtag_label = HashtagLabel::sarcastic;
            else if (s == "none") r.hashtag_label = HashtagLabel::none;
            else throw Error("`hashtag_label` must be sarcastic|none");
        } else if (key == "gold") {
            if (!it->is_string()) throw Error("`gold` must be a string");
            r.gold = parse_class(it->get<std::string>());
        } else if (it->is_string()) {
            r.extra[key] = it->get<std::string>();
        } else {
            throw Error("unexpected non-string field `" + key + "`");
        }
    }
    validate_label_source(r);
    return r;
}

std::string serialize_record(const Record &r) {
    json j = json::object();
    j["id"] = r.id;
    j["domain"] = to_string(r.domain);
    j["text"] = r.text;
    if (r.votes) j["votes"] = *r.votes;
    if (r.hashtag_label) j["hashtag_label"] = to_string(*r.hashtag_label);
    if (r.gold) j["gold"] = to_string(*r.gold);
    for (const auto &[k, v] : r.extra) j[k] = v;
    return j.dump();
}

VoteOutcome aggregate_votes(std::span<const int> votes) {
    if (votes.size() != 5) {
        throw Error("aggregate_votes: expected 5 votes, got " + std::to_string(votes.size()));
    }
    int positive = 0;
    for (int v : votes) {
        if (v != 0 && v != 1) throw Error("aggregate_votes: votes must be 0 or 1");
        positive += v;
    }
    if (positive >= 3) return VoteOutcome::sarcastic;
    if (positive <= 1) return VoteOutcome::other;
    return VoteOutcome::ambiguous;
}

ResolvedClass resolve_class(const Record &r) {
    if (r.gold) return *r.gold;
    if (r.hashtag_label) {
        return *r.hashtag_label == HashtagLabel::sarcastic ? ResolvedClass::sarcastic : ResolvedClass::other;
    }
    if (r.votes) {
        switch (aggregate_votes(*r.votes)) {
            case VoteOutcome::sarcastic: return ResolvedClass::sarcastic;
            case VoteOutcome::other: return ResolvedClass::other;
            case VoteOutcome::ambiguous: return ResolvedClass::ambiguous;
        }
    }
    throw Error("record '" + r.id + "' has no label source");
}

Dataset::Dataset(std::vector<Record> records) : records_(std::move(records)) {
    for (const auto &r : records_) {
        if (r.id.empty()) throw Error("record with empty id");
        validate_label_source(r);
        const ResolvedClass c = resolve_class(r);
        if (!label_map_.emplace(r.id, c).second) throw Error("duplicate id '" + r.id + "'");
        if (auto t = task_of(c)) {
            if (task_ && *task_ != *t) {
                throw Error("record '" + r.id + "' mixes classes from different tasks");
            }
            task_ = t;
        }
    }
}

ResolvedClass Dataset::class_of(const std::string &id) const {
    auto it = label_map_.find(id);
    if (it == label_map_.end()) throw Error("unknown id '" + id + "'");
    return it->second;
}

std::size_t Dataset::count(ResolvedClass c) const {
    return static_cast<std::size_t>(std::count_if(label_map_.begin(), label_map_.end(),
                                                  [c](const auto &kv) { return kv.second == c; }));
}

Dataset load_corpus(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open corpus file " + path.string());
    std::vector<Record> records;
    std::set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            Record r = parse_record(line);
            if (!seen.insert(r.id).second) throw Error("duplicate id '" + r.id + "'");
            records.push_back(std::move(r));
        } catch (const Error &e) {
            throw Error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return Dataset(std::move(records));
}

void save_corpus(const Dataset &dataset, const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    for (const auto &r : dataset.records()) out << serialize_record(r) << '\n';
}

std::string clean_tweet(const std::string &text) {
    std::istringstream words(text);
    std::string word;
    std::string out;
    while (words >> word) {
        if (word[0] == '@') continue;
        const std::string lower = text::to_lower(word);
        if (lower == "#sarcasm" || lower == "#sarcastic" || lower == "#sarcastictweet") continue;
        if (!out.empty()) out += ' ';
        out += word;
    }
    return out;
}

Dataset balance_classes(const Dataset &dataset, std::uint64_t seed) {
    const auto task = dataset.task();
    if (!task) throw Error("balance_classes: dataset has no resolved classes");
    const std::size_t n_pos = dataset.count(task->positive);
    const std::size_t n_neg = dataset.count(task->negative);
    if (n_pos == 0 || n_neg == 0) throw Error("balance_classes: a class is empty");

    const ResolvedClass majority = n_pos >= n_neg ? task->positive : task->negative;
    const std::size_t keep = std::min(n_pos, n_neg);

    std::vector<std::size_t> majority_idx;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (dataset.class_of(dataset.records()[i].id) == majority) majority_idx.push_back(i);
    }
    Rng rng(seed);
    rng.shuffle(majority_idx);
    majority_idx.resize(keep);
    std::sort(majority_idx.begin(), majority_idx.end());

    std::vector<Record> out;
    std::size_t next = 0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto &r = dataset.records()[i];
        const ResolvedClass c = dataset.class_of(r.id);
        if (c == ResolvedClass::ambiguous) continue;
        if (c == majority) {
            if (next < majority_idx.size() && majority_idx[next] == i) {
                out.push_back(r);
                ++next;
            }
            continue;
        }
        out.push_back(r);
    }
    return Dataset(std::move(out));
}

std::pair<Dataset, Dataset> split_dataset(const Dataset &dataset, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw Error("split_dataset: train fraction must be in (0, 1)");
    }
    std::map<ResolvedClass, std::vector<std::size_t>> strata;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        strata[dataset.class_of(dataset.records()[i].id)].push_back(i);
    }
    if (const auto task = dataset.task()) {
        for (ResolvedClass c : {task->positive, task->negative}) {
            if (strata[c].size() < 2) throw Error("split_dataset: fewer than 2 records of class " + to_string(c));
        }
    } else {
        throw Error("split_dataset: dataset has no resolved classes");
    }

    Rng rng(seed);
    std::vector<bool> in_train(dataset.size(), false);
    for (auto &[cls, idx] : strata) {
        if (idx.empty()) continue;
        rng.shuffle(idx);
        auto n_train = static_cast<std::size_t>(train_fraction * static_cast<double>(idx.size()) + 0.5);
        if (idx.size() >= 2) n_train = std::clamp<std::size_t>(n_train, 1, idx.size() - 1);
        for (std::size_t k = 0; k < n_train; ++k) in_train[idx[k]] = true;
    }
    std::vector<Record> train, test;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        (in_train[i] ? train : test).push_back(dataset.records()[i]);
    }
    return {Dataset(std::move(train)), Dataset(std::move(test))};
}

}  // namespace rq::corpus
