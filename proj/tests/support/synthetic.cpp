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

#include "support/synthetic.hpp"

#include <cmath>
#include <fstream>

#include "rq/common.hpp"

namespace rq::testing {

namespace {

constexpr std::size_t kFiller = 200;

std::string filler(std::size_t i) { return "zeb" + std::to_string(i); }

const char *kLexicon =
    "# synthetic categories\n"
    "Netspeak: lol, omg\n"
    "Assent: ok, yes\n"
    "Sadness: sad, cry*\n"
    "Certainty: surely, always\n";

// Noise words occur in both classes at the same rate.
const std::vector<std::string> kNoise{"ok", "yes", "sad", "crying", "surely", "always"};

std::string sentence(Rng &rng, std::size_t words, const std::string &mark) {
    std::string s;
    for (std::size_t i = 0; i < words; ++i) {
        if (!s.empty()) s += ' ';
        s += rng.uniform() < 0.1 ? kNoise[rng.below(kNoise.size())] : filler(rng.below(kFiller));
    }
    if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s + mark;
}

std::string sentences(Rng &rng, std::size_t count) {
    std::string out;
    for (std::size_t i = 0; i < count; ++i) out += (out.empty() ? "" : " ") + sentence(rng, 3 + rng.below(4), ".");
    return out;
}

void write_file(const std::filesystem::path &path, const std::string &contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << contents;
}

}  // namespace

SyntheticCorpus make_synthetic(std::size_t n, std::uint64_t seed, std::size_t dim) {
    Rng rng(seed);
    SyntheticCorpus c;
    c.planted = "Netspeak";
    c.categories = {"Netspeak", "Assent", "Sadness", "Certainty"};
    c.lexicon_text = kLexicon;
    c.lexicon = lexicon::parse_lexicon(kLexicon, "synthetic");

    c.table = embeddings::EmbeddingTable(dim);
    std::vector<float> v(dim);
    for (std::size_t i = 0; i < kFiller; ++i) {
        for (auto &x : v) x = static_cast<float>(rng.uniform(-1.0, 1.0));
        c.table.add(filler(i), v);
    }
    for (const auto &w : kNoise) {
        for (auto &x : v) x = static_cast<float>(rng.uniform(-1.0, 1.0));
        c.table.add(w, v);
    }

    for (std::size_t i = 0; i < n; ++i) {
        const bool positive = i % 2 == 0;
        corpus::Record r;
        r.id = "syn" + std::to_string(i);
        r.domain = corpus::Domain::forums;
        r.gold = positive ? corpus::ResolvedClass::sarcastic : corpus::ResolvedClass::other;

        const std::string pre = sentences(rng, rng.below(3));
        const std::string question = sentence(rng, 3 + rng.below(4), "?");
        // The self-answer carries one marker word at a random position.
        const std::size_t len = 3 + rng.below(4);
        const std::size_t at = rng.below(len + 1);
        std::string answer;
        for (std::size_t k = 0; k <= len; ++k) {
            std::string w;
            if (k == at) w = positive ? (rng.uniform() < 0.5 ? "lol" : "omg") : filler(rng.below(kFiller));
            else w = filler(rng.below(kFiller));
            answer += (answer.empty() ? "" : " ") + w;
        }
        answer += ".";
        const std::string post = sentences(rng, rng.below(3));

        r.text = pre + (pre.empty() ? "" : " ") + question + " " + answer + (post.empty() ? "" : " ") + post;
        r.extra["pre"] = pre;
        r.extra["question"] = question;
        r.extra["self_answer"] = answer;
        r.extra["post"] = post;
        c.records.push_back(std::move(r));
    }
    return c;
}

void write_synthetic(const SyntheticCorpus &c, const std::filesystem::path &dir, double train_frac,
                     std::uint64_t seed) {
    std::filesystem::create_directories(dir);
    const corpus::Dataset all(c.records);
    const auto [train, test] = corpus::split_dataset(all, train_frac, seed);
    corpus::save_corpus(all, dir / "all.lines");
    corpus::save_corpus(train, dir / "train.lines");
    corpus::save_corpus(test, dir / "test.lines");
    embeddings::save_embeddings(c.table, dir / "embeddings.txt", embeddings::Format::text);
    write_file(dir / "lexicon.dic", c.lexicon_text);
}

std::filesystem::path scratch_dir(const std::string &name) {
    const auto dir = std::filesystem::temp_directory_path() / ("rq_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace rq::testing
