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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rq/corpus.hpp"
#include "rq/embeddings.hpp"
#include "rq/lexicon.hpp"
#include "rq/metrics.hpp"
#include "rq/neural.hpp"
#include "rq/rq_extract.hpp"
#include "rq/svm.hpp"

namespace rq::eval {

enum class ModelKind { svm, lstm };
enum class FeatureSet { w2v, w2v_liwc };

std::string to_string(ModelKind m);
std::string to_string(FeatureSet f);  // "w2v", "w2v+liwc"
ModelKind parse_model(const std::string &s);
FeatureSet parse_features(const std::string &s);

struct LabeledInstance {
    std::string id;
    extract::RQInstance instance;
    Label label = Label::positive;
};

/// Builds model inputs from a dataset. Records carrying extracted segments
/// (`question` etc.) use them; other records use their whole text as the
/// question. Ambiguous records are skipped.
std::vector<LabeledInstance> labeled_instances(const corpus::Dataset &dataset);

struct ExperimentConfig {
    corpus::Domain domain = corpus::Domain::forums;
    ModelKind model = ModelKind::svm;
    FeatureSet features = FeatureSet::w2v_liwc;
    extract::ContextMode context = extract::ContextMode::rq;
    std::uint64_t seed = 1;
    svm::GridSpec grid;
    /// Layer sizes and training schedule; embed_dim, aux_dim and seed are filled in per run.
    neural::NetworkConfig network;
    /// Lexicon categories used when features include LIWC.
    std::vector<std::string> categories;
    std::string positive_class = "sarcastic";
    std::string negative_class = "other";
};

/// The network defaults for a domain (max_len 80 for forums, 40 for twitter).
neural::NetworkConfig default_network(corpus::Domain domain);

struct ReportRow {
    std::string domain;
    std::string model;
    std::string features;
    std::string training;
    std::string cls;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;

    bool operator==(const ReportRow &) const = default;
};

struct EvalReport {
    std::vector<ReportRow> rows;
    std::map<std::string, std::string> provenance;

    bool operator==(const EvalReport &) const = default;
};

struct ExperimentInputs {
    const std::vector<LabeledInstance> &train;
    const std::vector<LabeledInstance> &test;
    const embeddings::EmbeddingTable &table;
    const lexicon::Lexicon &lexicon;
};

struct SvmFit {
    svm::LinearModel model;
    svm::GridResult grid;
};

/// Grid search on the training view, then a final fit with the chosen settings.
SvmFit fit_svm(const std::vector<LabeledInstance> &train, const embeddings::EmbeddingTable &table,
               const lexicon::Lexicon &lexicon, const ExperimentConfig &config);

/// Predicts from the RQ view using the categories recorded in the model layout.
std::vector<Label> predict_svm(const svm::LinearModel &model, const std::vector<LabeledInstance> &test,
                               const embeddings::EmbeddingTable &table, const lexicon::Lexicon &lexicon);

struct LstmFit {
    neural::LstmModel model;
    std::size_t best_epoch = 0;
};

LstmFit fit_lstm(const std::vector<LabeledInstance> &train, const embeddings::EmbeddingTable &table,
                 const lexicon::Lexicon &lexicon, const ExperimentConfig &config);

/// `categories` must be the list the model was trained with (empty for W2V only).
std::vector<Label> predict_lstm(const neural::LstmModel &model, const std::vector<std::string> &categories,
                                const std::vector<LabeledInstance> &test, const embeddings::EmbeddingTable &table,
                                const lexicon::Lexicon &lexicon);

/// One row per class, positive first, labeled from `config`.
std::vector<ReportRow> score_rows(std::span<const Label> predictions, const std::vector<LabeledInstance> &test,
                                  const ExperimentConfig &config);

/// Trains on the requested context view and tests on the RQ view. Emits one row
/// per class (positive first) and records tuned hyperparameters in provenance,
/// keyed by `model/features/context/...`.
EvalReport run_experiment(const ExperimentInputs &inputs, const ExperimentConfig &config);

/// The ten cells of a results table: for each model, the W2V baseline on the RQ
/// view, then W2V+LIWC on all four views. `threads` > 1 runs cells concurrently;
/// the report is identical either way.
EvalReport run_grid(const ExperimentInputs &inputs, const ExperimentConfig &base, std::size_t threads = 1);

/// Machine-readable form: one flat object per line, provenance first.
std::string serialize_report(const EvalReport &report);
EvalReport parse_report(const std::string &contents);
void save_report(const EvalReport &report, const std::filesystem::path &path);
EvalReport load_report(const std::filesystem::path &path);

/// Aligned text table, two classes per line, values rounded to 2 decimals.
std::string render_table(const EvalReport &report);

}  // namespace rq::eval
