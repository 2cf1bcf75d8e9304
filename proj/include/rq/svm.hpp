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
#include <span>
#include <string>
#include <vector>

#include "rq/common.hpp"
#include "rq/embeddings.hpp"
#include "rq/lexicon.hpp"
#include "rq/rq_extract.hpp"

namespace rq::svm {

inline constexpr const char *kEmbeddingBlock = "embedding";
inline constexpr const char *kCategoryBlock = "categories";

struct FeatureSpan {
    std::string name;
    std::size_t offset = 0;
    std::size_t width = 0;

    bool operator==(const FeatureSpan &) const = default;
};

/// Named blocks of a feature vector, plus the category names of the category block.
struct FeatureLayout {
    std::vector<FeatureSpan> spans;
    std::vector<std::string> category_names;

    std::size_t width() const;
    bool category_only() const;

    static FeatureLayout make(std::size_t embedding_dim, const std::vector<std::string> &categories);

    bool operator==(const FeatureLayout &) const = default;
};

struct Example {
    std::vector<double> features;
    Label label = Label::positive;
};

/// Per-dimension (x - mean) / std from training statistics. Constant
/// dimensions get std 1 so they map to zero.
struct Standardizer {
    std::vector<double> means;
    std::vector<double> stds;

    static Standardizer fit(std::span<const Example> examples);
    static Standardizer identity(std::size_t dim);
    std::vector<double> apply(std::span<const double> x) const;

    bool operator==(const Standardizer &) const = default;
};

struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;
    FeatureLayout layout;
    Standardizer standardizer;

    bool operator==(const LinearModel &) const = default;
};

struct Prediction {
    Label label;
    double margin;
};

/// [average embedding of the view ⧺ category scores of the view].
std::vector<double> build_features(const extract::RQInstance &instance, extract::ContextMode mode,
                                   const embeddings::EmbeddingTable &table, const lexicon::Lexicon &lexicon,
                                   std::span<const std::string> selected);

/// Category scores only (no embedding block).
std::vector<double> build_category_features(const extract::RQInstance &instance, extract::ContextMode mode,
                                            const lexicon::Lexicon &lexicon, std::span<const std::string> selected);

struct TrainOptions {
    double lambda = 1e-2;
    std::size_t epochs = 30;
    std::uint64_t seed = 1;
};

/// Pegasos: stochastic subgradient descent on λ/2‖w‖² + mean hinge loss with
/// step 1/(λt) and projection onto the ball of radius 1/√λ. One epoch is one
/// pass over a fresh permutation. The bias is the weight of a constant feature.
LinearModel train(std::span<const Example> examples, const TrainOptions &options,
                  const FeatureLayout *layout = nullptr);

/// Label is sign(margin) with ties going to the positive class.
Prediction predict(const LinearModel &model, std::span<const double> features);

/// λ/2‖w‖² + mean hinge loss, measured in the model's standardized space.
double objective(const LinearModel &model, std::span<const Example> examples, double lambda);

/// Stratified fold index per example: each class is shuffled and dealt round robin.
std::vector<std::size_t> stratified_folds(std::span<const Label> labels, std::size_t folds, std::uint64_t seed);

struct GridSpec {
    std::vector<double> lambdas{1e-4, 1e-3, 1e-2, 1e-1};
    std::vector<std::size_t> epochs{10, 30, 100};
    std::size_t folds = 3;
};

struct CandidateScore {
    double lambda = 0.0;
    std::size_t epochs = 0;
    std::vector<double> fold_macro_f1;
    double mean_macro_f1 = 0.0;
};

struct GridResult {
    double best_lambda = 0.0;
    std::size_t best_epochs = 0;
    std::vector<CandidateScore> candidates;  // in grid order
};

/// Picks the candidate with the highest mean macro-F1; ties go to the smaller λ,
/// then to fewer epochs.
GridResult grid_search_cv(std::span<const Example> train, const GridSpec &grid, std::uint64_t seed);

struct RankedFeature {
    std::string category;
    double fw = 0.0;           // mean |weight| across folds
    double mean_weight = 0.0;  // signed; its sign picks the class
};

struct FeatureRanking {
    std::vector<RankedFeature> positive;  // descending FW
    std::vector<RankedFeature> negative;
};

/// k-fold cross-validation of a category-only model; ranks categories by FW per class.
FeatureRanking rank_feature_weights(std::span<const Example> train, const FeatureLayout &layout, std::size_t folds,
                                    std::uint64_t seed, const TrainOptions &options = {});

void save_model(const LinearModel &model, const std::filesystem::path &path);
LinearModel load_model(const std::filesystem::path &path);
void write_model(const LinearModel &model, std::ostream &out);
LinearModel read_model(std::istream &in);

}  // namespace rq::svm
