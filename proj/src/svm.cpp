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

#include "rq/svm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "rq/metrics.hpp"

namespace rq::svm {

std::size_t FeatureLayout::width() const {
    std::size_t w = 0;
    for (const auto &s : spans) w = std::max(w, s.offset + s.width);
    return w;
}

bool FeatureLayout::category_only() const {
    return spans.size() == 1 && spans[0].name == kCategoryBlock;
}

FeatureLayout FeatureLayout::make(std::size_t embedding_dim, const std::vector<std::string> &categories) {
    FeatureLayout layout;
    if (embedding_dim > 0) layout.spans.push_back({kEmbeddingBlock, 0, embedding_dim});
    if (!categories.empty()) layout.spans.push_back({kCategoryBlock, embedding_dim, categories.size()});
    layout.category_names = categories;
    return layout;
}

Standardizer Standardizer::fit(std::span<const Example> examples) {
    if (examples.empty()) throw Error("cannot standardize an empty example set");
    const std::size_t dim = examples[0].features.size();
    Standardizer s{std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0)};
    const double n = static_cast<double>(examples.size());
    for (const auto &e : examples) {
        if (e.features.size() != dim) throw Error("examples have inconsistent feature widths");
        for (std::size_t k = 0; k < dim; ++k) s.means[k] += e.features[k];
    }
    for (double &m : s.means) m /= n;
    for (const auto &e : examples) {
        for (std::size_t k = 0; k < dim; ++k) {
            const double d = e.features[k] - s.means[k];
            s.stds[k] += d * d;
        }
    }
    for (double &sd : s.stds) {
        sd = std::sqrt(sd / n);
        if (!(sd > 1e-12)) sd = 1.0;
    }
    return s;
}

Standardizer Standardizer::identity(std::size_t dim) {
    return {std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)};
}

std::vector<double> Standardizer::apply(std::span<const double> x) const {
    if (x.size() != means.size()) {
        throw Error("feature vector has " + std::to_string(x.size()) + " dimensions, model expects " +
                    std::to_string(means.size()));
    }
    std::vector<double> z(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) z[k] = (x[k] - means[k]) / stds[k];
    return z;
}

std::vector<double> build_category_features(const extract::RQInstance &instance, extract::ContextMode mode,
                                            const lexicon::Lexicon &lexicon, std::span<const std::string> selected) {
    const auto tokens = extract::context_view(instance, mode);
    return lexicon::score(tokens, extract::view_sentence_count(instance, mode), lexicon, selected).values();
}

std::vector<double> build_features(const extract::RQInstance &instance, extract::ContextMode mode,
                                   const embeddings::EmbeddingTable &table, const lexicon::Lexicon &lexicon,
                                   std::span<const std::string> selected) {
    const auto tokens = extract::context_view(instance, mode);
    std::vector<double> out = embeddings::average_embedding(tokens, table);
    if (!selected.empty()) {
        const auto scores =
            lexicon::score(tokens, extract::view_sentence_count(instance, mode), lexicon, selected).values();
        out.insert(out.end(), scores.begin(), scores.end());
    }
    return out;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

void check_examples(std::span<const Example> examples) {
    if (examples.empty()) throw Error("svm::train: no examples");
    bool pos = false, neg = false;
    for (const auto &e : examples) (e.label == Label::positive ? pos : neg) = true;
    if (!pos || !neg) throw Error("svm::train: both labels must be present");
}

}  // namespace

LinearModel train(std::span<const Example> examples, const TrainOptions &options, const FeatureLayout *layout) {
    check_examples(examples);
    if (!(options.lambda > 0.0)) throw Error("svm::train: lambda must be positive");
    const std::size_t dim = examples[0].features.size();

    LinearModel model;
    model.standardizer = Standardizer::fit(examples);
    model.layout = layout ? *layout : FeatureLayout{{{"features", 0, dim}}, {}};
    if (model.layout.width() != dim) throw Error("svm::train: layout width does not match features");

    std::vector<std::vector<double>> z;
    z.reserve(examples.size());
    for (const auto &e : examples) {
        auto v = model.standardizer.apply(e.features);
        v.push_back(1.0);  // bias feature
        z.push_back(std::move(v));
    }

    const double lambda = options.lambda;
    const double radius = 1.0 / std::sqrt(lambda);
    std::vector<double> w(dim + 1, 0.0);
    std::vector<std::size_t> order(examples.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(options.seed);
    std::size_t t = 0;
    for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t i : order) {
            ++t;
            const double eta = 1.0 / (lambda * static_cast<double>(t));
            const double y = to_sign(examples[i].label);
            const double margin = y * dot(w, z[i]);
            const double shrink = 1.0 - eta * lambda;
            for (double &wk : w) wk *= shrink;
            if (margin < 1.0) {
                for (std::size_t k = 0; k < w.size(); ++k) w[k] += eta * y * z[i][k];
            }
            const double norm = std::sqrt(dot(w, w));
            if (norm > radius) {
                const double s = radius / norm;
                for (double &wk : w) wk *= s;
            }
        }
    }
    model.bias = w.back();
    w.pop_back();
    model.weights = std::move(w);
    return model;
}

Prediction predict(const LinearModel &model, std::span<const double> features) {
    if (features.size() != model.weights.size()) {
        throw Error("predict: feature vector has " + std::to_string(features.size()) + " dimensions, model expects " +
                    std::to_string(model.weights.size()));
    }
    const auto z = model.standardizer.apply(features);
    const double margin = dot(model.weights, z) + model.bias;
    return {margin >= 0.0 ? Label::positive : Label::negative, margin};
}

double objective(const LinearModel &model, std::span<const Example> examples, double lambda) {
    double hinge = 0.0;
    for (const auto &e : examples) {
        const double m = to_sign(e.label) * predict(model, e.features).margin;
        hinge += std::max(0.0, 1.0 - m);
    }
    const double norm2 = dot(model.weights, model.weights) + model.bias * model.bias;
    return 0.5 * lambda * norm2 + hinge / static_cast<double>(examples.size());
}

std::vector<std::size_t> stratified_folds(std::span<const Label> labels, std::size_t folds, std::uint64_t seed) {
    if (folds < 2) throw Error("cross-validation needs at least 2 folds");
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] == Label::positive ? pos : neg).push_back(i);
    if (std::min(pos.size(), neg.size()) < folds) {
        throw Error("cross-validation with " + std::to_string(folds) + " folds needs at least that many examples of each class");
    }
    Rng rng(seed);
    std::vector<std::size_t> fold_of(labels.size(), 0);
    std::size_t next = 0;
    for (auto *cls : {&pos, &neg}) {
        rng.shuffle(*cls);
        // Continue dealing where the previous class stopped so fold sizes stay balanced.
        for (std::size_t idx : *cls) fold_of[idx] = next++ % folds;
    }
    return fold_of;
}

namespace {

std::vector<Label> labels_of(std::span<const Example> examples) {
    std::vector<Label> out;
    out.reserve(examples.size());
    for (const auto &e : examples) out.push_back(e.label);
    return out;
}

struct FoldSplit {
    std::vector<Example> train;
    std::vector<Example> test;
};

FoldSplit fold_split(std::span<const Example> examples, const std::vector<std::size_t> &fold_of, std::size_t fold) {
    FoldSplit s;
    for (std::size_t i = 0; i < examples.size(); ++i) (fold_of[i] == fold ? s.test : s.train).push_back(examples[i]);
    return s;
}

}  // namespace

GridResult grid_search_cv(std::span<const Example> train_set, const GridSpec &grid, std::uint64_t seed) {
    if (grid.lambdas.empty() || grid.epochs.empty()) throw Error("grid_search_cv: empty grid");
    check_examples(train_set);
    const auto labels = labels_of(train_set);
    const auto fold_of = stratified_folds(labels, grid.folds, seed);

    std::vector<FoldSplit> splits;
    for (std::size_t f = 0; f < grid.folds; ++f) splits.push_back(fold_split(train_set, fold_of, f));

    GridResult result;
    bool have_best = false;
    const CandidateScore *best = nullptr;
    for (double lambda : grid.lambdas) {
        for (std::size_t epochs : grid.epochs) {
            CandidateScore cand{lambda, epochs, {}, 0.0};
            for (std::size_t f = 0; f < grid.folds; ++f) {
                const auto model = train(splits[f].train, {lambda, epochs, seed + f});
                std::vector<Label> pred, gold;
                for (const auto &e : splits[f].test) {
                    pred.push_back(predict(model, e.features).label);
                    gold.push_back(e.label);
                }
                cand.fold_macro_f1.push_back(eval::macro_f1(pred, gold));
            }
            cand.mean_macro_f1 = std::accumulate(cand.fold_macro_f1.begin(), cand.fold_macro_f1.end(), 0.0) /
                                 static_cast<double>(grid.folds);
            result.candidates.push_back(std::move(cand));
        }
    }
    for (const auto &c : result.candidates) {
        const bool better = !have_best || c.mean_macro_f1 > best->mean_macro_f1 ||
                            (c.mean_macro_f1 == best->mean_macro_f1 &&
                             (c.lambda < best->lambda || (c.lambda == best->lambda && c.epochs < best->epochs)));
        if (better) {
            best = &c;
            have_best = true;
        }
    }
    result.best_lambda = best->lambda;
    result.best_epochs = best->epochs;
    return result;
}

FeatureRanking rank_feature_weights(std::span<const Example> train_set, const FeatureLayout &layout, std::size_t folds,
                                    std::uint64_t seed, const TrainOptions &options) {
    if (!layout.category_only()) throw Error("rank_feature_weights: features must be the category block only");
    check_examples(train_set);
    const std::size_t dim = layout.width();
    if (train_set[0].features.size() != dim) throw Error("rank_feature_weights: features do not match layout");

    const auto fold_of = stratified_folds(labels_of(train_set), folds, seed);
    std::vector<double> sum_abs(dim, 0.0), sum_signed(dim, 0.0);
    for (std::size_t f = 0; f < folds; ++f) {
        const auto split = fold_split(train_set, fold_of, f);
        TrainOptions opt = options;
        opt.seed = options.seed + f;
        const auto model = train(split.train, opt, &layout);
        for (std::size_t k = 0; k < dim; ++k) {
            sum_abs[k] += std::abs(model.weights[k]);
            sum_signed[k] += model.weights[k];
        }
    }
    FeatureRanking ranking;
    for (std::size_t k = 0; k < dim; ++k) {
        RankedFeature rf{layout.category_names.at(k), sum_abs[k] / static_cast<double>(folds),
                         sum_signed[k] / static_cast<double>(folds)};
        (rf.mean_weight >= 0.0 ? ranking.positive : ranking.negative).push_back(std::move(rf));
    }
    auto by_fw = [](const RankedFeature &a, const RankedFeature &b) {
        return a.fw != b.fw ? a.fw > b.fw : a.category < b.category;
    };
    std::sort(ranking.positive.begin(), ranking.positive.end(), by_fw);
    std::sort(ranking.negative.begin(), ranking.negative.end(), by_fw);
    return ranking;
}

namespace {

void write_row(std::ostream &out, const char *name, std::span<const double> values) {
    char num[40];
    out << name;
    for (double v : values) {
        std::snprintf(num, sizeof num, "%.17g", v);
        out << ' ' << num;
    }
    out << '\n';
}

std::vector<double> read_row(std::istream &in, const char *name, std::size_t n) {
    std::string line;
    if (!std::getline(in, line)) throw Error(std::string("svm model: missing `") + name + "` line");
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key != name) throw Error(std::string("svm model: expected `") + name + "`, got `" + key + "`");
    std::vector<double> v;
    std::string tok;
    while (ls >> tok) v.push_back(std::strtod(tok.c_str(), nullptr));
    if (v.size() != n) throw Error(std::string("svm model: `") + name + "` has wrong length");
    return v;
}

}  // namespace

void write_model(const LinearModel &model, std::ostream &out) {
    const std::size_t dim = model.weights.size();
    out << "rq-svm v1 " << dim << '\n';
    write_row(out, "mean", model.standardizer.means);
    write_row(out, "std", model.standardizer.stds);
    write_row(out, "weights", model.weights);
    const double b[] = {model.bias};
    write_row(out, "bias", b);
    out << "layout " << model.layout.spans.size();
    for (const auto &s : model.layout.spans) out << ' ' << s.name << ' ' << s.offset << ' ' << s.width;
    out << '\n';
    out << "categories " << model.layout.category_names.size();
    for (const auto &c : model.layout.category_names) out << ' ' << c;
    out << '\n';
}

LinearModel read_model(std::istream &in) {
    std::string line;
    if (!std::getline(in, line)) throw Error("svm model: empty file");
    std::istringstream hs(line);
    std::string magic, version;
    std::size_t dim = 0;
    if (!(hs >> magic >> version >> dim) || magic != "rq-svm") throw Error("svm model: bad header '" + line + "'");
    if (version != "v1") throw Error("svm model: unsupported version " + version);
    LinearModel m;
    m.standardizer.means = read_row(in, "mean", dim);
    m.standardizer.stds = read_row(in, "std", dim);
    m.weights = read_row(in, "weights", dim);
    m.bias = read_row(in, "bias", 1)[0];

    if (!std::getline(in, line)) throw Error("svm model: missing layout");
    std::istringstream ls(line);
    std::string key;
    std::size_t n = 0;
    if (!(ls >> key >> n) || key != "layout") throw Error("svm model: bad layout line");
    for (std::size_t i = 0; i < n; ++i) {
        FeatureSpan s;
        if (!(ls >> s.name >> s.offset >> s.width)) throw Error("svm model: bad layout span");
        m.layout.spans.push_back(s);
    }
    if (!std::getline(in, line)) throw Error("svm model: missing categories");
    std::istringstream cs(line);
    if (!(cs >> key >> n) || key != "categories") throw Error("svm model: bad categories line");
    for (std::size_t i = 0; i < n; ++i) {
        std::string c;
        if (!(cs >> c)) throw Error("svm model: bad categories line");
        m.layout.category_names.push_back(c);
    }
    if (m.layout.width() != dim) throw Error("svm model: layout width does not match weights");
    return m;
}

void save_model(const LinearModel &model, const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    write_model(model, out);
}

LinearModel load_model(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model " + path.string());
    return read_model(in);
}

}  // namespace rq::svm
