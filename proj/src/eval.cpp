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

#include "rq/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace rq::eval {

using nlohmann::json;

std::string to_string(ModelKind m) { return m == ModelKind::svm ? "svm" : "lstm"; }
std::string to_string(FeatureSet f) { return f == FeatureSet::w2v ? "w2v" : "w2v+liwc"; }

ModelKind parse_model(const std::string &s) {
    if (s == "svm") return ModelKind::svm;
    if (s == "lstm") return ModelKind::lstm;
    throw Error("unknown model '" + s + "' (expected svm|lstm)");
}

FeatureSet parse_features(const std::string &s) {
    if (s == "w2v") return FeatureSet::w2v;
    if (s == "w2v+liwc") return FeatureSet::w2v_liwc;
    throw Error("unknown feature set '" + s + "' (expected w2v|w2v+liwc)");
}

std::vector<LabeledInstance> labeled_instances(const corpus::Dataset &dataset) {
    const auto task = dataset.task();
    std::vector<LabeledInstance> out;
    if (!task) return out;
    for (const auto &r : dataset.records()) {
        const auto cls = dataset.class_of(r.id);
        if (cls == corpus::ResolvedClass::ambiguous) continue;
        LabeledInstance li;
        li.id = r.id;
        li.label = cls == task->positive ? Label::positive : Label::negative;
        auto field = [&](const char *key) {
            auto it = r.extra.find(key);
            return it == r.extra.end() ? std::string() : it->second;
        };
        if (r.extra.contains("question")) {
            li.instance = extract::instance_from_segments(field("pre"), field("question"), field("self_answer"),
                                                          field("post"));
        } else {
            li.instance = extract::instance_from_text(r.text);
        }
        li.instance.source_id = r.id;
        out.push_back(std::move(li));
    }
    return out;
}

neural::NetworkConfig default_network(corpus::Domain domain) {
    neural::NetworkConfig c;
    c.max_len = domain == corpus::Domain::forums ? 80 : 40;
    return c;
}

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> selected_categories(const ExperimentConfig &config) {
    return config.features == FeatureSet::w2v_liwc ? config.categories : std::vector<std::string>{};
}

std::vector<svm::Example> svm_examples(const std::vector<LabeledInstance> &data, extract::ContextMode mode,
                                       const embeddings::EmbeddingTable &table, const lexicon::Lexicon &lexicon,
                                       const std::vector<std::string> &selected) {
    std::vector<svm::Example> out;
    out.reserve(data.size());
    for (const auto &li : data) {
        out.push_back({svm::build_features(li.instance, mode, table, lexicon, selected), li.label});
    }
    return out;
}

std::vector<neural::NetExample> net_examples(const std::vector<LabeledInstance> &data, extract::ContextMode mode,
                                             const embeddings::EmbeddingTable &table, const lexicon::Lexicon &lexicon,
                                             const std::vector<std::string> &selected, std::size_t max_len) {
    std::vector<neural::NetExample> out;
    out.reserve(data.size());
    for (const auto &li : data) {
        neural::NetExample ex;
        const auto tokens = extract::context_view(li.instance, mode);
        ex.input = embeddings::embedding_matrix(tokens, table, max_len);
        if (!selected.empty()) {
            ex.aux = svm::build_category_features(li.instance, mode, lexicon, selected);
        }
        ex.label = li.label == Label::positive ? 1 : 0;
        out.push_back(std::move(ex));
    }
    return out;
}

void standardize_aux(std::vector<neural::NetExample> &data, const svm::Standardizer &s) {
    for (auto &ex : data) ex.aux = s.apply(ex.aux);
}

std::vector<Label> gold_labels(const std::vector<LabeledInstance> &data) {
    std::vector<Label> g;
    for (const auto &li : data) g.push_back(li.label);
    return g;
}

}  // namespace

SvmFit fit_svm(const std::vector<LabeledInstance> &train, const embeddings::EmbeddingTable &table,
               const lexicon::Lexicon &lexicon, const ExperimentConfig &config) {
    const auto selected = selected_categories(config);
    const auto examples = svm_examples(train, config.context, table, lexicon, selected);
    SvmFit fit;
    fit.grid = svm::grid_search_cv(examples, config.grid, config.seed);
    const auto layout = svm::FeatureLayout::make(table.dim(), selected);
    fit.model = svm::train(examples, {fit.grid.best_lambda, fit.grid.best_epochs, config.seed}, &layout);
    return fit;
}

std::vector<Label> predict_svm(const svm::LinearModel &model, const std::vector<LabeledInstance> &test,
                               const embeddings::EmbeddingTable &table, const lexicon::Lexicon &lexicon) {
    const auto examples =
        svm_examples(test, extract::ContextMode::rq, table, lexicon, model.layout.category_names);
    std::vector<Label> out;
    for (const auto &ex : examples) out.push_back(svm::predict(model, ex.features).label);
    return out;
}

LstmFit fit_lstm(const std::vector<LabeledInstance> &train, const embeddings::EmbeddingTable &table,
                 const lexicon::Lexicon &lexicon, const ExperimentConfig &config) {
    const auto selected = selected_categories(config);
    LstmFit fit;
    neural::NetworkConfig &net = fit.model.config;
    net = config.network;
    net.embed_dim = table.dim();
    net.aux_dim = selected.size();
    net.seed = config.seed;
    auto all = net_examples(train, config.context, table, lexicon, selected, net.max_len);
    if (!selected.empty()) {
        std::vector<svm::Example> aux;
        for (const auto &ex : all) aux.push_back({ex.aux, Label::positive});
        const auto s = svm::Standardizer::fit(aux);
        standardize_aux(all, s);
        fit.model.aux_mean = s.means;
        fit.model.aux_std = s.stds;
    }
    // Hold out one stratified tenth for epoch selection when both classes allow it.
    std::vector<neural::NetExample> train_part, val;
    const auto labels = gold_labels(train);
    const auto n_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Label::positive));
    if (std::min(n_pos, labels.size() - n_pos) >= 10) {
        const auto fold_of = svm::stratified_folds(labels, 10, config.seed);
        for (std::size_t i = 0; i < all.size(); ++i) (fold_of[i] == 0 ? val : train_part).push_back(all[i]);
    } else {
        train_part = all;
    }
    const auto trained = neural::train_network(net, train_part, val);
    fit.model.params = trained.params;
    fit.best_epoch = trained.best_epoch;
    return fit;
}

std::vector<Label> predict_lstm(const neural::LstmModel &model, const std::vector<std::string> &categories,
                                const std::vector<LabeledInstance> &test, const embeddings::EmbeddingTable &table,
                                const lexicon::Lexicon &lexicon) {
    if (categories.size() != model.config.aux_dim) {
        throw Error("predict_lstm: model expects " + std::to_string(model.config.aux_dim) + " categories, got " +
                    std::to_string(categories.size()));
    }
    if (table.dim() != model.config.embed_dim) throw Error("predict_lstm: embedding dimension does not match model");
    auto examples = net_examples(test, extract::ContextMode::rq, table, lexicon, categories, model.config.max_len);
    if (!categories.empty()) standardize_aux(examples, svm::Standardizer{model.aux_mean, model.aux_std});
    std::vector<Label> out;
    for (const auto &ex : examples) {
        const double p = neural::predict_probability(model.params, model.config, ex.input, ex.aux);
        out.push_back(p >= 0.5 ? Label::positive : Label::negative);
    }
    return out;
}

std::vector<ReportRow> score_rows(std::span<const Label> predictions, const std::vector<LabeledInstance> &test,
                                  const ExperimentConfig &config) {
    const auto gold = gold_labels(test);
    std::vector<ReportRow> rows;
    for (Label cls : {Label::positive, Label::negative}) {
        const PRF1 m = prf1(predictions, gold, cls);
        rows.push_back({corpus::to_string(config.domain), to_string(config.model), to_string(config.features),
                        extract::to_string(config.context),
                        cls == Label::positive ? config.positive_class : config.negative_class, m.precision, m.recall,
                        m.f1});
    }
    return rows;
}

EvalReport run_experiment(const ExperimentInputs &in, const ExperimentConfig &config) {
    if (in.train.empty() || in.test.empty()) throw Error("run_experiment: empty train or test set");
    const auto selected = selected_categories(config);
    if (config.features == FeatureSet::w2v_liwc && selected.empty()) {
        throw Error("run_experiment: w2v+liwc requires at least one category");
    }
    const std::string key = to_string(config.model) + "/" + to_string(config.features) + "/" +
                            extract::to_string(config.context) + "/";

    EvalReport report;
    std::vector<Label> predictions;
    if (config.model == ModelKind::svm) {
        const auto fit = fit_svm(in.train, in.table, in.lexicon, config);
        predictions = predict_svm(fit.model, in.test, in.table, in.lexicon);
        report.provenance[key + "lambda"] = num(fit.grid.best_lambda);
        report.provenance[key + "epochs"] = std::to_string(fit.grid.best_epochs);
    } else if (config.model == ModelKind::lstm) {
        const auto fit = fit_lstm(in.train, in.table, in.lexicon, config);
        predictions = predict_lstm(fit.model, selected, in.test, in.table, in.lexicon);
        report.provenance[key + "best_epoch"] = std::to_string(fit.best_epoch);
        report.provenance[key + "network"] = neural::format_config(fit.model.config);
    } else {
        throw Error("run_experiment: unknown model");
    }
    report.rows = score_rows(predictions, in.test, config);
    return report;
}

EvalReport run_grid(const ExperimentInputs &in, const ExperimentConfig &base, std::size_t threads) {
    std::vector<ExperimentConfig> cells;
    for (ModelKind model : {ModelKind::svm, ModelKind::lstm}) {
        ExperimentConfig c = base;
        c.model = model;
        c.features = FeatureSet::w2v;
        c.context = extract::ContextMode::rq;
        cells.push_back(c);
        for (auto mode : extract::kAllContextModes) {
            c.features = FeatureSet::w2v_liwc;
            c.context = mode;
            cells.push_back(c);
        }
    }

    std::vector<EvalReport> results(cells.size());
    std::vector<std::string> errors(cells.size());
    auto run_cell = [&](std::size_t i) {
        try {
            results[i] = run_experiment(in, cells[i]);
        } catch (const std::exception &e) {
            errors[i] = e.what();
        }
    };
    threads = std::max<std::size_t>(1, threads);
    if (threads == 1) {
        for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
    } else {
        for (std::size_t start = 0; start < cells.size(); start += threads) {
            std::vector<std::thread> pool;
            for (std::size_t i = start; i < std::min(cells.size(), start + threads); ++i) pool.emplace_back(run_cell, i);
            for (auto &t : pool) t.join();
        }
    }
    for (const auto &e : errors) {
        if (!e.empty()) throw Error(e);
    }

    EvalReport report;
    report.provenance["domain"] = corpus::to_string(base.domain);
    report.provenance["seed"] = std::to_string(base.seed);
    report.provenance["train_size"] = std::to_string(in.train.size());
    report.provenance["test_size"] = std::to_string(in.test.size());
    std::string cats;
    for (const auto &c : base.categories) cats += (cats.empty() ? "" : ",") + c;
    report.provenance["categories"] = cats;
    std::string lambdas, epochs;
    for (double l : base.grid.lambdas) lambdas += (lambdas.empty() ? "" : ",") + num(l);
    for (auto e : base.grid.epochs) epochs += (epochs.empty() ? "" : ",") + std::to_string(e);
    report.provenance["grid_lambdas"] = lambdas;
    report.provenance["grid_epochs"] = epochs;
    report.provenance["grid_folds"] = std::to_string(base.grid.folds);
    for (auto &r : results) {
        report.rows.insert(report.rows.end(), r.rows.begin(), r.rows.end());
        report.provenance.insert(r.provenance.begin(), r.provenance.end());
    }
    return report;
}

std::string serialize_report(const EvalReport &report) {
    std::string out;
    json prov = json::object();
    prov["kind"] = "provenance";
    for (const auto &[k, v] : report.provenance) prov[k] = v;
    out += prov.dump() + "\n";
    for (const auto &r : report.rows) {
        json j = json::object();
        j["kind"] = "row";
        j["domain"] = r.domain;
        j["model"] = r.model;
        j["features"] = r.features;
        j["training"] = r.training;
        j["class"] = r.cls;
        j["p"] = r.precision;
        j["r"] = r.recall;
        j["f1"] = r.f1;
        out += j.dump() + "\n";
    }
    return out;
}

EvalReport parse_report(const std::string &contents) {
    EvalReport report;
    std::istringstream in(contents);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            const std::string kind = j.at("kind").get<std::string>();
            if (kind == "provenance") {
                for (auto it = j.begin(); it != j.end(); ++it) {
                    if (it.key() != "kind") report.provenance[it.key()] = it->get<std::string>();
                }
            } else if (kind == "row") {
                ReportRow r;
                r.domain = j.at("domain").get<std::string>();
                r.model = j.at("model").get<std::string>();
                r.features = j.at("features").get<std::string>();
                r.training = j.at("training").get<std::string>();
                r.cls = j.at("class").get<std::string>();
                r.precision = j.at("p").get<double>();
                r.recall = j.at("r").get<double>();
                r.f1 = j.at("f1").get<double>();
                report.rows.push_back(std::move(r));
            } else {
                throw Error("unknown kind '" + kind + "'");
            }
        } catch (const json::exception &e) {
            throw Error("report line " + std::to_string(line_no) + ": " + e.what());
        } catch (const Error &e) {
            throw Error("report line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return report;
}

void save_report(const EvalReport &report, const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << serialize_report(report);
}

EvalReport load_report(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open report " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_report(buf.str());
}

std::string render_table(const EvalReport &report) {
    std::ostringstream out;
    std::string pos_name = "Class A", neg_name = "Class B";
    if (report.rows.size() >= 2) {
        pos_name = report.rows[0].cls;
        neg_name = report.rows[1].cls;
    }
    char line[256];
    std::snprintf(line, sizeof line, "%-3s %-8s %-5s %-9s %-8s | %-16s | %-16s\n", "#", "Domain", "Model", "Features",
                  "Training", pos_name.c_str(), neg_name.c_str());
    out << line;
    std::snprintf(line, sizeof line, "%-3s %-8s %-5s %-9s %-8s | %4s %4s %5s  | %4s %4s %5s\n", "", "", "", "", "",
                  "P", "R", "F1", "P", "R", "F1");
    out << line;
    std::size_t idx = 1;
    for (std::size_t i = 0; i + 1 < report.rows.size(); i += 2, ++idx) {
        const auto &a = report.rows[i];
        const auto &b = report.rows[i + 1];
        std::snprintf(line, sizeof line, "%-3zu %-8s %-5s %-9s %-8s | %.2f %.2f %.2f  | %.2f %.2f %.2f\n", idx,
                      a.domain.c_str(), a.model.c_str(), a.features.c_str(), a.training.c_str(), round2(a.precision),
                      round2(a.recall), round2(a.f1), round2(b.precision), round2(b.recall), round2(b.f1));
        out << line;
    }
    return out.str();
}

}  // namespace rq::eval
