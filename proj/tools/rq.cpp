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

// rq: command-line front end for the rhetorical-question pipeline.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rq/corpus.hpp"
#include "rq/eval.hpp"
#include "rq/lexicon.hpp"
#include "rq/rq_extract.hpp"
#include "rq/svm.hpp"

namespace {

using json = nlohmann::json;
using namespace rq;

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string &path, const std::string &contents) {
    if (path.empty() || path == "-") {
        std::cout << contents;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << contents;
}

std::size_t thread_budget() {
    const char *v = std::getenv("RQ_THREADS");
    if (!v || !*v) return 1;
    char *end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (*end != '\0' || n < 1) throw Error(std::string("RQ_THREADS must be a positive integer, got '") + v + "'");
    return static_cast<std::size_t>(n);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// `forums`, `twitter`, or a comma-separated list of category names.
std::vector<std::string> resolve_categories(const std::string &spec) {
    if (spec == "forums" || spec == "twitter") return lexicon::domain_categories(corpus::parse_domain(spec));
    std::vector<std::string> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    if (out.empty()) throw Error("no categories given");
    return out;
}

template <class T>
std::vector<T> parse_list(const std::string &spec, T (*conv)(const std::string &)) {
    std::vector<T> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(conv(item));
    if (out.empty()) throw Error("empty list '" + spec + "'");
    return out;
}

double to_double(const std::string &s) {
    char *end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0') throw Error("bad number '" + s + "'");
    return v;
}

std::size_t to_size(const std::string &s) {
    char *end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0') throw Error("bad integer '" + s + "'");
    return static_cast<std::size_t>(v);
}

// Network config file: key=value pairs over any number of lines; `#` starts a comment.
// Keys in the file override the domain defaults.
neural::NetworkConfig load_network(const std::string &path, const neural::NetworkConfig &base) {
    if (path.empty()) return base;
    std::istringstream in(read_file(path));
    std::string line, all = neural::format_config(base);
    while (std::getline(in, line)) all += " " + line.substr(0, line.find('#'));
    return neural::parse_config(all);
}

struct CorpusArgs {
    std::string in, out;
    std::uint64_t seed = 1;
    double train_frac = 0.8;
};

struct ExtractArgs {
    std::string in, out, domain = "forums";
    std::size_t min_words = 10, max_words = 150;
};

struct FeaturizeArgs {
    std::string in, out, lexicon, categories = "forums", context = "rq";
    std::string embeddings, embedding_format = "text";
    std::string ranking;
    std::size_t folds = 10;
    std::uint64_t seed = 1;
};

// Shared by train, evaluate and grid.
struct ModelArgs {
    std::string train, test, embeddings, embedding_format = "text", lexicon, categories = "forums";
    std::string domain = "forums", context = "rq", features = "w2v+liwc", config;
    std::string lambdas = "0.0001,0.001,0.01,0.1", epochs = "10,30,100";
    std::size_t folds = 3;
    std::uint64_t seed = 1;
    std::string kind = "svm", model_out, model_in, report_out;
};

void add_model_inputs(CLI::App *cmd, ModelArgs &a) {
    cmd->add_option("--embeddings", a.embeddings, "word2vec file")->required();
    cmd->add_option("--embedding-format", a.embedding_format, "text|binary");
    cmd->add_option("--lexicon", a.lexicon, "lexicon dictionary file")->required();
    cmd->add_option("--categories", a.categories, "forums|twitter|comma-separated names");
    cmd->add_option("--domain", a.domain, "forums|twitter");
    cmd->add_option("--seed", a.seed, "random seed");
}

void add_training_options(CLI::App *cmd, ModelArgs &a) {
    cmd->add_option("--features", a.features, "w2v|w2v+liwc");
    cmd->add_option("--config", a.config, "network config file (key=value pairs)");
    cmd->add_option("--grid-lambdas", a.lambdas, "comma-separated SVM lambdas");
    cmd->add_option("--grid-epochs", a.epochs, "comma-separated SVM epoch counts");
    cmd->add_option("--folds", a.folds, "cross-validation folds");
}

eval::ExperimentConfig experiment_config(const ModelArgs &a) {
    eval::ExperimentConfig c;
    c.domain = corpus::parse_domain(a.domain);
    c.features = eval::parse_features(a.features);
    c.context = extract::parse_context_mode(a.context);
    c.seed = a.seed;
    c.grid.lambdas = parse_list<double>(a.lambdas, to_double);
    c.grid.epochs = parse_list<std::size_t>(a.epochs, to_size);
    c.grid.folds = a.folds;
    c.network = load_network(a.config, eval::default_network(c.domain));
    c.categories = resolve_categories(a.categories);
    return c;
}

std::vector<eval::LabeledInstance> load_instances(const std::string &path) {
    return eval::labeled_instances(corpus::load_corpus(path));
}

void check_lexicon_covers(const lexicon::Lexicon &lex, const std::vector<std::string> &cats) {
    for (const auto &c : cats) {
        if (!lex.has_category(c)) throw Error("lexicon has no category '" + c + "'");
    }
}

// ---- corpus ---------------------------------------------------------------

int run_corpus(const std::string &action, const CorpusArgs &a) {
    const corpus::Dataset d = corpus::load_corpus(a.in);
    if (action == "load") {
        std::cout << "records " << d.size() << "\n";
        if (const auto task = d.task()) {
            std::cout << corpus::to_string(task->positive) << ' ' << d.count(task->positive) << "\n"
                      << corpus::to_string(task->negative) << ' ' << d.count(task->negative) << "\n";
        }
        std::cout << "ambiguous " << d.count(corpus::ResolvedClass::ambiguous) << "\n";
        if (!a.out.empty()) corpus::save_corpus(d, a.out);
    } else if (action == "balance") {
        if (a.out.empty()) throw Error("corpus balance needs --out");
        corpus::save_corpus(corpus::balance_classes(d, a.seed), a.out);
    } else {
        if (a.out.empty()) throw Error("corpus split needs --out");
        const auto [train, test] = corpus::split_dataset(d, a.train_frac, a.seed);
        corpus::save_corpus(train, a.out + ".train");
        corpus::save_corpus(test, a.out + ".test");
    }
    return 0;
}

// ---- extract --------------------------------------------------------------

int run_extract(const ExtractArgs &a) {
    const auto domain = corpus::parse_domain(a.domain);
    extract::ExtractOptions opt;
    opt.min_words = a.min_words;
    opt.max_words = a.max_words;
    opt.apply_length_filter = domain == corpus::Domain::forums;
    const corpus::Dataset d = corpus::load_corpus(a.in);
    std::vector<corpus::Record> out;
    for (const auto &r : d.records()) {
        const std::string text = domain == corpus::Domain::twitter ? corpus::clean_tweet(r.text) : r.text;
        const auto rqs = extract::extract_rqs(text::segment_sentences(text), opt);
        if (rqs.empty()) continue;
        corpus::Record rec = r;
        rec.text = text;
        rec.extra["pre"] = extract::joined_raw(rqs[0].pre);
        rec.extra["question"] = rqs[0].question.raw;
        rec.extra["self_answer"] = extract::joined_raw(rqs[0].self_answer);
        rec.extra["post"] = extract::joined_raw(rqs[0].post);
        out.push_back(std::move(rec));
    }
    std::string lines;
    for (const auto &r : out) lines += corpus::serialize_record(r) + "\n";
    write_file(a.out, lines);
    std::cerr << "extracted " << out.size() << " of " << d.size() << " records\n";
    return 0;
}

// ---- featurize ------------------------------------------------------------

int run_featurize(const FeaturizeArgs &a) {
    const auto lex = lexicon::load_lexicon(a.lexicon);
    const auto cats = resolve_categories(a.categories);
    check_lexicon_covers(lex, cats);
    const auto mode = extract::parse_context_mode(a.context);
    std::optional<embeddings::EmbeddingTable> table;
    if (!a.embeddings.empty()) {
        table = embeddings::load_embeddings(a.embeddings, embeddings::parse_format(a.embedding_format));
    }
    const auto instances = load_instances(a.in);

    std::string lines;
    std::vector<svm::Example> examples;
    for (const auto &li : instances) {
        const auto scores = svm::build_category_features(li.instance, mode, lex, cats);
        json j = json::object();
        j["id"] = li.id;
        j["label"] = to_sign(li.label);
        json c = json::object();
        for (std::size_t k = 0; k < cats.size(); ++k) c[cats[k]] = scores[k];
        j["categories"] = c;
        if (table) j["embedding"] = embeddings::average_embedding(extract::context_view(li.instance, mode), *table);
        lines += j.dump() + "\n";
        examples.push_back({scores, li.label});
    }
    write_file(a.out, lines);

    if (!a.ranking.empty()) {
        const auto ranking =
            svm::rank_feature_weights(examples, svm::FeatureLayout::make(0, cats), a.folds, a.seed);
        std::string out;
        for (const auto &[cls, list] : {std::pair{"positive", &ranking.positive}, {"negative", &ranking.negative}}) {
            for (const auto &f : *list) {
                json j = json::object();
                j["class"] = cls;
                j["category"] = f.category;
                j["fw"] = f.fw;
                j["mean_weight"] = f.mean_weight;
                out += j.dump() + "\n";
            }
        }
        write_file(a.ranking, out);
    }
    return 0;
}

// ---- train / evaluate / grid ------------------------------------------------

struct Loaded {
    embeddings::EmbeddingTable table;
    lexicon::Lexicon lexicon;
};

Loaded load_resources(const ModelArgs &a) {
    return {embeddings::load_embeddings(a.embeddings, embeddings::parse_format(a.embedding_format)),
            lexicon::load_lexicon(a.lexicon)};
}

int run_train(const std::string &kind, const ModelArgs &a) {
    auto cfg = experiment_config(a);
    cfg.model = eval::parse_model(kind);
    const auto res = load_resources(a);
    if (cfg.features == eval::FeatureSet::w2v_liwc) check_lexicon_covers(res.lexicon, cfg.categories);
    else cfg.categories.clear();
    const auto train = load_instances(a.train);
    if (cfg.model == eval::ModelKind::svm) {
        const auto fit = eval::fit_svm(train, res.table, res.lexicon, cfg);
        svm::save_model(fit.model, a.model_out);
        std::cerr << "lambda " << fmt(fit.grid.best_lambda) << " epochs " << fit.grid.best_epochs << "\n";
    } else {
        const auto fit = eval::fit_lstm(train, res.table, res.lexicon, cfg);
        neural::save_model(fit.model, a.model_out);
        std::cerr << "best epoch " << fit.best_epoch << "\n";
    }
    return 0;
}

bool is_svm_model(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model " + path);
    std::string line;
    std::getline(in, line);
    return line.starts_with("rq-svm ");
}

int run_evaluate(const ModelArgs &a) {
    auto cfg = experiment_config(a);
    const auto res = load_resources(a);
    const auto test = load_instances(a.test);
    eval::EvalReport report;
    std::vector<Label> predictions;
    if (!a.model_in.empty()) {
        if (is_svm_model(a.model_in)) {
            const auto model = svm::load_model(a.model_in);
            cfg.model = eval::ModelKind::svm;
            cfg.features = model.layout.category_names.empty() ? eval::FeatureSet::w2v : eval::FeatureSet::w2v_liwc;
            check_lexicon_covers(res.lexicon, model.layout.category_names);
            predictions = eval::predict_svm(model, test, res.table, res.lexicon);
        } else {
            const auto model = neural::load_model(a.model_in);
            cfg.model = eval::ModelKind::lstm;
            if (model.config.aux_dim == 0) cfg.categories.clear();
            cfg.features = cfg.categories.empty() ? eval::FeatureSet::w2v : eval::FeatureSet::w2v_liwc;
            check_lexicon_covers(res.lexicon, cfg.categories);
            predictions = eval::predict_lstm(model, cfg.categories, test, res.table, res.lexicon);
        }
        report.provenance["model_file"] = a.model_in;
        report.rows = eval::score_rows(predictions, test, cfg);
    } else {
        if (a.train.empty()) throw Error("evaluate needs --model or --train");
        if (cfg.features == eval::FeatureSet::w2v_liwc) check_lexicon_covers(res.lexicon, cfg.categories);
        const auto train = load_instances(a.train);
        cfg.model = eval::parse_model(a.kind);
        report = eval::run_experiment({train, test, res.table, res.lexicon}, cfg);
        report.provenance["train"] = a.train;
    }
    report.provenance["test"] = a.test;
    report.provenance["domain"] = a.domain;
    report.provenance["seed"] = std::to_string(a.seed);
    report.provenance["embeddings"] = a.embeddings;
    report.provenance["lexicon"] = a.lexicon;
    eval::save_report(report, a.report_out);
    std::cout << eval::render_table(report);
    return 0;
}

int run_grid(const ModelArgs &a) {
    auto cfg = experiment_config(a);
    const auto res = load_resources(a);
    check_lexicon_covers(res.lexicon, cfg.categories);
    const auto train = load_instances(a.train);
    const auto test = load_instances(a.test);
    auto report = eval::run_grid({train, test, res.table, res.lexicon}, cfg, thread_budget());
    report.provenance["train"] = a.train;
    report.provenance["test"] = a.test;
    report.provenance["embeddings"] = a.embeddings;
    report.provenance["lexicon"] = a.lexicon;
    report.provenance["network"] = neural::format_config(cfg.network);
    if (a.report_out.empty() || a.report_out == "-") {
        std::cout << eval::serialize_report(report);
    } else {
        eval::save_report(report, a.report_out);
        std::cout << eval::render_table(report);
    }
    return 0;
}

int run_report(const std::string &in, const std::string &format) {
    const auto report = in.empty() || in == "-" ? eval::parse_report(std::string(
                                                      std::istreambuf_iterator<char>(std::cin), {}))
                                                : eval::load_report(in);
    std::cout << (format == "lines" ? eval::serialize_report(report) : eval::render_table(report));
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"rq: rhetorical-question sarcasm pipeline"};
    app.require_subcommand(1);

    CorpusArgs corpus_args;
    auto *corpus_cmd = app.add_subcommand("corpus", "load, balance or split a record file");
    std::string corpus_action;
    corpus_cmd->add_option("action", corpus_action, "load|balance|split")
        ->required()
        ->check(CLI::IsMember({"load", "balance", "split"}));
    corpus_cmd->add_option("--in", corpus_args.in, "record file")->required();
    corpus_cmd->add_option("--out", corpus_args.out, "output path (split writes PATH.train and PATH.test)");
    corpus_cmd->add_option("--seed", corpus_args.seed, "random seed");
    corpus_cmd->add_option("--train-frac", corpus_args.train_frac, "training fraction for split");

    ExtractArgs extract_args;
    auto *extract_cmd = app.add_subcommand("extract", "find rhetorical questions and their self-answers");
    extract_cmd->add_option("--in", extract_args.in, "record file")->required();
    extract_cmd->add_option("--out", extract_args.out, "output record file")->required();
    extract_cmd->add_option("--domain", extract_args.domain, "forums|twitter")
        ->check(CLI::IsMember({"forums", "twitter"}));
    extract_cmd->add_option("--min-words", extract_args.min_words, "forum post minimum length");
    extract_cmd->add_option("--max-words", extract_args.max_words, "forum post maximum length");

    FeaturizeArgs feat_args;
    auto *feat_cmd = app.add_subcommand("featurize", "score lexicon categories per instance");
    feat_cmd->add_option("--in", feat_args.in, "record file")->required();
    feat_cmd->add_option("--out", feat_args.out, "feature lines (default stdout)");
    feat_cmd->add_option("--lexicon", feat_args.lexicon, "lexicon dictionary file")->required();
    feat_cmd->add_option("--categories", feat_args.categories, "forums|twitter|comma-separated names");
    feat_cmd->add_option("--context", feat_args.context, "rq|pre-rq|rq-post|full");
    feat_cmd->add_option("--embeddings", feat_args.embeddings, "also emit average embeddings");
    feat_cmd->add_option("--embedding-format", feat_args.embedding_format, "text|binary");
    feat_cmd->add_option("--ranking", feat_args.ranking, "write per-class category weight ranking here");
    feat_cmd->add_option("--folds", feat_args.folds, "ranking cross-validation folds");
    feat_cmd->add_option("--seed", feat_args.seed, "random seed");

    ModelArgs train_args;
    std::string train_kind;
    auto *train_cmd = app.add_subcommand("train", "fit an SVM or LSTM model");
    train_cmd->add_option("model", train_kind, "svm|lstm")->required()->check(CLI::IsMember({"svm", "lstm"}));
    train_cmd->add_option("--train", train_args.train, "training record file")->required();
    train_cmd->add_option("--context", train_args.context, "rq|pre-rq|rq-post|full");
    train_cmd->add_option("--out", train_args.model_out, "model file")->required();
    add_model_inputs(train_cmd, train_args);
    add_training_options(train_cmd, train_args);

    ModelArgs eval_args;
    auto *eval_cmd = app.add_subcommand("evaluate", "score a model on a test file");
    eval_cmd->add_option("--test", eval_args.test, "test record file")->required();
    eval_cmd->add_option("--report", eval_args.report_out, "report output path")->required();
    eval_cmd->add_option("--model", eval_args.model_in, "trained model file");
    eval_cmd->add_option("--train", eval_args.train, "train here instead of loading a model");
    eval_cmd->add_option("--kind", eval_args.kind, "svm|lstm when training")
        ->check(CLI::IsMember({"svm", "lstm"}));
    eval_cmd->add_option("--context", eval_args.context, "training view (rq|pre-rq|rq-post|full)");
    add_model_inputs(eval_cmd, eval_args);
    add_training_options(eval_cmd, eval_args);

    std::string report_in, report_format = "table";
    auto *report_cmd = app.add_subcommand("report", "render a report");
    report_cmd->add_option("--in", report_in, "report file (default stdin)");
    report_cmd->add_option("--format", report_format, "table|lines")->check(CLI::IsMember({"table", "lines"}));

    ModelArgs grid_args;
    auto *grid_cmd = app.add_subcommand("grid", "run the full model x features x context sweep");
    grid_cmd->add_option("--train", grid_args.train, "training record file")->required();
    grid_cmd->add_option("--test", grid_args.test, "test record file")->required();
    grid_cmd->add_option("--report", grid_args.report_out, "report output path (default stdout)");
    add_model_inputs(grid_cmd, grid_args);
    add_training_options(grid_cmd, grid_args);

    if (argc <= 1) {
        std::cerr << app.help();
        return 2;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        std::cerr << "rq: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (*corpus_cmd) return run_corpus(corpus_action, corpus_args);
        if (*extract_cmd) return run_extract(extract_args);
        if (*feat_cmd) return run_featurize(feat_args);
        if (*train_cmd) return run_train(train_kind, train_args);
        if (*eval_cmd) return run_evaluate(eval_args);
        if (*report_cmd) return run_report(report_in, report_format);
        if (*grid_cmd) return run_grid(grid_args);
    } catch (const std::exception &e) {
        std::cerr << "rq: error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
