// winoreg — command-line surface of the hardness-prediction pipeline.
//
// Subcommands: ingest-corpus, extract, train-rf, train-lstm, predict,
// evaluate, importance, bench. Offline by default; --network is the single
// gate for live hit-count lookups. Settings resolve in the order
// defaults < config file (--config, "key = value" lines) < environment
// (WINOREG_RESOURCES, WINOREG_NETWORK) < explicit flags.
//
// Exit codes: 0 success, 2 usage error, otherwise the category codes of
// winoreg::ErrorCode (documented in the README).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "winoreg/error.hpp"
#include "winoreg/eval.hpp"
#include "winoreg/features.hpp"
#include "winoreg/forest.hpp"
#include "winoreg/lstm.hpp"
#include "winoreg/resources.hpp"
#include "winoreg/schema.hpp"
#include "winoreg/text.hpp"

namespace {

using nlohmann::json;
using namespace winoreg;

struct CliConfig {
    std::string resources;
    bool network = false;
    std::string endpoint;
    std::uint64_t seed = 0;
    double threshold = 0.20;          // hit-count difference cutoff
    long long min_triple_count = 100; // connective-triple evidence floor
};

bool parse_bool(const std::string& raw, const std::string& what) {
    if (raw == "1" || raw == "true" || raw == "yes" || raw == "on") return true;
    if (raw == "0" || raw == "false" || raw == "no" || raw == "off") return false;
    throw ConfigError(what + ": cannot read '" + raw + "' as a boolean");
}

// "key = value" lines; '#' starts a comment; unknown keys are errors.
void apply_config_file(CliConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw ConfigError(path + ":" + std::to_string(line_no) +
                                  ": expected 'key = value'");
            continue;
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string where = path + ":" + std::to_string(line_no);
        try {
            if (key == "resources") cfg.resources = value;
            else if (key == "network") cfg.network = parse_bool(value, where);
            else if (key == "endpoint") cfg.endpoint = value;
            else if (key == "seed") cfg.seed = std::stoull(value);
            else if (key == "threshold") cfg.threshold = std::stod(value);
            else if (key == "min_triple_count") cfg.min_triple_count = std::stoll(value);
            else throw ConfigError(where + ": unknown key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw ConfigError(where + ": cannot parse value '" + value + "'");
        } catch (const std::out_of_range&) {
            throw ConfigError(where + ": value '" + value + "' out of range");
        }
    }
}

void apply_environment(CliConfig& cfg) {
    if (const char* root = std::getenv("WINOREG_RESOURCES")) cfg.resources = root;
    if (const char* net = std::getenv("WINOREG_NETWORK"))
        cfg.network = parse_bool(net, "WINOREG_NETWORK");
}

DatasetFormat format_of(const std::string& path) {
    return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0
               ? DatasetFormat::csv
               : DatasetFormat::json;
}

ResourceBundle load_resources(const CliConfig& cfg) {
    if (cfg.resources.empty())
        throw ConfigError("no resource directory given (--resources, config file, "
                          "or WINOREG_RESOURCES)");
    ResourcePaths paths = ResourcePaths::from_root(cfg.resources);
    paths.network_enabled = cfg.network;
    paths.endpoint = cfg.endpoint;
    return ResourceBundle::load(paths);
}

void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << body;
    if (!out) throw IoError("failed while writing '" + path + "'");
}

// Sniffs the stored model kind from the leading bytes.
bool is_lstm_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file '" + path + "'");
    char head[6] = {};
    in.read(head, 6);
    return in.gcount() == 6 && std::string(head, 6) == "WRLSTM";
}

class ForestPredictor : public HardnessPredictor {
  public:
    ForestPredictor(ForestModel model, ResourceBundle& resources, const CliConfig& cfg)
        : model_(std::move(model)),
          schema_(FeatureSchema::from_json(model_.feature_schema_json)),
          extractor_(resources, ExtractionConfig{cfg.threshold, cfg.min_triple_count}) {}

    double predict(const SchemaHalf& half) const override {
        return model_.predict(schema_.encode(extractor_.extract_all(half)));
    }
    std::string name() const override { return "WinoReg-RF"; }

  private:
    ForestModel model_;
    FeatureSchema schema_;
    FeatureExtractor extractor_;
};

class LstmPredictor : public HardnessPredictor {
  public:
    explicit LstmPredictor(LstmModel model) : model_(std::move(model)) {}

    double predict(const SchemaHalf& half) const override {
        const auto lemmas = analyzer_.preprocess_sequence(half.sentence + " " + half.question);
        return model_.predict(encode(lemmas, model_.vocab(), model_.config().seq_len));
    }
    std::string name() const override { return "WinoReg-LSTM"; }

  private:
    LstmModel model_;
    TextAnalyzer analyzer_;
};

std::unique_ptr<HardnessPredictor> open_predictor(const std::string& model_path,
                                                  std::unique_ptr<ResourceBundle>& resources,
                                                  const CliConfig& cfg) {
    if (is_lstm_model_file(model_path))
        return std::make_unique<LstmPredictor>(load_lstm(model_path));
    resources = std::make_unique<ResourceBundle>(load_resources(cfg));
    return std::make_unique<ForestPredictor>(load_forest(model_path), *resources, cfg);
}

std::vector<double> labels_of(const std::vector<FeatureRow>& rows, const std::string& source) {
    std::vector<double> y;
    y.reserve(rows.size());
    for (const auto& row : rows) {
        if (!row.hardness)
            throw ValidationError("row '" + row.id + "' in " + source +
                                  " has no hardness label");
        y.push_back(*row.hardness);
    }
    return y;
}

Matrix encode_rows(const FeatureSchema& schema, const std::vector<FeatureRow>& rows) {
    Matrix X;
    X.reserve(rows.size());
    for (const auto& row : rows) X.push_back(schema.encode(row.features));
    return X;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_ingest_corpus(const std::string& corpus_path, const std::string& out) {
    CorpusIndex index = CorpusIndex::build_from_file(corpus_path);
    index.save(out);
    std::cout << "indexed " << index.doc_count() << " sentences -> " << out << "\n";
    return 0;
}

int cmd_extract(const CliConfig& cfg, const std::string& data, const std::string& out) {
    const Dataset dataset = load_dataset(data, format_of(data));
    ResourceBundle resources = load_resources(cfg);
    FeatureExtractor extractor(resources, ExtractionConfig{cfg.threshold, cfg.min_triple_count});

    std::vector<FeatureRow> rows;
    rows.reserve(dataset.size());
    std::array<std::size_t, FeatureVector::component_count> covered{};
    for (const auto& half : dataset.halves) {
        FeatureRow row;
        row.id = half.id;
        row.features = extractor.extract_all(half);
        row.hardness = half.hardness;
        for (std::size_t c = 0; c < FeatureVector::component_count; ++c)
            covered[c] += row.features.coverage[c] ? 1 : 0;
        rows.push_back(std::move(row));
    }
    write_feature_csv(out, rows);

    std::cout << "extracted " << FeatureVector::feature_count << " features for "
              << rows.size() << " halves -> " << out << "\n";
    const auto& groups = component_groups();
    for (std::size_t c = 0; c < groups.size(); ++c)
        std::cout << "  " << groups[c].name << ": " << covered[c] << "/" << rows.size()
                  << " halves covered\n";
    return 0;
}

int cmd_train_rf(const CliConfig& cfg, const std::string& features_path,
                 const std::string& labels_path, const std::string& out,
                 const ForestHyperparams& hp_in) {
    std::vector<FeatureRow> rows = read_feature_csv(features_path);
    if (!labels_path.empty()) {
        const Dataset labels = load_dataset(labels_path, format_of(labels_path));
        for (auto& row : rows) {
            const SchemaHalf* half = labels.find(row.id);
            if (half == nullptr)
                throw ValidationError("label file has no half with id '" + row.id + "'");
            row.hardness = half->hardness;
        }
    }
    const std::vector<double> y = labels_of(rows, features_path);

    std::vector<FeatureVector> vectors;
    vectors.reserve(rows.size());
    for (const auto& row : rows) vectors.push_back(row.features);
    const FeatureSchema schema = FeatureSchema::build(vectors);
    const Matrix X = encode_rows(schema, rows);

    ForestHyperparams hp = hp_in;
    hp.seed = cfg.seed;
    ForestModel model = fit_forest(X, y, hp);
    model.feature_schema_json = schema.to_json();
    save_forest(model, out);

    std::cout << "trained " << hp.n_trees << " trees on " << X.size() << " rows x "
              << (X.empty() ? 0 : X[0].size()) << " columns (mtry "
              << hp.effective_mtry(X.empty() ? 0 : X[0].size()) << ", seed " << cfg.seed
              << ") -> " << out << "\n";
    return 0;
}

int cmd_train_lstm(const CliConfig& cfg, const std::string& data, const std::string& out,
                   LstmConfig model_cfg, TrainConfig train_cfg) {
    const Dataset dataset = load_dataset(data, format_of(data));
    TextAnalyzer analyzer;

    std::vector<std::vector<std::string>> documents;
    std::vector<double> targets;
    documents.reserve(dataset.size());
    targets.reserve(dataset.size());
    for (const auto& half : dataset.halves) {
        if (!half.labeled())
            throw ValidationError("half '" + half.id + "' has no hardness label");
        documents.push_back(analyzer.preprocess_sequence(half.sentence + " " + half.question));
        targets.push_back(*half.hardness);
    }

    const Vocabulary vocab = Vocabulary::build(documents);
    std::vector<std::vector<std::size_t>> sequences;
    sequences.reserve(documents.size());
    for (const auto& doc : documents)
        sequences.push_back(encode(doc, vocab, model_cfg.seq_len));

    model_cfg.seed = cfg.seed;
    train_cfg.seed = cfg.seed;
    LstmModel model(vocab, model_cfg);
    const std::vector<EpochStats> history = train_lstm(model, sequences, targets, train_cfg);
    save_lstm(model, out);

    const std::size_t n_train = static_cast<std::size_t>(
        std::floor(double(sequences.size()) * (1.0 - train_cfg.validation_fraction)));
    std::cout << "trained " << history.size() << " epochs on " << n_train << " samples ("
              << sequences.size() - n_train << " held out, vocabulary " << vocab.size()
              << ", seed " << cfg.seed << ") -> " << out << "\n";
    if (!history.empty())
        std::cout << "  epoch 1 mae " << history.front().train_mae << " (val "
                  << history.front().val_mae << "); epoch " << history.size() << " mae "
                  << history.back().train_mae << " (val " << history.back().val_mae << ")\n";
    return 0;
}

int cmd_predict(const CliConfig& cfg, const std::string& model_path, const std::string& data,
                const std::string& out) {
    const Dataset dataset = load_dataset(data, format_of(data));
    std::unique_ptr<ResourceBundle> resources;
    const auto predictor = open_predictor(model_path, resources, cfg);

    json rows = json::array();
    for (const auto& half : dataset.halves)
        rows.push_back({{"id", half.id}, {"hardness", predictor->predict(half)}});
    write_text_file(out, rows.dump(1, '\t') + "\n");
    std::cout << predictor->name() << " scored " << dataset.size() << " halves -> " << out
              << "\n";
    return 0;
}

int cmd_evaluate(const CliConfig& cfg, const std::string& model_path, const std::string& data,
                 const std::string& subset_path, const std::string& out) {
    const Dataset dataset = load_dataset(data, format_of(data));
    std::unique_ptr<ResourceBundle> resources;
    const auto predictor = open_predictor(model_path, resources, cfg);

    std::vector<EvaluationReport> reports;
    reports.push_back(evaluate(*predictor, dataset));
    if (!subset_path.empty()) {
        const auto id_set = load_id_list(subset_path);
        const std::vector<std::string> ids(id_set.begin(), id_set.end());
        reports.push_back(evaluate(*predictor, dataset, &ids, subset_path));
    }
    if (!out.empty()) write_text_file(out, reports_to_json(reports));
    std::cout << reports_to_table(reports);
    return 0;
}

int cmd_importance(const CliConfig& cfg, const std::string& train_path,
                   const std::string& test_path, const std::string& out,
                   const ForestHyperparams& hp_in) {
    const std::vector<FeatureRow> train_rows = read_feature_csv(train_path);
    const std::vector<FeatureRow> test_rows = read_feature_csv(test_path);
    const std::vector<double> y_train = labels_of(train_rows, train_path);
    const std::vector<double> y_test = labels_of(test_rows, test_path);

    std::vector<FeatureVector> vectors;
    vectors.reserve(train_rows.size());
    for (const auto& row : train_rows) vectors.push_back(row.features);
    const FeatureSchema schema = FeatureSchema::build(vectors);
    const Matrix X_train = encode_rows(schema, train_rows);
    const Matrix X_test = encode_rows(schema, test_rows);

    std::vector<std::pair<std::string, std::vector<std::size_t>>> groups;
    for (const auto& group : component_groups()) {
        std::vector<std::size_t> cols;
        for (const auto& feature : group.features)
            cols.push_back(FeatureVector::index_of(feature));
        groups.emplace_back(group.name, std::move(cols));
    }

    ForestHyperparams hp = hp_in;
    hp.seed = cfg.seed;
    const std::vector<AblationRow> rows =
        importance_by_ablation(X_train, y_train, X_test, y_test, hp, groups);

    json body = json::array();
    for (const auto& row : rows) {
        json entry = {{"component", row.component},
                      {"mae", row.mae},
                      {"accuracy", row.accuracy}};
        entry["pearson"] = row.pearson ? json(*row.pearson) : json(nullptr);
        body.push_back(entry);
    }
    if (!out.empty()) write_text_file(out, body.dump(1, '\t') + "\n");

    std::cout << "component ablation (" << rows.size() << " rows; metrics without each "
              << "component)\n";
    for (const auto& row : rows) {
        std::cout << "  " << row.component << ": accuracy " << row.accuracy << ", correlation ";
        if (row.pearson) std::cout << *row.pearson;
        else std::cout << "undefined";
        std::cout << "\n";
    }
    return 0;
}

int cmd_bench(const CliConfig& cfg, const std::string& model_path, const std::string& data,
              const std::string& out, std::size_t warmup) {
    const Dataset dataset = load_dataset(data, format_of(data));
    json body;

    if (!model_path.empty()) {
        std::unique_ptr<ResourceBundle> resources;
        const auto predictor = open_predictor(model_path, resources, cfg);
        const TimingReport report = benchmark_latency(*predictor, dataset, warmup);
        body["inference"] = {{"system", predictor->name()},
                             {"mean_ms", report.mean_ms},
                             {"p95_ms", report.p95_ms},
                             {"n", report.n}};
        std::cout << predictor->name() << " inference: mean " << report.mean_ms
                  << " ms/half, p95 " << report.p95_ms << " ms (" << report.n << " halves)\n";
    }

    if (!cfg.resources.empty()) {
        ResourceBundle resources = load_resources(cfg);
        FeatureExtractor extractor(resources,
                                   ExtractionConfig{cfg.threshold, cfg.min_triple_count});
        // One untimed pass warms every cache the extractor touches.
        for (const auto& half : dataset.halves) extractor.extract_all(half);
        const FunctionPredictor probe("extraction", [&](const SchemaHalf& half) {
            extractor.extract_all(half);
            return 0.0;
        });
        const TimingReport report = benchmark_latency(probe, dataset, warmup);
        body["extraction"] = {{"mean_ms", report.mean_ms},
                              {"p95_ms", report.p95_ms},
                              {"n", report.n}};
        std::cout << "feature extraction (warm caches): mean " << report.mean_ms
                  << " ms/half, p95 " << report.p95_ms << " ms (" << report.n << " halves)\n";
    }

    if (body.empty())
        throw ConfigError("bench needs --model and/or --resources to have work to time");
    if (!out.empty()) write_text_file(out, body.dump(1, '\t') + "\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CliConfig cfg;
    std::string config_path;
    // The config file must be read before flag binding so explicit flags win.
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) config_path = argv[i + 1];
        else if (arg.rfind("--config=", 0) == 0) config_path = arg.substr(9);
    }

    try {
        if (!config_path.empty()) apply_config_file(cfg, config_path);
        apply_environment(cfg);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    }

    CLI::App app{"WinoReg: predicts how hard humans find Winograd schema halves"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--config", config_path, "key = value settings file (already applied)");
    app.add_option("--resources", cfg.resources, "resource directory root");
    app.add_flag("--network", cfg.network, "allow live hit-count lookups");
    app.add_option("--endpoint", cfg.endpoint, "hit-count service URL");
    app.add_option("--seed", cfg.seed, "random seed for every stochastic step");
    app.add_option("--threshold", cfg.threshold, "hit-count difference cutoff");
    app.add_option("--min-triple-count", cfg.min_triple_count,
                   "connective-triple evidence floor");

    std::string corpus_path, data_path, out_path, features_path, labels_path;
    std::string model_path, subset_path, test_features_path;

    auto* ingest = app.add_subcommand("ingest-corpus", "index a plain-text corpus");
    ingest->fallthrough();
    ingest->add_option("--corpus", corpus_path, "one sentence per line")->required();
    ingest->add_option("--out", out_path, "index file to write")->required();

    auto* extract = app.add_subcommand("extract", "compute feature vectors");
    extract->fallthrough();
    extract->add_option("--data", data_path, "schema dataset (json or csv)")->required();
    extract->add_option("--out", out_path, "feature CSV to write")->required();

    ForestHyperparams hp;
    auto add_forest_flags = [&hp](CLI::App* cmd) {
        cmd->add_option("--trees", hp.n_trees, "ensemble size");
        cmd->add_option("--max-depth", hp.max_depth, "0 = unlimited");
        cmd->add_option("--min-leaf", hp.min_samples_leaf, "minimum samples per leaf");
        cmd->add_option("--mtry", hp.features_per_split, "features per split; 0 = ceil(p/3)");
        cmd->add_flag("--no-bootstrap", [&hp](std::int64_t) { hp.bootstrap = false; },
                      "fit every tree on the full training set");
    };

    auto* train_rf = app.add_subcommand("train-rf", "fit the random-forest regressor");
    train_rf->fallthrough();
    train_rf->add_option("--features", features_path, "training feature CSV")->required();
    train_rf->add_option("--labels", labels_path, "dataset overriding the CSV labels");
    train_rf->add_option("--out", out_path, "model file to write")->required();
    add_forest_flags(train_rf);

    LstmConfig lstm_cfg;
    TrainConfig train_cfg;
    auto* train_lstm_cmd = app.add_subcommand("train-lstm", "fit the sequence regressor");
    train_lstm_cmd->fallthrough();
    train_lstm_cmd->add_option("--data", data_path, "labeled schema dataset")->required();
    train_lstm_cmd->add_option("--out", out_path, "model file to write")->required();
    train_lstm_cmd->add_option("--epochs", train_cfg.epochs, "training epochs");
    train_lstm_cmd->add_option("--batch", train_cfg.batch_size, "minibatch size");
    train_lstm_cmd->add_option("--lr", train_cfg.learning_rate, "Adamax step size");
    train_lstm_cmd->add_option("--val-fraction", train_cfg.validation_fraction,
                               "held-out tail fraction");
    train_lstm_cmd->add_option("--units", lstm_cfg.units, "LSTM state width");
    train_lstm_cmd->add_option("--embed-dim", lstm_cfg.embed_dim, "embedding width");
    train_lstm_cmd->add_option("--seq-len", lstm_cfg.seq_len, "padded sequence length");
    train_lstm_cmd->add_option("--dropout", lstm_cfg.dropout, "input dropout rate");
    train_lstm_cmd->add_option("--recurrent-dropout", lstm_cfg.recurrent_dropout,
                               "hidden-state dropout rate");

    auto* predict = app.add_subcommand("predict", "score halves with a stored model");
    predict->fallthrough();
    predict->add_option("--model", model_path, "forest or sequence model file")->required();
    predict->add_option("--data", data_path, "schema dataset")->required();
    predict->add_option("--out", out_path, "prediction JSON to write")->required();

    auto* evaluate = app.add_subcommand("evaluate", "score a model against labels");
    evaluate->fallthrough();
    evaluate->add_option("--model", model_path, "forest or sequence model file")->required();
    evaluate->add_option("--data", data_path, "labeled schema dataset")->required();
    evaluate->add_option("--subset", subset_path, "id list for an extra report row");
    evaluate->add_option("--out", out_path, "report JSON to write");

    auto* importance = app.add_subcommand("importance", "leave-one-component-out ablation");
    importance->fallthrough();
    importance->add_option("--features", features_path, "training feature CSV")->required();
    importance->add_option("--test", test_features_path, "held-out feature CSV")->required();
    importance->add_option("--out", out_path, "ablation JSON to write");
    add_forest_flags(importance);

    std::size_t warmup = 3;
    auto* bench = app.add_subcommand("bench", "per-half latency measurements");
    bench->fallthrough();
    bench->add_option("--data", data_path, "schema dataset to time against")->required();
    bench->add_option("--model", model_path, "model whose inference is timed");
    bench->add_option("--out", out_path, "timing JSON to write");
    bench->add_option("--warmup", warmup, "unscored warmup passes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (ingest->parsed()) return cmd_ingest_corpus(corpus_path, out_path);
        if (extract->parsed()) return cmd_extract(cfg, data_path, out_path);
        if (train_rf->parsed())
            return cmd_train_rf(cfg, features_path, labels_path, out_path, hp);
        if (train_lstm_cmd->parsed())
            return cmd_train_lstm(cfg, data_path, out_path, lstm_cfg, train_cfg);
        if (predict->parsed()) return cmd_predict(cfg, model_path, data_path, out_path);
        if (evaluate->parsed())
            return cmd_evaluate(cfg, model_path, data_path, subset_path, out_path);
        if (importance->parsed())
            return cmd_importance(cfg, features_path, test_features_path, out_path, hp);
        if (bench->parsed()) return cmd_bench(cfg, model_path, data_path, out_path, warmup);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
