#include "winoreg/forest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <atomic>
#include <thread>

#include <json.hpp>

#include "winoreg/error.hpp"
#include "winoreg/eval.hpp"

namespace winoreg {

namespace {

using ojson = nlohmann::ordered_json;

void check_matrix(const Matrix& X, const std::vector<double>& y) {
    if (X.empty() || y.empty())
        throw EmptyInput("training data must be nonempty");
    if (X.size() != y.size())
        throw DimensionError("row count " + std::to_string(X.size()) +
                             " != target count " + std::to_string(y.size()));
    const std::size_t p = X[0].size();
    if (p == 0)
        throw DimensionError("rows must have at least one feature");
    for (std::size_t i = 0; i < X.size(); ++i) {
        if (X[i].size() != p)
            throw DimensionError("row " + std::to_string(i) + " has " +
                                 std::to_string(X[i].size()) + " features, expected " +
                                 std::to_string(p));
        for (double v : X[i])
            if (!std::isfinite(v))
                throw NumericError("non-finite feature value in row " + std::to_string(i));
        if (!std::isfinite(y[i]))
            throw NumericError("non-finite target in row " + std::to_string(i));
    }
}

void check_hyperparams(const ForestHyperparams& hp, std::size_t p) {
    if (hp.n_trees < 1)
        throw ConfigError("n_trees must be >= 1");
    if (hp.min_samples_leaf < 1)
        throw ConfigError("min_samples_leaf must be >= 1");
    if (hp.features_per_split > p)
        throw ConfigError("features_per_split " + std::to_string(hp.features_per_split) +
                          " exceeds feature count " + std::to_string(p));
}

struct SplitChoice {
    std::size_t feature = 0;
    double threshold = 0.0;
    double reduction = -1.0; ///< SSE reduction; < 0 means no valid split found

    bool found() const { return reduction >= 0.0; }
};

/// Greedy best split over the candidate features: sorts the node's samples
/// per feature, sweeps prefix sums of y and y², and scores each midpoint
/// between distinct neighbours. Candidates are visited in ascending
/// (feature, threshold) order and only strictly better reductions win, which
/// pins the tie-break.
SplitChoice best_split(const Matrix& X, const std::vector<double>& y,
                       const std::vector<std::size_t>& samples,
                       const std::vector<std::size_t>& features,
                       std::size_t min_samples_leaf) {
    const std::size_t n = samples.size();
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t idx : samples) {
        sum += y[idx];
        sum_sq += y[idx] * y[idx];
    }
    const double total_sse = sum_sq - sum * sum / static_cast<double>(n);

    SplitChoice best;
    std::vector<std::pair<double, double>> vals(n); // (feature value, target)
    for (std::size_t f : features) {
        for (std::size_t i = 0; i < n; ++i)
            vals[i] = {X[samples[i]][f], y[samples[i]]};
        std::sort(vals.begin(), vals.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        double left_sum = 0.0, left_sq = 0.0;
        for (std::size_t i = 1; i < n; ++i) {
            left_sum += vals[i - 1].second;
            left_sq += vals[i - 1].second * vals[i - 1].second;
            if (vals[i].first == vals[i - 1].first)
                continue; // no boundary between equal values
            if (i < min_samples_leaf || n - i < min_samples_leaf)
                continue;
            const double nl = static_cast<double>(i), nr = static_cast<double>(n - i);
            const double right_sum = sum - left_sum, right_sq = sum_sq - left_sq;
            const double sse = (left_sq - left_sum * left_sum / nl) +
                               (right_sq - right_sum * right_sum / nr);
            const double reduction = total_sse - sse;
            if (reduction > best.reduction) {
                best.feature = f;
                best.threshold = (vals[i - 1].first + vals[i].first) / 2.0;
                best.reduction = reduction;
            }
        }
    }
    return best;
}

class TreeBuilder {
  public:
    TreeBuilder(const Matrix& X, const std::vector<double>& y,
                const ForestHyperparams& hp, SplitMix64& rng)
        : X_(X), y_(y), hp_(hp), rng_(rng), mtry_(hp.effective_mtry(X[0].size())) {}

    RegressionTree build(std::vector<std::size_t> samples) {
        tree_.nodes.clear();
        grow(std::move(samples), 0);
        return std::move(tree_);
    }

  private:
    int grow(std::vector<std::size_t> samples, std::size_t depth) {
        const int node_id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();

        double sum = 0.0;
        double lo = y_[samples[0]], hi = lo;
        for (std::size_t idx : samples) {
            sum += y_[idx];
            lo = std::min(lo, y_[idx]);
            hi = std::max(hi, y_[idx]);
        }
        tree_.nodes[node_id].value = sum / static_cast<double>(samples.size());

        const bool depth_exhausted = hp_.max_depth != 0 && depth >= hp_.max_depth;
        if (depth_exhausted || samples.size() < 2 * hp_.min_samples_leaf || lo == hi)
            return node_id;

        SplitChoice split =
            best_split(X_, y_, samples, sample_features(), hp_.min_samples_leaf);
        if (!split.found())
            return node_id;

        std::vector<std::size_t> left, right;
        left.reserve(samples.size());
        right.reserve(samples.size());
        for (std::size_t idx : samples)
            (X_[idx][split.feature] <= split.threshold ? left : right).push_back(idx);
        samples.clear();
        samples.shrink_to_fit();

        tree_.nodes[node_id].feature = static_cast<int>(split.feature);
        tree_.nodes[node_id].threshold = split.threshold;
        const int left_id = grow(std::move(left), depth + 1);
        tree_.nodes[node_id].left = left_id;
        const int right_id = grow(std::move(right), depth + 1);
        tree_.nodes[node_id].right = right_id;
        return node_id;
    }

    /// mtry distinct feature indices (ascending, so candidate visiting order
    /// is deterministic). Partial Fisher-Yates over the index pool.
    std::vector<std::size_t> sample_features() {
        const std::size_t p = X_[0].size();
        if (mtry_ >= p) {
            std::vector<std::size_t> all(p);
            std::iota(all.begin(), all.end(), 0);
            return all;
        }
        std::vector<std::size_t> pool(p);
        std::iota(pool.begin(), pool.end(), 0);
        for (std::size_t i = 0; i < mtry_; ++i) {
            std::size_t j = i + static_cast<std::size_t>(rng_.below(p - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(mtry_);
        std::sort(pool.begin(), pool.end());
        return pool;
    }

    const Matrix& X_;
    const std::vector<double>& y_;
    const ForestHyperparams& hp_;
    SplitMix64& rng_;
    std::size_t mtry_;
    RegressionTree tree_;
};

} // namespace

std::size_t ForestHyperparams::effective_mtry(std::size_t p) const {
    if (features_per_split != 0)
        return features_per_split;
    return (p + 2) / 3; // ceil(p/3)
}

double RegressionTree::predict(const std::vector<double>& x) const {
    const TreeNode* node = &nodes[0];
    while (!node->is_leaf())
        node = &nodes[x[static_cast<std::size_t>(node->feature)] <= node->threshold
                          ? static_cast<std::size_t>(node->left)
                          : static_cast<std::size_t>(node->right)];
    return node->value;
}

double ForestModel::predict(const std::vector<double>& x) const {
    if (x.size() != n_features)
        throw DimensionError("input has " + std::to_string(x.size()) +
                             " features, model expects " + std::to_string(n_features));
    for (double v : x)
        if (!std::isfinite(v))
            throw NumericError("non-finite value in prediction input");
    double sum = 0.0;
    for (const auto& tree : trees)
        sum += tree.predict(x);
    return sum / static_cast<double>(trees.size());
}

std::vector<double> ForestModel::predict_many(const Matrix& X) const {
    std::vector<double> out;
    out.reserve(X.size());
    for (const auto& x : X)
        out.push_back(predict(x));
    return out;
}

RegressionTree fit_tree(const Matrix& X, const std::vector<double>& y,
                        const ForestHyperparams& hp, SplitMix64& rng) {
    check_matrix(X, y);
    check_hyperparams(hp, X[0].size());
    std::vector<std::size_t> all(X.size());
    std::iota(all.begin(), all.end(), 0);
    return TreeBuilder(X, y, hp, rng).build(std::move(all));
}

ForestModel fit_forest(const Matrix& X, const std::vector<double>& y,
                       const ForestHyperparams& hp) {
    check_matrix(X, y);
    check_hyperparams(hp, X[0].size());

    ForestModel model;
    model.hp = hp;
    model.n_features = X[0].size();
    model.n_train = X.size();
    model.target_min = *std::min_element(y.begin(), y.end());
    model.target_max = *std::max_element(y.begin(), y.end());
    model.trees.resize(hp.n_trees);

    const SplitMix64 root(hp.seed);
    auto fit_one = [&](std::size_t t) {
        SplitMix64 rng = root.fork(t);
        std::vector<std::size_t> samples(X.size());
        if (hp.bootstrap)
            for (auto& s : samples)
                s = static_cast<std::size_t>(rng.below(X.size()));
        else
            std::iota(samples.begin(), samples.end(), 0);
        model.trees[t] = TreeBuilder(X, y, hp, rng).build(std::move(samples));
    };

    const std::size_t workers =
        std::min<std::size_t>(hp.n_trees, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t t = 0; t < hp.n_trees; ++t)
            fit_one(t);
        return model;
    }
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t t = next.fetch_add(1); t < hp.n_trees; t = next.fetch_add(1))
                fit_one(t);
        });
    for (auto& th : pool)
        th.join();
    return model;
}

std::vector<AblationRow> importance_by_ablation(
    const Matrix& X_train, const std::vector<double>& y_train, const Matrix& X_test,
    const std::vector<double>& y_test, const ForestHyperparams& hp,
    const std::vector<std::pair<std::string, std::vector<std::size_t>>>& groups) {
    check_matrix(X_train, y_train);
    check_matrix(X_test, y_test);
    if (groups.empty())
        throw EmptyInput("no feature groups given");
    const std::size_t p = X_train[0].size();
    if (X_test[0].size() != p)
        throw DimensionError("train and test feature counts differ");
    for (const auto& [name, cols] : groups) {
        if (cols.empty())
            throw ValidationError("feature group '" + name + "' is empty");
        for (std::size_t c : cols)
            if (c >= p)
                throw DimensionError("group '" + name + "' references column " +
                                     std::to_string(c) + " beyond " + std::to_string(p));
        if (cols.size() >= p)
            throw ValidationError("group '" + name + "' would remove every column");
    }

    auto drop_columns = [&](const Matrix& X, const std::vector<std::size_t>& cols) {
        std::vector<bool> dropped(p, false);
        for (std::size_t c : cols)
            dropped[c] = true;
        Matrix out(X.size());
        for (std::size_t i = 0; i < X.size(); ++i) {
            out[i].reserve(p - cols.size());
            for (std::size_t j = 0; j < p; ++j)
                if (!dropped[j])
                    out[i].push_back(X[i][j]);
        }
        return out;
    };

    std::vector<AblationRow> rows;
    for (const auto& [name, cols] : groups) {
        Matrix train = drop_columns(X_train, cols);
        Matrix test = drop_columns(X_test, cols);
        ForestHyperparams ablated = hp;
        if (ablated.features_per_split > train[0].size())
            ablated.features_per_split = train[0].size();
        ForestModel model = fit_forest(train, y_train, ablated);
        std::vector<double> pred = model.predict_many(test);
        AblationRow row;
        row.component = name;
        row.mae = mean_absolute_error(pred, y_test);
        row.accuracy = accuracy_score(pred, y_test);
        row.pearson = pearson(pred, y_test);
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

constexpr const char* kForestMagic = "winoreg-forest";
constexpr int kForestVersion = 1;

} // namespace

void save_forest(const ForestModel& model, const std::string& path) {
    ojson doc;
    doc["magic"] = kForestMagic;
    doc["version"] = kForestVersion;
    doc["hyperparams"] = {{"n_trees", model.hp.n_trees},
                          {"max_depth", model.hp.max_depth},
                          {"min_samples_leaf", model.hp.min_samples_leaf},
                          {"features_per_split", model.hp.features_per_split},
                          {"bootstrap", model.hp.bootstrap},
                          {"seed", model.hp.seed}};
    doc["n_features"] = model.n_features;
    doc["n_train"] = model.n_train;
    doc["target_min"] = model.target_min;
    doc["target_max"] = model.target_max;
    if (!model.feature_schema_json.empty())
        doc["feature_schema"] = ojson::parse(model.feature_schema_json);
    else
        doc["feature_schema"] = nullptr;
    ojson trees = ojson::array();
    for (const auto& tree : model.trees) {
        ojson nodes = ojson::array();
        for (const auto& n : tree.nodes)
            nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
        trees.push_back(std::move(nodes));
    }
    doc["trees"] = std::move(trees);

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path);
    out << doc.dump(1, '\t') << '\n';
    if (!out)
        throw IoError("error while writing " + path);
}

ForestModel load_forest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path);
    ojson doc;
    try {
        doc = ojson::parse(in);
    } catch (const ojson::parse_error& e) {
        throw FormatError(path + ": " + e.what());
    }
    try {
        if (doc.value("magic", "") != kForestMagic)
            throw FormatError(path + ": not a forest model file");
        if (doc.value("version", -1) != kForestVersion)
            throw VersionError(path + ": unsupported forest model version " +
                               doc.value("version", ojson(nullptr)).dump());
        ForestModel model;
        const auto& hp = doc.at("hyperparams");
        model.hp.n_trees = hp.at("n_trees").get<std::size_t>();
        model.hp.max_depth = hp.at("max_depth").get<std::size_t>();
        model.hp.min_samples_leaf = hp.at("min_samples_leaf").get<std::size_t>();
        model.hp.features_per_split = hp.at("features_per_split").get<std::size_t>();
        model.hp.bootstrap = hp.at("bootstrap").get<bool>();
        model.hp.seed = hp.at("seed").get<std::uint64_t>();
        model.n_features = doc.at("n_features").get<std::size_t>();
        model.n_train = doc.at("n_train").get<std::size_t>();
        model.target_min = doc.at("target_min").get<double>();
        model.target_max = doc.at("target_max").get<double>();
        if (!doc.at("feature_schema").is_null())
            model.feature_schema_json = doc.at("feature_schema").dump();
        for (const auto& jtree : doc.at("trees")) {
            RegressionTree tree;
            for (const auto& jn : jtree) {
                if (!jn.is_array() || jn.size() != 5)
                    throw FormatError(path + ": malformed tree node");
                TreeNode n;
                n.feature = jn[0].get<int>();
                n.threshold = jn[1].get<double>();
                n.left = jn[2].get<int>();
                n.right = jn[3].get<int>();
                n.value = jn[4].get<double>();
                tree.nodes.push_back(n);
            }
            if (tree.nodes.empty())
                throw FormatError(path + ": empty tree");
            model.trees.push_back(std::move(tree));
        }
        if (model.trees.empty())
            throw FormatError(path + ": model contains no trees");
        return model;
    } catch (const ojson::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
}

} // namespace winoreg
