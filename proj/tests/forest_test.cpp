#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <set>
#include <vector>

#include "support.hpp"
#include "winoreg/error.hpp"
#include "winoreg/eval.hpp"
#include "winoreg/forest.hpp"
#include "winoreg/rng.hpp"

using namespace winoreg;

namespace {

/// Brute-force reference split: enumerates every (feature, midpoint)
/// candidate in ascending order, computing node SSE from scratch, and keeps
/// only strictly better reductions. Independent of the production sweep.
struct OracleSplit {
    std::size_t feature = 0;
    double threshold = 0.0;
    double reduction = -1.0;
    bool found() const { return reduction >= 0.0; }
};

/// SSE via the moment identity. The fixtures use dyadic-rational targets, so
/// the sums here are exact and equal-gain candidates stay exact ties; the
/// expression mirrors the library's operation order so those ties resolve
/// the same way under the shared strictly-greater acceptance rule.
double sse_of(const std::vector<double>& targets) {
    if (targets.empty()) return 0.0;
    double sum = 0.0, sum_sq = 0.0;
    for (double t : targets) {
        sum += t;
        sum_sq += t * t;
    }
    return sum_sq - sum * sum / static_cast<double>(targets.size());
}

OracleSplit oracle_best_split(const Matrix& X, const std::vector<double>& y,
                              const std::vector<std::size_t>& samples,
                              std::size_t min_samples_leaf) {
    OracleSplit best;
    const std::size_t p = X[0].size();
    std::vector<double> node_targets;
    for (std::size_t idx : samples) node_targets.push_back(y[idx]);
    const double total = sse_of(node_targets);

    for (std::size_t f = 0; f < p; ++f) {
        std::set<double> distinct;
        for (std::size_t idx : samples) distinct.insert(X[idx][f]);
        std::vector<double> values(distinct.begin(), distinct.end());
        for (std::size_t b = 1; b < values.size(); ++b) {
            const double threshold = (values[b - 1] + values[b]) / 2.0;
            std::vector<double> left, right;
            for (std::size_t idx : samples)
                (X[idx][f] <= threshold ? left : right).push_back(y[idx]);
            if (left.size() < min_samples_leaf || right.size() < min_samples_leaf)
                continue;
            const double reduction = total - (sse_of(left) + sse_of(right));
            if (reduction > best.reduction) {
                best.feature = f;
                best.threshold = threshold;
                best.reduction = reduction;
            }
        }
    }
    return best;
}

/// Walks a fitted tree, recomputing each node's sample set, and checks every
/// internal node against the oracle (and every leaf against a stopping rule).
void check_tree_against_oracle(const RegressionTree& tree, const Matrix& X,
                               const std::vector<double>& y,
                               const ForestHyperparams& hp) {
    struct Frame {
        int node;
        std::vector<std::size_t> samples;
        std::size_t depth;
    };
    std::vector<std::size_t> all(X.size());
    std::iota(all.begin(), all.end(), 0);
    std::vector<Frame> stack{{0, std::move(all), 0}};

    while (!stack.empty()) {
        Frame frame = std::move(stack.back());
        stack.pop_back();
        const TreeNode& node = tree.nodes[static_cast<std::size_t>(frame.node)];
        REQUIRE(!frame.samples.empty());

        double lo = y[frame.samples[0]], hi = lo, sum = 0.0;
        for (std::size_t idx : frame.samples) {
            sum += y[idx];
            lo = std::min(lo, y[idx]);
            hi = std::max(hi, y[idx]);
        }
        CHECK(node.value ==
              doctest::Approx(sum / frame.samples.size()).epsilon(1e-12));

        const OracleSplit oracle =
            oracle_best_split(X, y, frame.samples, hp.min_samples_leaf);
        const bool depth_exhausted = hp.max_depth != 0 && frame.depth >= hp.max_depth;

        if (node.is_leaf()) {
            const bool may_stop = depth_exhausted ||
                                  frame.samples.size() < 2 * hp.min_samples_leaf ||
                                  lo == hi || !oracle.found();
            CHECK(may_stop);
            continue;
        }
        REQUIRE(oracle.found());
        CHECK(static_cast<std::size_t>(node.feature) == oracle.feature);
        CHECK(node.threshold == oracle.threshold);

        Frame left{node.left, {}, frame.depth + 1};
        Frame right{node.right, {}, frame.depth + 1};
        for (std::size_t idx : frame.samples)
            (X[idx][static_cast<std::size_t>(node.feature)] <= node.threshold
                 ? left.samples
                 : right.samples)
                .push_back(idx);
        CHECK(left.samples.size() >= hp.min_samples_leaf);
        CHECK(right.samples.size() >= hp.min_samples_leaf);
        stack.push_back(std::move(left));
        stack.push_back(std::move(right));
    }
}

/// Random dataset on an eighth-of-integer grid: sums are exact in double, so
/// oracle and production arithmetic agree bit-for-bit and row order cannot
/// perturb the fit.
void random_dataset(SplitMix64& rng, std::size_t max_rows, std::size_t max_cols,
                    Matrix& X, std::vector<double>& y) {
    const std::size_t n = 5 + rng.below(max_rows - 4);
    const std::size_t p = 1 + rng.below(max_cols);
    // Few distinct feature values => plenty of ties for the tie-break rules.
    const std::size_t cardinality = 2 + rng.below(8);
    X.assign(n, std::vector<double>(p));
    y.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j)
            X[i][j] = static_cast<double>(rng.below(cardinality)) / 4.0;
        y[i] = static_cast<double>(rng.below(33)) / 8.0;
    }
}

/// Same value grid with the shape fixed exactly (random_dataset randomizes it).
void fixed_dataset(SplitMix64& rng, std::size_t n, std::size_t p, Matrix& X,
                   std::vector<double>& y) {
    X.assign(n, std::vector<double>(p));
    y.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j)
            X[i][j] = static_cast<double>(rng.below(9)) / 4.0;
        y[i] = static_cast<double>(rng.below(33)) / 8.0;
    }
}

} // namespace

TEST_CASE("every split matches the exhaustive oracle on random data") {
    SplitMix64 rng(424242);
    for (int trial = 0; trial < 24; ++trial) {
        CAPTURE(trial);
        Matrix X;
        std::vector<double> y;
        random_dataset(rng, 200, 10, X, y);

        ForestHyperparams hp;
        hp.features_per_split = X[0].size(); // oracle sees all features
        hp.min_samples_leaf = 1 + rng.below(4);
        hp.max_depth = trial % 3 == 0 ? 3 : 0;
        SplitMix64 tree_rng(rng.next());
        const RegressionTree tree = fit_tree(X, y, hp, tree_rng);
        check_tree_against_oracle(tree, X, y, hp);
    }
}

TEST_CASE("tree memorizes distinct training points at min leaf 1") {
    Matrix X{{0.0}, {1.0}, {2.0}, {3.0}, {4.0}};
    std::vector<double> y{0.1, 0.9, 0.4, 0.7, 0.2};
    ForestHyperparams hp;
    hp.min_samples_leaf = 1;
    hp.features_per_split = 1;
    SplitMix64 rng(1);
    const RegressionTree tree = fit_tree(X, y, hp, rng);
    for (std::size_t i = 0; i < X.size(); ++i)
        CHECK(tree.predict(X[i]) == y[i]);
}

TEST_CASE("tie-break picks the lowest feature then the lowest threshold") {
    // Feature 1 duplicates feature 0, and both allow the same two boundaries
    // with equal reductions; the split must land on feature 0's lower midpoint.
    Matrix X{{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}, {3.0, 3.0}};
    std::vector<double> y{0.0, 1.0, 1.0, 0.0};
    ForestHyperparams hp;
    hp.min_samples_leaf = 1;
    hp.features_per_split = 2;
    SplitMix64 rng(7);
    const RegressionTree tree = fit_tree(X, y, hp, rng);
    REQUIRE(!tree.nodes.empty());
    REQUIRE(!tree.nodes[0].is_leaf());
    CHECK(tree.nodes[0].feature == 0);
    CHECK(tree.nodes[0].threshold == 0.5);
}

TEST_CASE("single unbootstrapped tree equals the forest") {
    SplitMix64 rng(515151);
    for (int trial = 0; trial < 5; ++trial) {
        Matrix X;
        std::vector<double> y;
        random_dataset(rng, 120, 6, X, y);

        ForestHyperparams hp;
        hp.n_trees = 1;
        hp.bootstrap = false;
        hp.features_per_split = X[0].size();
        hp.seed = rng.next();

        SplitMix64 tree_rng(0); // full mtry consumes no randomness
        const RegressionTree tree = fit_tree(X, y, hp, tree_rng);
        const ForestModel forest = fit_forest(X, y, hp);

        Matrix probes;
        std::vector<double> dummy;
        random_dataset(rng, 40, 1, probes, dummy);
        for (auto& row : probes) row.resize(X[0].size(), row[0]);
        for (const auto& x : probes) CHECK(forest.predict(x) == tree.predict(x));
        for (const auto& x : X) CHECK(forest.predict(x) == tree.predict(x));
    }
}

TEST_CASE("fitting is deterministic in the seed and row-order invariant") {
    SplitMix64 rng(616161);
    Matrix X;
    std::vector<double> y;
    random_dataset(rng, 150, 8, X, y);

    ForestHyperparams hp;
    hp.n_trees = 12;
    hp.seed = 99;

    const ForestModel a = fit_forest(X, y, hp);
    const ForestModel b = fit_forest(X, y, hp);
    REQUIRE(a.trees.size() == b.trees.size());
    for (std::size_t t = 0; t < a.trees.size(); ++t) {
        REQUIRE(a.trees[t].nodes.size() == b.trees[t].nodes.size());
        for (std::size_t n = 0; n < a.trees[t].nodes.size(); ++n) {
            CHECK(a.trees[t].nodes[n].feature == b.trees[t].nodes[n].feature);
            CHECK(a.trees[t].nodes[n].threshold == b.trees[t].nodes[n].threshold);
            CHECK(a.trees[t].nodes[n].value == b.trees[t].nodes[n].value);
        }
    }

    ForestHyperparams other = hp;
    other.seed = 100;
    const ForestModel c = fit_forest(X, y, other);
    bool any_difference = false;
    for (const auto& x : X)
        any_difference = any_difference || c.predict(x) != a.predict(x);
    CHECK(any_difference);

    // Permuting rows leaves a full-feature unbootstrapped tree unchanged.
    ForestHyperparams single;
    single.n_trees = 1;
    single.bootstrap = false;
    single.features_per_split = X[0].size();
    Matrix Xp = X;
    std::vector<double> yp = y;
    std::vector<std::size_t> perm(X.size());
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = perm.size(); i-- > 1;)
        std::swap(perm[i], perm[rng.below(i + 1)]);
    for (std::size_t i = 0; i < perm.size(); ++i) {
        Xp[i] = X[perm[i]];
        yp[i] = y[perm[i]];
    }
    const ForestModel orig = fit_forest(X, y, single);
    const ForestModel permuted = fit_forest(Xp, yp, single);
    for (const auto& x : X) CHECK(orig.predict(x) == permuted.predict(x));
}

TEST_CASE("forest predictions stay inside the training target range") {
    SplitMix64 rng(717171);
    Matrix X;
    std::vector<double> y;
    random_dataset(rng, 100, 5, X, y);
    ForestHyperparams hp;
    hp.n_trees = 30;
    hp.seed = 3;
    const ForestModel model = fit_forest(X, y, hp);

    const double lo = *std::min_element(y.begin(), y.end());
    const double hi = *std::max_element(y.begin(), y.end());
    CHECK(model.target_min == lo);
    CHECK(model.target_max == hi);
    for (int i = 0; i < 50; ++i) {
        std::vector<double> x(X[0].size());
        for (auto& v : x) v = rng.uniform(-10.0, 10.0);
        const double pred = model.predict(x);
        CHECK(pred >= lo);
        CHECK(pred <= hi);
    }
}

TEST_CASE("depth and leaf-size limits are honored") {
    SplitMix64 rng(818181);
    Matrix X;
    std::vector<double> y;
    random_dataset(rng, 180, 6, X, y);

    ForestHyperparams hp;
    hp.max_depth = 2;
    hp.min_samples_leaf = 5;
    hp.features_per_split = X[0].size();
    SplitMix64 tree_rng(4);
    const RegressionTree tree = fit_tree(X, y, hp, tree_rng);

    // Depth check: no path from the root may cross max_depth splits.
    struct Frame {
        int node;
        std::size_t depth;
    };
    std::vector<Frame> stack{{0, 0}};
    while (!stack.empty()) {
        const Frame f = stack.back();
        stack.pop_back();
        const TreeNode& node = tree.nodes[static_cast<std::size_t>(f.node)];
        if (node.is_leaf()) continue;
        CHECK(f.depth < hp.max_depth);
        stack.push_back({node.left, f.depth + 1});
        stack.push_back({node.right, f.depth + 1});
    }
    check_tree_against_oracle(tree, X, y, hp); // also validates leaf sizes
}

TEST_CASE("effective mtry follows the ceil(p/3) regression convention") {
    ForestHyperparams hp;
    CHECK(hp.effective_mtry(47) == 16);
    CHECK(hp.effective_mtry(3) == 1);
    CHECK(hp.effective_mtry(4) == 2);
    CHECK(hp.effective_mtry(1) == 1);
    hp.features_per_split = 5;
    CHECK(hp.effective_mtry(47) == 5);
}

TEST_CASE("training rejects malformed inputs and hyperparameters") {
    Matrix X{{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}};
    std::vector<double> y{0.1, 0.2, 0.3};
    ForestHyperparams hp;

    CHECK_THROWS_AS(fit_forest({}, {}, hp), EmptyInput);
    CHECK_THROWS_AS(fit_forest(X, {0.1, 0.2}, hp), DimensionError);
    CHECK_THROWS_AS(fit_forest({{1.0}, {2.0, 3.0}, {4.0}}, y, hp), DimensionError);
    CHECK_THROWS_AS(fit_forest({{1.0, 2.0}, {3.0, 4.0}, {5.0, NAN}}, y, hp),
                    NumericError);
    CHECK_THROWS_AS(fit_forest(X, {0.1, INFINITY, 0.3}, hp), NumericError);

    ForestHyperparams bad = hp;
    bad.n_trees = 0;
    CHECK_THROWS_AS(fit_forest(X, y, bad), ConfigError);
    bad = hp;
    bad.min_samples_leaf = 0;
    CHECK_THROWS_AS(fit_forest(X, y, bad), ConfigError);
    bad = hp;
    bad.features_per_split = 3; // only two columns
    CHECK_THROWS_AS(fit_forest(X, y, bad), ConfigError);

    ForestHyperparams ok;
    ok.n_trees = 2;
    const ForestModel model = fit_forest(X, y, ok);
    CHECK_THROWS_AS(model.predict({1.0}), DimensionError);
    CHECK_THROWS_AS(model.predict({1.0, NAN}), NumericError);
}

TEST_CASE("model files round-trip bit-exact predictions") {
    SplitMix64 rng(919191);
    Matrix X;
    std::vector<double> y;
    random_dataset(rng, 80, 5, X, y);
    ForestHyperparams hp;
    hp.n_trees = 7;
    hp.seed = 11;
    ForestModel model = fit_forest(X, y, hp);
    model.feature_schema_json = "{\"features\": []}";

    const auto path = (testsupport::scratch_dir() / "forest_rt.json").string();
    save_forest(model, path);
    const ForestModel loaded = load_forest(path);

    CHECK(loaded.hp.n_trees == model.hp.n_trees);
    CHECK(loaded.hp.seed == model.hp.seed);
    CHECK(loaded.n_features == model.n_features);
    CHECK(loaded.n_train == model.n_train);
    CHECK(loaded.target_min == model.target_min);
    CHECK(loaded.target_max == model.target_max);
    CHECK_FALSE(loaded.feature_schema_json.empty());
    for (const auto& x : X) CHECK(loaded.predict(x) == model.predict(x));

    // Saving twice produces identical bytes.
    const auto path2 = (testsupport::scratch_dir() / "forest_rt2.json").string();
    save_forest(model, path2);
    std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
    const std::string c1((std::istreambuf_iterator<char>(f1)), {});
    const std::string c2((std::istreambuf_iterator<char>(f2)), {});
    CHECK(c1 == c2);
}

TEST_CASE("loading rejects foreign files and future versions") {
    const auto dir = testsupport::scratch_dir();
    const auto missing = (dir / "no_such_model.json").string();
    CHECK_THROWS_AS(load_forest(missing), IoError);

    const auto garbage = (dir / "garbage_model.json").string();
    std::ofstream(garbage) << "this is not json";
    CHECK_THROWS_AS(load_forest(garbage), FormatError);

    const auto foreign = (dir / "foreign_model.json").string();
    std::ofstream(foreign) << "{\"magic\": \"other-tool\", \"version\": 1}";
    CHECK_THROWS_AS(load_forest(foreign), FormatError);

    const auto future = (dir / "future_model.json").string();
    std::ofstream(future) << "{\"magic\": \"winoreg-forest\", \"version\": 999}";
    CHECK_THROWS_AS(load_forest(future), VersionError);
}

TEST_CASE("ablation reports one row per group in order") {
    SplitMix64 rng(212121);
    Matrix X;
    std::vector<double> y;
    fixed_dataset(rng, 150, 6, X, y);
    Matrix X_test;
    std::vector<double> y_test;
    fixed_dataset(rng, 60, 6, X_test, y_test);

    ForestHyperparams hp;
    hp.n_trees = 8;
    hp.seed = 5;
    const std::vector<std::pair<std::string, std::vector<std::size_t>>> groups{
        {"alpha", {0, 1}}, {"beta", {2}}, {"gamma", {3, 4, 5}}};
    const auto rows = importance_by_ablation(X, y, X_test, y_test, hp, groups);

    REQUIRE(rows.size() == 3);
    CHECK(rows[0].component == "alpha");
    CHECK(rows[1].component == "beta");
    CHECK(rows[2].component == "gamma");
    for (const auto& row : rows) {
        CHECK(row.mae >= 0.0);
        CHECK(row.accuracy == doctest::Approx(100.0 - 100.0 * row.mae).epsilon(1e-12));
        if (row.pearson) {
            CHECK(*row.pearson >= -1.0 - 1e-12);
            CHECK(*row.pearson <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("ablating a constant dummy column changes nothing") {
    SplitMix64 rng(313131);
    Matrix X;
    std::vector<double> y;
    fixed_dataset(rng, 140, 5, X, y);
    Matrix X_test;
    std::vector<double> y_test;
    fixed_dataset(rng, 50, 5, X_test, y_test);

    auto with_dummy = [](Matrix m) {
        for (auto& row : m) row.push_back(3.25);
        return m;
    };
    const Matrix Xd = with_dummy(X);
    const Matrix Xd_test = with_dummy(X_test);

    ForestHyperparams hp;
    hp.n_trees = 10;
    hp.seed = 21;
    hp.features_per_split = Xd[0].size(); // full candidates: no rng draws differ

    // Baseline: the dummy-bearing model evaluated on the dummy-bearing test set.
    const ForestModel full = fit_forest(Xd, y, hp);
    const std::vector<double> base_pred = full.predict_many(Xd_test);

    const std::vector<std::pair<std::string, std::vector<std::size_t>>> groups{
        {"dummy", {5}}};
    const auto rows = importance_by_ablation(Xd, y, Xd_test, y_test, hp, groups);
    REQUIRE(rows.size() == 1);

    const double base_mae = mean_absolute_error(base_pred, y_test);
    CHECK(std::abs(rows[0].mae - base_mae) < 1e-9);
    const auto base_pearson = pearson(base_pred, y_test);
    REQUIRE(rows[0].pearson.has_value() == base_pearson.has_value());
    if (base_pearson) CHECK(std::abs(*rows[0].pearson - *base_pearson) < 1e-9);
}

TEST_CASE("ablation validates its feature groups") {
    Matrix X{{1.0, 2.0}, {3.0, 4.0}, {0.0, 1.0}};
    std::vector<double> y{0.1, 0.5, 0.9};
    ForestHyperparams hp;
    hp.n_trees = 1;

    CHECK_THROWS_AS(importance_by_ablation(X, y, X, y, hp, {}), EmptyInput);
    CHECK_THROWS_AS(importance_by_ablation(X, y, X, y, hp, {{"empty", {}}}),
                    ValidationError);
    CHECK_THROWS_AS(importance_by_ablation(X, y, X, y, hp, {{"oob", {7}}}),
                    DimensionError);
    CHECK_THROWS_AS(importance_by_ablation(X, y, X, y, hp, {{"all", {0, 1}}}),
                    ValidationError);
}
