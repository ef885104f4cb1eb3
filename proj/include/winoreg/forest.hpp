#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "winoreg/rng.hpp"

namespace winoreg {

/// Row-major numeric dataset: X[i] is one encoded feature vector.
using Matrix = std::vector<std::vector<double>>;

struct ForestHyperparams {
    std::size_t n_trees = 100;
    std::size_t max_depth = 0;          ///< 0 = unlimited
    std::size_t min_samples_leaf = 2;
    std::size_t features_per_split = 0; ///< 0 = ceil(p/3), the regression convention
    bool bootstrap = true;
    std::uint64_t seed = 0;

    /// Effective number of candidate features for p columns.
    std::size_t effective_mtry(std::size_t p) const;
};

/// One CART node; leaves have feature == -1 and carry the mean target of the
/// training samples that reached them.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;

    bool is_leaf() const { return feature < 0; }
};

struct RegressionTree {
    std::vector<TreeNode> nodes; // nodes[0] is the root

    double predict(const std::vector<double>& x) const;
};

struct ForestModel {
    ForestHyperparams hp;
    std::size_t n_features = 0;
    double target_min = 0.0;
    double target_max = 0.0;
    std::size_t n_train = 0;
    std::vector<RegressionTree> trees;
    /// Serialized categorical dictionaries for raw-feature encoding; empty
    /// when the model was trained on already-numeric data.
    std::string feature_schema_json;

    double predict(const std::vector<double>& x) const;
    std::vector<double> predict_many(const Matrix& X) const;
};

/// Fits one CART regression tree on the full data. Splits greedily by
/// sum-of-squared-error reduction over the sampled feature subset, with
/// midpoint thresholds between sorted distinct values; ties broken toward the
/// lowest feature index, then the lowest threshold; x <= threshold goes left.
RegressionTree fit_tree(const Matrix& X, const std::vector<double>& y,
                        const ForestHyperparams& hp, SplitMix64& rng);

/// Fits the ensemble: per-tree RNG streams forked from hp.seed, bootstrap
/// resampling unless disabled. Deterministic given the seed.
ForestModel fit_forest(const Matrix& X, const std::vector<double>& y,
                       const ForestHyperparams& hp);

/// One retrain-without-component result.
struct AblationRow {
    std::string component;
    double mae = 0.0;
    double accuracy = 0.0;
    std::optional<double> pearson; ///< absent when either series is constant
};

/// Feature-group importance by ablation: retrains once per group with that
/// group's columns removed and reports held-out (accuracy, correlation).
/// features_per_split is clamped to the reduced column count.
std::vector<AblationRow> importance_by_ablation(
    const Matrix& X_train, const std::vector<double>& y_train, const Matrix& X_test,
    const std::vector<double>& y_test, const ForestHyperparams& hp,
    const std::vector<std::pair<std::string, std::vector<std::size_t>>>& groups);

/// Versioned JSON persistence; load rejects unknown magic (format-error) and
/// unsupported versions (version-error). Round-trips predict bit-exactly.
void save_forest(const ForestModel& model, const std::string& path);
ForestModel load_forest(const std::string& path);

} // namespace winoreg
