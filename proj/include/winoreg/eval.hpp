#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "winoreg/schema.hpp"

namespace winoreg {

/// MAE of predictions vs labels, both on the [0,1] scale.
double mean_absolute_error(const std::vector<double>& pred,
                           const std::vector<double>& label);

/// 100·(1 − MAE): the percent-scale score the report tables use.
double accuracy_score(const std::vector<double>& pred, const std::vector<double>& label);

/// Sample Pearson correlation; nullopt when either series has zero variance.
std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y);

struct EvaluationReport {
    std::string system;
    double mae_unit = 0.0;
    double mae_percent = 0.0; ///< 100 · mae_unit
    double accuracy = 0.0;    ///< 100 − mae_percent
    std::optional<double> pearson;
    std::size_t n = 0;
    std::optional<std::string> subset_tag;
};

struct TimingReport {
    double mean_ms = 0.0;
    double p95_ms = 0.0;
    std::size_t n = 0;
};

/// Anything that can score a schema half. Adapters for the forest and LSTM
/// pipelines live in the CLI, which owns resource loading.
class HardnessPredictor {
  public:
    virtual ~HardnessPredictor() = default;
    virtual double predict(const SchemaHalf& half) const = 0;
    virtual std::string name() const = 0;
};

/// Wraps a plain function as a predictor (handy for baselines and tests).
class FunctionPredictor : public HardnessPredictor {
  public:
    using Fn = std::function<double(const SchemaHalf&)>;
    FunctionPredictor(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {}
    double predict(const SchemaHalf& half) const override { return fn_(half); }
    std::string name() const override { return name_; }

  private:
    std::string name_;
    Fn fn_;
};

/// Scores the predictor against the labeled halves, optionally restricted to
/// the given ids. Errors: empty effective subset, unlabeled halves in scope,
/// subset disjoint from the dataset.
EvaluationReport evaluate(const HardnessPredictor& predictor, const Dataset& dataset,
                          const std::vector<std::string>* subset_ids = nullptr,
                          const std::string& subset_tag = "");

/// Wall-clock per-half latency after `warmup` unscored warmup calls.
TimingReport benchmark_latency(const HardnessPredictor& predictor, const Dataset& dataset,
                               std::size_t warmup);

/// JSON rendering of one or more report rows.
std::string reports_to_json(const std::vector<EvaluationReport>& reports);

/// Aligned text table: System | MAE | Correlation Coefficient | Accuracy.
std::string reports_to_table(const std::vector<EvaluationReport>& reports);

} // namespace winoreg
