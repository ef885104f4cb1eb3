#include "winoreg/eval.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "winoreg/error.hpp"

namespace winoreg {

namespace {

using ojson = nlohmann::ordered_json;

void check_series(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty())
        throw EmptyInput("metric input must be nonempty");
    if (a.size() != b.size())
        throw DimensionError("series lengths differ: " + std::to_string(a.size()) +
                             " vs " + std::to_string(b.size()));
    for (double v : a)
        if (!std::isfinite(v))
            throw NumericError("non-finite value in predictions");
    for (double v : b)
        if (!std::isfinite(v))
            throw NumericError("non-finite value in labels");
}

std::string format_metric(double v) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(4) << v;
    return out.str();
}

} // namespace

double mean_absolute_error(const std::vector<double>& pred,
                           const std::vector<double>& label) {
    check_series(pred, label);
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        sum += std::fabs(pred[i] - label[i]);
    return sum / static_cast<double>(pred.size());
}

double accuracy_score(const std::vector<double>& pred, const std::vector<double>& label) {
    return 100.0 * (1.0 - mean_absolute_error(pred, label));
}

std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
    check_series(x, y);
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

EvaluationReport evaluate(const HardnessPredictor& predictor, const Dataset& dataset,
                          const std::vector<std::string>* subset_ids,
                          const std::string& subset_tag) {
    std::vector<const SchemaHalf*> scope;
    if (subset_ids) {
        std::unordered_set<std::string> wanted(subset_ids->begin(), subset_ids->end());
        for (const auto& half : dataset.halves)
            if (wanted.count(half.id))
                scope.push_back(&half);
        if (scope.empty())
            throw EvalError("subset shares no ids with the dataset");
    } else {
        for (const auto& half : dataset.halves)
            scope.push_back(&half);
    }
    if (scope.empty())
        throw EmptyInput("dataset has no halves to evaluate");

    std::vector<double> pred, label;
    pred.reserve(scope.size());
    label.reserve(scope.size());
    for (const SchemaHalf* half : scope) {
        if (!half->hardness)
            throw EvalError("half '" + half->id + "' has no hardness label");
        pred.push_back(predictor.predict(*half));
        label.push_back(*half->hardness);
    }

    EvaluationReport report;
    report.system = predictor.name();
    report.mae_unit = mean_absolute_error(pred, label);
    report.mae_percent = 100.0 * report.mae_unit;
    report.accuracy = 100.0 - report.mae_percent;
    report.pearson = pearson(pred, label);
    report.n = scope.size();
    if (!subset_tag.empty())
        report.subset_tag = subset_tag;
    return report;
}

TimingReport benchmark_latency(const HardnessPredictor& predictor, const Dataset& dataset,
                               std::size_t warmup) {
    if (dataset.halves.empty())
        throw EmptyInput("cannot benchmark an empty dataset");
    if (warmup >= dataset.halves.size())
        throw ConfigError("warmup " + std::to_string(warmup) +
                          " must be smaller than the dataset size " +
                          std::to_string(dataset.halves.size()));
    for (std::size_t i = 0; i < warmup; ++i)
        (void)predictor.predict(dataset.halves[i]);

    std::vector<double> ms;
    ms.reserve(dataset.halves.size() - warmup);
    for (std::size_t i = warmup; i < dataset.halves.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        (void)predictor.predict(dataset.halves[i]);
        const auto stop = std::chrono::steady_clock::now();
        ms.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
    }

    TimingReport report;
    report.n = ms.size();
    double sum = 0.0;
    for (double v : ms)
        sum += v;
    report.mean_ms = sum / static_cast<double>(ms.size());
    std::sort(ms.begin(), ms.end());
    // nearest-rank p95
    std::size_t rank = static_cast<std::size_t>(
        std::ceil(0.95 * static_cast<double>(ms.size())));
    report.p95_ms = ms[std::min(ms.size() - 1, rank == 0 ? 0 : rank - 1)];
    return report;
}

std::string reports_to_json(const std::vector<EvaluationReport>& reports) {
    ojson doc = ojson::array();
    for (const auto& r : reports) {
        ojson row;
        row["system"] = r.system;
        row["mae_unit"] = r.mae_unit;
        row["mae_percent"] = r.mae_percent;
        row["accuracy"] = r.accuracy;
        row["pearson"] = r.pearson ? ojson(*r.pearson) : ojson(nullptr);
        row["n"] = r.n;
        row["subset"] = r.subset_tag ? ojson(*r.subset_tag) : ojson(nullptr);
        doc.push_back(std::move(row));
    }
    return doc.dump(2);
}

std::string reports_to_table(const std::vector<EvaluationReport>& reports) {
    const std::array<std::string, 4> header = {"System", "MAE", "Correlation Coefficient",
                                               "Accuracy"};
    std::vector<std::array<std::string, 4>> cells;
    for (const auto& r : reports) {
        std::string system = r.system;
        if (r.subset_tag)
            system += " [" + *r.subset_tag + "]";
        cells.push_back({std::move(system), format_metric(r.mae_percent),
                         r.pearson ? format_metric(*r.pearson) : std::string("undefined"),
                         format_metric(r.accuracy)});
    }
    std::array<std::size_t, 4> width{};
    for (std::size_t c = 0; c < 4; ++c) {
        width[c] = header[c].size();
        for (const auto& row : cells)
            width[c] = std::max(width[c], row[c].size());
    }
    std::ostringstream out;
    auto emit = [&](const std::array<std::string, 4>& row) {
        for (std::size_t c = 0; c < 4; ++c) {
            out << std::left << std::setw(static_cast<int>(width[c])) << row[c];
            out << (c + 1 < 4 ? "  " : "");
        }
        out << '\n';
    };
    emit(header);
    std::array<std::string, 4> rule;
    for (std::size_t c = 0; c < 4; ++c)
        rule[c] = std::string(width[c], '-');
    emit(rule);
    for (const auto& row : cells)
        emit(row);
    return out.str();
}

} // namespace winoreg
