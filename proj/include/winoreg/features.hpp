#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "winoreg/resources.hpp"
#include "winoreg/schema.hpp"
#include "winoreg/text.hpp"

namespace winoreg {

/// One feature component (a block of related features computed together).
struct ComponentGroup {
    std::string name;
    std::vector<std::string> features;
};

/// The 12 feature components, in pipeline order. Ablation reports and
/// coverage records key off these names.
const std::vector<ComponentGroup>& component_groups();

std::size_t component_index(const std::string& name); // throws UnknownGroup

/// Named feature vector for one schema half: 47 features across the 12
/// components, plus a per-component applicability record. Values are either
/// integers (binary flags, counts, 1/2/-1 decisions) or category strings
/// (patterns, polarity pairs). Undetermined components hold their documented
/// sentinel (-1 / 0 / "neutral"), never a missing value.
struct FeatureVector {
    using Value = std::variant<long long, std::string>;

    static constexpr std::size_t feature_count = 47;
    static constexpr std::size_t component_count = 12;

    static const std::array<std::string, feature_count>& feature_names();
    /// True for features encoded via a category dictionary (ST, SP, RP2*,
    /// RP3*, OP2*, OP3*, TBSPOL, TBQPOL); false for numeric passthrough.
    static bool categorical(std::size_t index);
    static std::size_t index_of(const std::string& feature); // throws UnknownGroup

    std::array<Value, feature_count> values{};
    std::array<bool, component_count> coverage{}; // component applicable?

    long long get_int(const std::string& feature) const;
    const std::string& get_str(const std::string& feature) const;
    void set(const std::string& feature, long long v);
    void set(const std::string& feature, std::string v);

    /// CSV/display form of one value ("complex", "SV because SV", "-1", ...).
    std::string value_string(std::size_t index) const;
    /// Inverse of value_string given the feature's kind.
    static Value value_from_string(std::size_t index, const std::string& s);
};

/// Search-engine queries for one half. QR1/QR2 pair the candidates with the
/// verb governing the pronoun (VQ), QR3/QR4 append the words following VQ,
/// QR5/QR6 pair the predicate adjective J with each candidate (absent when
/// the half has no such adjective).
struct QuerySet {
    std::string qr1, qr2;
    std::string qr3, qr4;
    std::optional<std::string> qr5, qr6;
    double threshold = 0.20;
};

struct ExtractionConfig {
    double threshold = 0.20;          ///< relative hit-count difference cutoff
    long long min_triple_count = 100; ///< (V, Cn, X) evidence floor
};

/// Computes the full feature vector of a schema half against loaded
/// resources. All components are deterministic given frozen resources; the
/// only mutation is the hit-count provider's write-through cache.
class FeatureExtractor {
  public:
    /// Maps an event lemma (and whether it is negated) to a polarity; the
    /// machine-polarity component is parameterized on this.
    using PolarityAnalyzer = std::function<Polarity(const std::string& lemma, bool negated)>;

    FeatureExtractor(ResourceBundle& resources, ExtractionConfig config = {});

    /// Replaces the machine-polarity analyzer (default: subjectivity lexicon
    /// with negation flip).
    void set_machine_analyzer(PolarityAnalyzer analyzer);

    /// Runs every component; failures inside a component become sentinel
    /// values with coverage[component]=false.
    FeatureVector extract_all(const SchemaHalf& half) const;

    // Individual components (same computations extract_all composes).
    std::pair<std::string, std::string> f_sentence_pattern(const SchemaHalf& half) const;
    std::pair<long long, long long> f_negation(const SchemaHalf& half) const;
    long long f_semantic_role(const SchemaHalf& half) const;
    long long f_length(const SchemaHalf& half) const;
    /// (WN, WP, HN, VF, JF); all zero when the sentence has no connective.
    std::array<long long, 5> f_word_relations(const SchemaHalf& half) const;
    /// Throws EmptyInput when no verb governing the pronoun can be found.
    QuerySet build_queries(const SchemaHalf& half) const;
    std::array<long long, 8> f_search_queries(const SchemaHalf& half) const;
    std::array<long long, 8> f_search_queries_framed(const SchemaHalf& half) const;
    std::pair<long long, long long> f_relatedness(const SchemaHalf& half) const;
    long long f_connective(const SchemaHalf& half) const;
    long long f_narrative_chain(const SchemaHalf& half) const;
    /// (RP1i1, RP1i2, RP2i1, RP2i2, RP3i1, RP3i2, RPTL)
    std::tuple<long long, long long, std::string, std::string, std::string, std::string,
               long long>
    f_polarity_rule(const SchemaHalf& half) const;
    std::tuple<long long, long long, std::string, std::string, std::string, std::string,
               long long>
    f_polarity_machine(const SchemaHalf& half) const;
    std::pair<std::string, std::string> f_polarity_simple(const SchemaHalf& half) const;

    /// Shared per-half parse state (defined in the implementation file).
    struct HalfAnalysis;

  private:
    HalfAnalysis analyze(const SchemaHalf& half) const;

    ResourceBundle& res_;
    ExtractionConfig cfg_;
    TextAnalyzer analyzer_;
    PolarityAnalyzer machine_;
};

/// Label-encoding dictionaries for the categorical features, built from
/// training data. Codes are 1-based in first-occurrence order; code 0 is
/// reserved for categories unseen at training time.
class FeatureSchema {
  public:
    static FeatureSchema build(const std::vector<FeatureVector>& training);

    /// Numeric row for the forest: integers pass through, categorical
    /// features map through their dictionary (unseen -> 0).
    std::vector<double> encode(const FeatureVector& v) const;

    std::string to_json() const;
    static FeatureSchema from_json(const std::string& text);

    const std::vector<std::string>& categories(std::size_t feature_index) const;

  private:
    std::array<std::vector<std::string>, FeatureVector::feature_count> categories_{};
};

/// One row of a feature dump.
struct FeatureRow {
    std::string id;
    FeatureVector features;
    std::optional<double> hardness;
};

/// CSV dump: header "id,<47 feature names>,cov_<12 components>,hardness";
/// bit-exact across runs with frozen resources.
void write_feature_csv(const std::string& path, const std::vector<FeatureRow>& rows);
std::vector<FeatureRow> read_feature_csv(const std::string& path);

} // namespace winoreg
