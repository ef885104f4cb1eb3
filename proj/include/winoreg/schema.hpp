#ifndef WINOREG_SCHEMA_HPP
#define WINOREG_SCHEMA_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

namespace winoreg {

enum class SchemaSource { wsc_original, dpr, other };

std::string to_string(SchemaSource s);
SchemaSource schema_source_from_string(const std::string& s);

/// One Winograd schema half: a sentence, the question asked about it, the
/// two candidate referents, and (when labeled) the crowd hardness index.
struct SchemaHalf {
    std::string id;
    SchemaSource source = SchemaSource::other;
    std::string sentence;
    std::string question;
    std::string answer1;
    std::string answer2;
    std::optional<int> correct;          // 1 or 2
    std::optional<double> hardness;      // in [0,1]; fraction answering correctly
    std::optional<int> respondents;

    bool labeled() const { return hardness.has_value(); }
};

/// Crowd label: fraction of respondents who answered correctly.
struct HardnessLabel {
    double value = 0.0;
    int respondent_count = 0;

    static HardnessLabel from_counts(int correct_responses, int respondent_count);
};

struct Dataset {
    std::vector<SchemaHalf> halves;
    std::string provenance;

    std::size_t size() const { return halves.size(); }
    bool empty() const { return halves.empty(); }
    const SchemaHalf* find(const std::string& id) const;
};

enum class DatasetFormat { json, csv };

// Throws ValidationError naming the offending half.
void validate_half(const SchemaHalf& half);

Dataset load_dataset(const std::string& path, DatasetFormat format);
void save_dataset(const Dataset& d, const std::string& path, DatasetFormat format);

// Deterministic given seed; test side has round(n * test_fraction) halves.
std::pair<Dataset, Dataset> split_train_test(const Dataset& d, double test_fraction,
                                             std::uint64_t seed);

// Partition by an explicit id list: first = halves whose id is in `ids`
// (dataset order), second = the rest. Unknown ids raise ValidationError.
std::pair<Dataset, Dataset> split_by_ids(const Dataset& d,
                                         const std::unordered_set<std::string>& ids);

std::unordered_set<std::string> load_id_list(const std::string& path);

// Balances the original dataset against the larger DPR dataset by
// replicating each non-excluded original half k = round(|dpr| / |eligible|)
// times (k >= 1). Replica ids get a "#rep-n" suffix; the first replica keeps
// the original id. With target_total, replicas are trimmed from the tail of
// the final replication round until the size matches.
Dataset oversample_balance(const Dataset& original, const Dataset& dpr,
                           const std::unordered_set<std::string>& excluded_ids,
                           std::optional<std::size_t> target_total = std::nullopt);

} // namespace winoreg

#endif
