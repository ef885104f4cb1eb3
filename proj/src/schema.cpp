#include "winoreg/schema.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "winoreg/csv.hpp"
#include "winoreg/error.hpp"

namespace winoreg {

namespace {

// Lowercased word list; enough for the candidate-span invariant without
// pulling in the full text-analysis layer.
std::vector<std::string> basic_words(const std::string& text) {
    std::vector<std::string> words;
    std::string cur;
    for (char ch : text) {
        unsigned char u = static_cast<unsigned char>(ch);
        if (std::isalnum(u) || ch == '\'' || ch == '-') {
            cur.push_back(static_cast<char>(std::tolower(u)));
        } else if (!cur.empty()) {
            words.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty())
        words.push_back(cur);
    return words;
}

bool contains_span(const std::vector<std::string>& haystack,
                   const std::vector<std::string>& needle) {
    if (needle.empty() || needle.size() > haystack.size())
        return false;
    for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
        bool match = true;
        for (std::size_t j = 0; j < needle.size(); ++j) {
            if (haystack[i + j] != needle[j]) {
                match = false;
                break;
            }
        }
        if (match)
            return true;
    }
    return false;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

using ojson = nlohmann::ordered_json;

SchemaHalf half_from_json(const ojson& rec, std::size_t index) {
    auto fail = [&](const std::string& msg) {
        throw ParseError("record " + std::to_string(index) + ": " + msg);
    };
    if (!rec.is_object())
        fail("expected an object");
    SchemaHalf h;
    try {
        h.id = rec.at("id").get<std::string>();
        h.source = schema_source_from_string(rec.at("source").get<std::string>());
        h.sentence = rec.at("sentence").get<std::string>();
        h.question = rec.at("question").get<std::string>();
        const auto& answers = rec.at("answers");
        if (!answers.is_array() || answers.size() != 2)
            fail("answers must be an array of two strings");
        h.answer1 = answers[0].get<std::string>();
        h.answer2 = answers[1].get<std::string>();
        if (rec.contains("correct") && !rec["correct"].is_null())
            h.correct = rec["correct"].get<int>();
        if (rec.contains("hardness") && !rec["hardness"].is_null())
            h.hardness = rec["hardness"].get<double>();
        if (rec.contains("respondents") && !rec["respondents"].is_null())
            h.respondents = rec["respondents"].get<int>();
    } catch (const ojson::exception& e) {
        fail(e.what());
    }
    return h;
}

ojson half_to_json(const SchemaHalf& h) {
    ojson rec;
    rec["id"] = h.id;
    rec["source"] = to_string(h.source);
    rec["sentence"] = h.sentence;
    rec["question"] = h.question;
    rec["answers"] = ojson::array({h.answer1, h.answer2});
    rec["correct"] = h.correct ? ojson(*h.correct) : ojson(nullptr);
    rec["hardness"] = h.hardness ? ojson(*h.hardness) : ojson(nullptr);
    rec["respondents"] = h.respondents ? ojson(*h.respondents) : ojson(nullptr);
    return rec;
}

const std::vector<std::string> kCsvHeader = {
    "id", "source", "sentence", "question", "answer1",
    "answer2", "correct", "hardness", "respondents"};

std::string format_double(double v) {
    // Shortest representation that round-trips, same as the JSON dump.
    return ojson(v).dump();
}

} // namespace

std::string to_string(SchemaSource s) {
    switch (s) {
    case SchemaSource::wsc_original: return "WSC-original";
    case SchemaSource::dpr: return "DPR";
    case SchemaSource::other: return "other";
    }
    return "other";
}

SchemaSource schema_source_from_string(const std::string& s) {
    std::string l = lower(s);
    if (l == "wsc-original")
        return SchemaSource::wsc_original;
    if (l == "dpr")
        return SchemaSource::dpr;
    if (l == "other")
        return SchemaSource::other;
    throw ParseError("unknown schema source '" + s + "'");
}

HardnessLabel HardnessLabel::from_counts(int correct_responses, int respondent_count) {
    if (respondent_count < 0 || correct_responses < 0 ||
        correct_responses > respondent_count)
        throw ValidationError("hardness label: invalid response counts");
    HardnessLabel label;
    label.respondent_count = respondent_count;
    label.value = respondent_count > 0
                      ? static_cast<double>(correct_responses) / respondent_count
                      : 0.0;
    return label;
}

const SchemaHalf* Dataset::find(const std::string& id) const {
    for (const auto& h : halves)
        if (h.id == id)
            return &h;
    return nullptr;
}

void validate_half(const SchemaHalf& half) {
    auto fail = [&](const std::string& msg) {
        throw ValidationError("half '" + half.id + "': " + msg);
    };
    if (half.id.empty())
        fail("empty id");
    if (half.sentence.empty())
        fail("empty sentence");
    if (half.question.empty())
        fail("empty question");
    if (half.answer1.empty() || half.answer2.empty())
        fail("missing candidate");
    if (lower(half.answer1) == lower(half.answer2))
        fail("candidates must be distinct");
    if (half.correct && *half.correct != 1 && *half.correct != 2)
        fail("correct must be 1 or 2");
    if (half.hardness && (*half.hardness < 0.0 || *half.hardness > 1.0))
        fail("hardness outside [0,1]");
    if (half.respondents && *half.respondents < 0)
        fail("negative respondent count");
    auto sentence_words = basic_words(half.sentence);
    if (!contains_span(sentence_words, basic_words(half.answer1)))
        fail("candidate '" + half.answer1 + "' not found in sentence");
    if (!contains_span(sentence_words, basic_words(half.answer2)))
        fail("candidate '" + half.answer2 + "' not found in sentence");
}

namespace {

Dataset validate_dataset(std::vector<SchemaHalf> halves, std::string provenance) {
    std::unordered_set<std::string> seen;
    for (const auto& h : halves) {
        validate_half(h);
        if (!seen.insert(h.id).second)
            throw ValidationError("duplicate id '" + h.id + "'");
    }
    Dataset d;
    d.halves = std::move(halves);
    d.provenance = std::move(provenance);
    return d;
}

Dataset load_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    if (content.find_first_not_of(" \t\r\n") == std::string::npos)
        return Dataset{{}, path};
    ojson doc;
    try {
        doc = ojson::parse(content);
    } catch (const ojson::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
    if (!doc.is_array())
        throw ParseError(path + ": top-level value must be an array");
    std::vector<SchemaHalf> halves;
    halves.reserve(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i)
        halves.push_back(half_from_json(doc[i], i));
    return validate_dataset(std::move(halves), path);
}

Dataset load_csv(const std::string& path) {
    auto records = csv::read_file(path);
    if (records.empty())
        return Dataset{{}, path};
    if (records[0] != kCsvHeader) {
        std::ostringstream msg;
        msg << path << ": bad or missing CSV header, expected ";
        for (std::size_t i = 0; i < kCsvHeader.size(); ++i)
            msg << (i ? "," : "") << kCsvHeader[i];
        throw ParseError(msg.str());
    }
    std::vector<SchemaHalf> halves;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.size() != kCsvHeader.size())
            throw ParseError(path + ": record " + std::to_string(r) + " has " +
                             std::to_string(rec.size()) + " fields, expected " +
                             std::to_string(kCsvHeader.size()));
        SchemaHalf h;
        h.id = rec[0];
        h.source = schema_source_from_string(rec[1]);
        h.sentence = rec[2];
        h.question = rec[3];
        h.answer1 = rec[4];
        h.answer2 = rec[5];
        try {
            if (!rec[6].empty())
                h.correct = std::stoi(rec[6]);
            if (!rec[7].empty())
                h.hardness = std::stod(rec[7]);
            if (!rec[8].empty())
                h.respondents = std::stoi(rec[8]);
        } catch (const std::exception&) {
            throw ParseError(path + ": record " + std::to_string(r) +
                             ": bad numeric field");
        }
        halves.push_back(std::move(h));
    }
    return validate_dataset(std::move(halves), path);
}

} // namespace

Dataset load_dataset(const std::string& path, DatasetFormat format) {
    return format == DatasetFormat::json ? load_json(path) : load_csv(path);
}

void save_dataset(const Dataset& d, const std::string& path, DatasetFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path);
    if (format == DatasetFormat::json) {
        ojson doc = ojson::array();
        for (const auto& h : d.halves)
            doc.push_back(half_to_json(h));
        out << doc.dump(2) << '\n';
    } else {
        csv::write_record(out, kCsvHeader);
        for (const auto& h : d.halves) {
            csv::write_record(
                out, {h.id, to_string(h.source), h.sentence, h.question, h.answer1,
                      h.answer2, h.correct ? std::to_string(*h.correct) : "",
                      h.hardness ? format_double(*h.hardness) : "",
                      h.respondents ? std::to_string(*h.respondents) : ""});
        }
    }
    if (!out)
        throw IoError("error while writing " + path);
}

namespace {

// splitmix64; used anywhere we need an independent deterministic stream.
std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

std::pair<Dataset, Dataset> split_train_test(const Dataset& d, double test_fraction,
                                             std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw ConfigError("test_fraction must lie in (0,1)");
    const std::size_t n = d.size();
    const std::size_t n_test =
        static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
    if (n_test == 0 || n_test >= n)
        throw DegenerateSplit("split of " + std::to_string(n) + " halves at fraction " +
                              std::to_string(test_fraction) +
                              " leaves one side empty");

    // Explicit Fisher-Yates on top of splitmix64 so the partition is stable
    // across platforms and standard libraries.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i)
        order[i] = i;
    std::uint64_t state = seed;
    for (std::size_t i = n - 1; i > 0; --i) {
        state = mix64(state);
        std::size_t j = static_cast<std::size_t>(state % (i + 1));
        std::swap(order[i], order[j]);
    }

    std::vector<bool> is_test(n, false);
    for (std::size_t i = 0; i < n_test; ++i)
        is_test[order[i]] = true;

    Dataset train, test;
    train.provenance = d.provenance + " [train]";
    test.provenance = d.provenance + " [test]";
    for (std::size_t i = 0; i < n; ++i)
        (is_test[i] ? test : train).halves.push_back(d.halves[i]);
    return {std::move(train), std::move(test)};
}

std::pair<Dataset, Dataset> split_by_ids(const Dataset& d,
                                         const std::unordered_set<std::string>& ids) {
    for (const auto& id : ids)
        if (!d.find(id))
            throw ValidationError("id '" + id + "' not present in dataset");
    Dataset selected, rest;
    selected.provenance = d.provenance + " [selected]";
    rest.provenance = d.provenance + " [rest]";
    for (const auto& h : d.halves)
        (ids.count(h.id) ? selected : rest).halves.push_back(h);
    return {std::move(selected), std::move(rest)};
}

std::unordered_set<std::string> load_id_list(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path);
    std::unordered_set<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        auto begin = line.find_first_not_of(" \t");
        if (begin == std::string::npos)
            continue;
        auto end = line.find_last_not_of(" \t");
        ids.insert(line.substr(begin, end - begin + 1));
    }
    return ids;
}

Dataset oversample_balance(const Dataset& original, const Dataset& dpr,
                           const std::unordered_set<std::string>& excluded_ids,
                           std::optional<std::size_t> target_total) {
    for (const auto& id : excluded_ids)
        if (!original.find(id))
            throw ValidationError("excluded id '" + id + "' not in original dataset");
    for (const auto& h : original.halves)
        if (!h.labeled())
            throw ValidationError("original half '" + h.id + "' is unlabeled");
    for (const auto& h : dpr.halves)
        if (!h.labeled())
            throw ValidationError("dpr half '" + h.id + "' is unlabeled");

    std::vector<const SchemaHalf*> eligible;
    for (const auto& h : original.halves)
        if (!excluded_ids.count(h.id))
            eligible.push_back(&h);
    if (eligible.empty())
        throw EmptyInput("oversample: every original half is excluded");

    long long k = std::llround(static_cast<double>(dpr.size()) /
                               static_cast<double>(eligible.size()));
    if (k < 1)
        k = 1;

    Dataset out;
    out.provenance = "oversample(" + dpr.provenance + " + " + original.provenance + ")";
    out.halves.reserve(dpr.size() + eligible.size() * static_cast<std::size_t>(k));
    for (const auto& h : dpr.halves)
        out.halves.push_back(h);
    for (long long rep = 1; rep <= k; ++rep) {
        for (const SchemaHalf* src : eligible) {
            SchemaHalf copy = *src;
            if (rep > 1)
                copy.id += "#rep-" + std::to_string(rep - 1);
            out.halves.push_back(std::move(copy));
        }
    }

    if (target_total) {
        const std::size_t minimum = dpr.size() + eligible.size();
        if (*target_total > out.size())
            throw ValidationError("target_total " + std::to_string(*target_total) +
                                  " exceeds assembled size " + std::to_string(out.size()));
        if (*target_total < minimum)
            throw ValidationError("target_total " + std::to_string(*target_total) +
                                  " would trim non-duplicate halves (minimum " +
                                  std::to_string(minimum) + ")");
        out.halves.resize(*target_total);
    }
    return out;
}

} // namespace winoreg
