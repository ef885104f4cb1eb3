#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <set>

#include "support.hpp"
#include "winoreg/error.hpp"
#include "winoreg/rng.hpp"
#include "winoreg/schema.hpp"

using namespace winoreg;
namespace fs = std::filesystem;

namespace {

SchemaHalf make_half(const std::string& id, double hardness) {
    SchemaHalf h;
    h.id = id;
    h.source = SchemaSource::other;
    h.sentence = "The farmer helped the baker.";
    h.question = "Who helped the baker?";
    h.answer1 = "The farmer";
    h.answer2 = "The baker";
    h.correct = 1;
    h.hardness = hardness;
    h.respondents = 20;
    return h;
}

Dataset make_dataset(const std::string& prefix, std::size_t n) {
    Dataset d;
    d.provenance = prefix;
    for (std::size_t i = 0; i < n; ++i)
        d.halves.push_back(make_half(prefix + "-" + std::to_string(i),
                                     0.1 + 0.8 * double(i % 10) / 10.0));
    return d;
}

} // namespace

TEST_CASE("fixture dataset loads with all fields") {
    const Dataset d = testsupport::fixture_dataset();
    CHECK(d.size() == 13);

    const SchemaHalf& h = testsupport::half_by_id(d, "catch-1");
    CHECK(h.sentence == "The cat caught the mouse because it was clever.");
    CHECK(h.question == "Who is clever?");
    CHECK(h.answer1 == "The cat");
    CHECK(h.answer2 == "The mouse");
    CHECK(h.correct == 1);
    CHECK(h.hardness == doctest::Approx(0.82));
    CHECK(h.labeled());

    CHECK_FALSE(testsupport::half_by_id(d, "simple-1").labeled());
    CHECK(d.find("no-such-id") == nullptr);
}

TEST_CASE("half validation rejects malformed records") {
    SchemaHalf h = make_half("x", 0.5);
    CHECK_NOTHROW(validate_half(h));

    SchemaHalf bad = h;
    bad.hardness = 1.5;
    CHECK_THROWS_AS(validate_half(bad), ValidationError);

    bad = h;
    bad.correct = 3;
    CHECK_THROWS_AS(validate_half(bad), ValidationError);

    bad = h;
    bad.answer2 = "the farmer"; // same candidate twice, case-insensitive
    CHECK_THROWS_AS(validate_half(bad), ValidationError);

    bad = h;
    bad.answer1 = "The sailor"; // not a span of the sentence
    CHECK_THROWS_AS(validate_half(bad), ValidationError);

    bad = h;
    bad.question.clear();
    CHECK_THROWS_AS(validate_half(bad), ValidationError);
}

TEST_CASE("hardness labels derive from response counts") {
    const HardnessLabel label = HardnessLabel::from_counts(3, 4);
    CHECK(label.value == doctest::Approx(0.75));
    CHECK(label.respondent_count == 4);
    CHECK_THROWS_AS(HardnessLabel::from_counts(5, 4), ValidationError);
    CHECK_THROWS_AS(HardnessLabel::from_counts(1, 0), ValidationError);
    CHECK_THROWS_AS(HardnessLabel::from_counts(-1, 4), ValidationError);
}

TEST_CASE("dataset json round-trips byte-equivalently") {
    const Dataset d = testsupport::fixture_dataset();
    const auto path1 = testsupport::scratch_dir() / "roundtrip1.json";
    const auto path2 = testsupport::scratch_dir() / "roundtrip2.json";

    save_dataset(d, path1.string(), DatasetFormat::json);
    const Dataset reloaded = load_dataset(path1.string(), DatasetFormat::json);
    save_dataset(reloaded, path2.string(), DatasetFormat::json);

    REQUIRE(reloaded.size() == d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(reloaded.halves[i].id == d.halves[i].id);
        CHECK(reloaded.halves[i].sentence == d.halves[i].sentence);
        CHECK(reloaded.halves[i].hardness == d.halves[i].hardness);
        CHECK(reloaded.halves[i].correct == d.halves[i].correct);
    }
    std::ifstream a(path1), b(path2);
    const std::string sa((std::istreambuf_iterator<char>(a)), {});
    const std::string sb((std::istreambuf_iterator<char>(b)), {});
    CHECK(sa == sb);
}

TEST_CASE("dataset csv mirror preserves every field") {
    const Dataset d = testsupport::fixture_dataset();
    const auto path = testsupport::scratch_dir() / "mirror.csv";
    save_dataset(d, path.string(), DatasetFormat::csv);
    const Dataset reloaded = load_dataset(path.string(), DatasetFormat::csv);

    REQUIRE(reloaded.size() == d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(reloaded.halves[i].id == d.halves[i].id);
        CHECK(reloaded.halves[i].source == d.halves[i].source);
        CHECK(reloaded.halves[i].sentence == d.halves[i].sentence);
        CHECK(reloaded.halves[i].question == d.halves[i].question);
        CHECK(reloaded.halves[i].answer1 == d.halves[i].answer1);
        CHECK(reloaded.halves[i].answer2 == d.halves[i].answer2);
        CHECK(reloaded.halves[i].correct == d.halves[i].correct);
        CHECK(reloaded.halves[i].hardness == d.halves[i].hardness);
        CHECK(reloaded.halves[i].respondents == d.halves[i].respondents);
    }
}

TEST_CASE("duplicate ids are rejected on load") {
    Dataset d = make_dataset("dup", 2);
    d.halves[1].id = d.halves[0].id;
    const auto path = testsupport::scratch_dir() / "dup.json";
    save_dataset(d, path.string(), DatasetFormat::json);
    CHECK_THROWS_AS(load_dataset(path.string(), DatasetFormat::json), ValidationError);
}

TEST_CASE("random split is a deterministic partition") {
    const Dataset d = make_dataset("s", 286);

    auto [train, test] = split_train_test(d, 0.3, 17);
    CHECK(test.size() == 86); // round(286 * 0.3)
    CHECK(train.size() == 200);

    std::set<std::string> seen;
    for (const auto& h : train.halves) seen.insert(h.id);
    for (const auto& h : test.halves) seen.insert(h.id);
    CHECK(seen.size() == 286); // no overlap, nothing dropped

    auto [train2, test2] = split_train_test(d, 0.3, 17);
    for (std::size_t i = 0; i < test.size(); ++i) CHECK(test2.halves[i].id == test.halves[i].id);

    auto [train3, test3] = split_train_test(d, 0.3, 18);
    bool identical = test3.size() == test.size();
    if (identical)
        for (std::size_t i = 0; i < test.size(); ++i)
            identical = identical && test3.halves[i].id == test.halves[i].id;
    CHECK_FALSE(identical);

    CHECK(split_train_test(d, 0.3497, 1).second.size() == 100);
    CHECK_THROWS_AS(split_train_test(make_dataset("t", 1), 0.5, 1), DegenerateSplit);
    CHECK_THROWS_AS(split_train_test(d, 0.0, 1), ConfigError);
    CHECK_THROWS_AS(split_train_test(d, 1.0, 1), ConfigError);
}

TEST_CASE("split by explicit id list preserves dataset order") {
    const Dataset d = testsupport::fixture_dataset("synthetic286.json");
    const auto ids =
        load_id_list((testsupport::fixtures_dir() / "first100.ids").string());
    REQUIRE(ids.size() == 100);

    auto [inside, outside] = split_by_ids(d, ids);
    CHECK(inside.size() == 100);
    CHECK(outside.size() == 186);
    CHECK(inside.halves.front().id == "synth-001");
    CHECK(inside.halves.back().id == "synth-100");
    CHECK(outside.halves.front().id == "synth-101");

    std::unordered_set<std::string> bogus = {"synth-001", "missing-id"};
    CHECK_THROWS_AS(split_by_ids(d, bogus), ValidationError);
}

TEST_CASE("id list files allow comments and blank lines") {
    const auto path = testsupport::scratch_dir() / "subset.ids";
    std::ofstream(path) << "# header comment\n\nalpha\nbeta # trailing note\n  gamma  \n";
    const auto ids = load_id_list(path.string());
    CHECK(ids == std::unordered_set<std::string>{"alpha", "beta", "gamma"});
}

TEST_CASE("oversampling balances the smaller dataset against the larger") {
    const Dataset original = make_dataset("orig", 4);
    const Dataset dpr = make_dataset("dpr", 10);

    SUBCASE("replication factor rounds the size ratio") {
        // k = round(10 / 3) = 3 with one id excluded.
        const Dataset out = oversample_balance(original, dpr, {"orig-0"}, std::nullopt);
        CHECK(out.size() == 10 + 3 * 3);

        std::map<std::string, int> copies;
        for (const auto& h : out.halves)
            copies[h.id.substr(0, h.id.find('#'))]++;
        CHECK(copies["orig-1"] == 3);
        CHECK(copies["orig-2"] == 3);
        CHECK(copies["orig-3"] == 3);
        CHECK(copies.count("orig-0") == 0);
        CHECK(copies["dpr-5"] == 1);

        // Replica ids stay unique.
        std::set<std::string> ids;
        for (const auto& h : out.halves) ids.insert(h.id);
        CHECK(ids.size() == out.size());
    }

    SUBCASE("labels replicate verbatim as a multiset") {
        // k = round(10 / 4) = 3 (half-away-from-zero rounding).
        const Dataset out = oversample_balance(original, dpr, {}, std::nullopt);
        std::map<double, int> expected, actual;
        for (const auto& h : original.halves) expected[*h.hardness] += 3;
        for (const auto& h : out.halves)
            if (h.id.rfind("orig", 0) == 0) actual[*h.hardness]++;
        CHECK(actual == expected);
    }

    SUBCASE("target_total trims replicas from the tail") {
        const Dataset out = oversample_balance(original, dpr, {"orig-0"}, 18);
        CHECK(out.size() == 18);
        CHECK_THROWS_AS(oversample_balance(original, dpr, {"orig-0"}, 1000),
                        ValidationError);
        CHECK_THROWS_AS(oversample_balance(original, dpr, {"orig-0"}, 5), ValidationError);
    }

    SUBCASE("empty companion dataset degrades to an identity copy") {
        const Dataset out = oversample_balance(original, Dataset{}, {}, std::nullopt);
        CHECK(out.size() == original.size());
        for (std::size_t i = 0; i < out.size(); ++i)
            CHECK(out.halves[i].id == original.halves[i].id);
    }

    SUBCASE("excluding everything is an error") {
        CHECK_THROWS_AS(
            oversample_balance(original, dpr, {"orig-0", "orig-1", "orig-2", "orig-3"},
                               std::nullopt),
            EmptyInput);
    }

    SUBCASE("unknown excluded id is an error") {
        CHECK_THROWS_AS(oversample_balance(original, dpr, {"nope"}, std::nullopt),
                        ValidationError);
    }

    SUBCASE("unlabeled halves cannot be balanced") {
        Dataset unlabeled = original;
        unlabeled.halves[0].hardness.reset();
        CHECK_THROWS_AS(oversample_balance(unlabeled, dpr, {}, std::nullopt),
                        ValidationError);
    }
}
