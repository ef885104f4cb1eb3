#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <vector>

#include "support.hpp"
#include "winoreg/error.hpp"
#include "winoreg/resources.hpp"
#include "winoreg/rng.hpp"

using namespace winoreg;

TEST_CASE("corpus index counts role and connective-triple frequencies") {
    std::ifstream corpus(testsupport::fixtures_dir() / "corpus.txt");
    REQUIRE(corpus.good());
    const CorpusIndex index = CorpusIndex::build(corpus);

    CHECK(index.doc_count() == 40);
    // The fixture corpus puts "cat" mostly in subject position and "mouse"
    // mostly in object position.
    CHECK(index.role_frequency("cat", Role::subject) >
          index.role_frequency("cat", Role::object));
    CHECK(index.role_frequency("mouse", Role::object) >
          index.role_frequency("mouse", Role::subject));
    CHECK(index.role_frequency("demonstrator", Role::subject) >
          index.role_frequency("demonstrator", Role::object));
    CHECK(index.role_frequency("councilman", Role::object) >
          index.role_frequency("councilman", Role::subject));
    CHECK(index.role_frequency("unseen-lemma", Role::subject) == 0);

    // Five "... caught ... because it was clever" sentences.
    CHECK(index.connective_triple_frequency("catch", "because", "clever") == 5);
    // Three "... refused ... because they advocated ..." sentences; the
    // right-hand event is Porter-stemmed.
    CHECK(index.connective_triple_frequency("refuse", "because", "advoc") == 3);
    CHECK(index.connective_triple_frequency("catch", "although", "clever") == 0);
}

TEST_CASE("corpus index counts are invariant under line order") {
    std::ifstream in(testsupport::fixtures_dir() / "corpus.txt");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) lines.push_back(line);

    SplitMix64 rng(99);
    std::vector<std::string> shuffled = lines;
    for (std::size_t i = shuffled.size(); i-- > 1;)
        std::swap(shuffled[i], shuffled[rng.below(i + 1)]);
    REQUIRE(shuffled != lines);

    auto join = [](const std::vector<std::string>& ls) {
        std::string out;
        for (const auto& l : ls) out += l + "\n";
        return out;
    };
    std::istringstream a(join(lines)), b(join(shuffled));
    const CorpusIndex ia = CorpusIndex::build(a);
    const CorpusIndex ib = CorpusIndex::build(b);

    for (const char* lemma : {"cat", "mouse", "councilman", "demonstrator", "farmer"})
        for (Role role : {Role::subject, Role::object})
            CHECK(ia.role_frequency(lemma, role) == ib.role_frequency(lemma, role));
    CHECK(ia.connective_triple_frequency("catch", "because", "clever") ==
          ib.connective_triple_frequency("catch", "because", "clever"));
}

TEST_CASE("corpus index round-trips through its json container") {
    const auto path = testsupport::scratch_dir() / "corpus_index_rt.json";
    {
        std::ifstream corpus(testsupport::fixtures_dir() / "corpus.txt");
        CorpusIndex::build(corpus).save(path.string());
    }
    const CorpusIndex loaded = CorpusIndex::load(path.string());
    CHECK(loaded.doc_count() == 40);
    CHECK(loaded.connective_triple_frequency("catch", "because", "clever") == 5);
    CHECK(loaded.role_frequency("cat", Role::subject) > 0);

    const auto bad = testsupport::scratch_dir() / "not_an_index.json";
    std::ofstream(bad) << "{\"magic\": \"something-else\"}";
    CHECK_THROWS_AS(CorpusIndex::load(bad.string()), FormatError);
}

TEST_CASE("polarity lexicon looks up lemmas with neutral fallback") {
    const PolarityLexicon lex =
        PolarityLexicon::load((testsupport::fixtures_dir() / "polarity.tsv").string());
    CHECK(lex.polarity_of("refuse") == Polarity::negative);
    CHECK(lex.polarity_of("advocate") == Polarity::positive);
    CHECK(lex.polarity_of("catch") == Polarity::neutral);
    CHECK(lex.polarity_of("never-seen-word") == Polarity::neutral);
    CHECK(lex.lookup("never-seen-word").strength == 0.0);
}

TEST_CASE("narrative chains match events with graded fallbacks") {
    const NarrativeChainDb db =
        NarrativeChainDb::load((testsupport::fixtures_dir() / "chains.tsv").string(),
                               (testsupport::fixtures_dir() / "synonyms.tsv").string());
    REQUIRE(db.size() > 0);

    const ChainEvent refuse_o{"refuse", Role::object};
    const ChainEvent advocate_s{"advocate", Role::subject};
    CHECK(!db.chains_containing(refuse_o, advocate_s, false).empty());

    // Role flips must not match.
    const ChainEvent refuse_s{"refuse", Role::subject};
    CHECK(db.chains_containing(refuse_s, advocate_s, false).empty());

    // "advocated" only matches via the Porter-stem fallback.
    const ChainEvent advocated_s{"advocated", Role::subject};
    CHECK(db.chains_containing(refuse_o, advocated_s, false).empty());
    CHECK(!db.chains_containing(refuse_o, advocated_s, true).empty());

    // "support" matches "advocate" only through the synonym table.
    const ChainEvent support_s{"support", Role::subject};
    CHECK(db.chains_containing(refuse_o, support_s, false).empty());
    CHECK(!db.chains_containing(refuse_o, support_s, true).empty());

    const ChainEvent missing{"zzz", Role::subject};
    CHECK(db.chains_containing(missing, advocate_s, true).empty());
}

TEST_CASE("relatedness lookups are symmetric with zero default") {
    const RelatednessTable table =
        RelatednessTable::load((testsupport::fixtures_dir() / "relatedness.tsv").string());
    CHECK(table.relatedness("cat", "clever") == doctest::Approx(0.4));
    CHECK(table.relatedness("clever", "cat") == doctest::Approx(0.4));
    CHECK(table.relatedness("cat", "zzz") == 0.0);
}

TEST_CASE("frame roles map verbs to generic participants") {
    const FrameRoleTable table =
        FrameRoleTable::load((testsupport::fixtures_dir() / "frames.tsv").string());
    const auto roles = table.roles_for("catch");
    REQUIRE(roles.has_value());
    CHECK(roles->ext_role == "captor");
    CHECK(roles->obj_role == "captive");
    CHECK_FALSE(table.roles_for("zzz").has_value());
}

TEST_CASE("score table returns signed strengths with zero default") {
    const ScoreTable table =
        ScoreTable::load((testsupport::fixtures_dir() / "scores.tsv").string());
    CHECK(table.score("refuse") < 0.0);
    CHECK(table.score("advocate") > 0.0);
    CHECK(table.score("zzz") == 0.0);
}

TEST_CASE("hit counts come from the cache when offline") {
    HitCountProvider hits = HitCountProvider::open(
        (testsupport::fixtures_dir() / "hitcache.json").string(), false);
    CHECK(hits.hit_count("cat was") == 5000);
    CHECK(hits.hit_count("mouse was") == 3000);
    CHECK_THROWS_AS(hits.hit_count("phrase nobody cached"), CacheMissOffline);
}

TEST_CASE("live lookups write through to the cache") {
    const auto cache_path = testsupport::scratch_dir() / "hitcache_writethrough.json";
    std::filesystem::remove(cache_path);

    int calls = 0;
    {
        HitCountProvider hits = HitCountProvider::open(cache_path.string(), true);
        hits.set_fetcher([&calls](const std::string& phrase) {
            ++calls;
            return static_cast<long long>(phrase.size()) * 10;
        });
        CHECK(hits.hit_count("fresh phrase") == 120);
        CHECK(hits.hit_count("fresh phrase") == 120); // served from cache
        CHECK(calls == 1);
        CHECK(hits.cache_size() == 1);
    }

    // The fetched value was persisted: a new offline provider can serve it.
    HitCountProvider offline = HitCountProvider::open(cache_path.string(), false);
    CHECK(offline.hit_count("fresh phrase") == 120);
    CHECK_THROWS_AS(offline.hit_count("other phrase"), CacheMissOffline);
}

TEST_CASE("annotation store exposes per-half parse overrides") {
    const AnnotationStore store =
        AnnotationStore::load((testsupport::fixtures_dir() / "annotations.json").string());
    CHECK(store.size() == 1);
    const ParseAnnotation* ann = store.find("annotated-1");
    REQUIRE(ann != nullptr);
    CHECK(ann->sentence_pos.at(8) == PosTag::adj);
    CHECK(store.find("catch-1") == nullptr);
}

TEST_CASE("resource bundle loads every table from one root") {
    ResourceBundle bundle = testsupport::load_bundle();
    CHECK(bundle.corpus.doc_count() == 40);
    CHECK(bundle.polarity.size() > 0);
    CHECK(bundle.chains.size() > 0);
    CHECK(bundle.relatedness.size() > 0);
    CHECK(bundle.frames.size() > 0);
    CHECK(bundle.scores.size() > 0);
    CHECK(bundle.hits.cache_size() > 0);
    CHECK_FALSE(bundle.hits.network_enabled());
    CHECK(bundle.annotations.size() == 1);

    // Missing files load as empty resources rather than failing.
    const auto empty_root = testsupport::scratch_dir() / "empty_res";
    std::filesystem::create_directories(empty_root);
    const ResourceBundle empty =
        ResourceBundle::load(ResourcePaths::from_root(empty_root.string()));
    CHECK(empty.polarity.size() == 0);
    CHECK(empty.corpus.doc_count() == 0);
    CHECK(empty.relatedness.relatedness("a", "b") == 0.0);
}
