#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "winoreg/text.hpp"

namespace winoreg {

enum class Role { subject, object };

std::string to_string(Role role);
Role role_from_string(const std::string& name);

/// Full parse of one corpus sentence, produced by the pluggable parser that
/// feeds CorpusIndex::build.
struct SentenceAnalysis {
    std::vector<Token> tokens;
    std::vector<ClauseSpan> clauses;
    std::vector<SemanticTriple> triples; ///< clause triples first, aux links last
};

using SentenceParser = std::function<SentenceAnalysis(const std::string&)>;

/// Frequency index over a plain-text corpus (one sentence per line):
///  - role_counts: how often a noun lemma appears as clause subject / object;
///  - connective_triple_counts: (V, Cn, X) per clause pair bridged by a
///    connective, where V is the left clause's verb lemma and X is the
///    Porter-stemmed lemma of the right clause's verb (or its adjective
///    complement when the clause is copular).
/// Unseen keys count 0, never error.
class CorpusIndex {
  public:
    /// Wraps TextAnalyzer (the default corpus parser).
    static SentenceParser default_parser();

    static CorpusIndex build(std::istream& corpus,
                             const SentenceParser& parser = default_parser());
    static CorpusIndex build_from_file(const std::string& path,
                                       const SentenceParser& parser = default_parser());

    long long role_frequency(const std::string& lemma, Role role) const;
    long long connective_triple_frequency(const std::string& v, const std::string& cn,
                                          const std::string& x) const;
    long long doc_count() const { return doc_count_; }

    /// JSON dump with sorted entries; load checks the magic/version header.
    void save(const std::string& path) const;
    static CorpusIndex load(const std::string& path);

  private:
    friend class CorpusIndexBuilder;
    std::unordered_map<std::string, long long> role_counts_;   // "lemma\trole"
    std::unordered_map<std::string, long long> triple_counts_; // "v\tcn\tx"
    long long doc_count_ = 0;
};

enum class Polarity { negative, neutral, positive };

std::string to_string(Polarity p);
Polarity polarity_from_string(const std::string& name);

struct PolarityEntry {
    Polarity polarity = Polarity::neutral;
    double strength = 0.0;
};

/// Subjectivity lexicon: lemma -> polarity (+ optional strength).
/// TSV rows "lemma<TAB>polarity[<TAB>strength]"; missing lemma => neutral/0.
class PolarityLexicon {
  public:
    static PolarityLexicon load(const std::string& path);

    PolarityEntry lookup(const std::string& lemma) const;
    Polarity polarity_of(const std::string& lemma) const { return lookup(lemma).polarity; }
    std::size_t size() const { return entries_.size(); }

  private:
    std::unordered_map<std::string, PolarityEntry> entries_;
};

struct ChainEvent {
    std::string verb; ///< lemma
    Role role = Role::subject;

    bool operator==(const ChainEvent&) const = default;
};

using Chain = std::vector<ChainEvent>;

/// Narrative chains: ordered verb events sharing one protagonist, each
/// marked -s (protagonist is subject) or -o (object). TSV rows are
/// whitespace-separated "verb-s"/"verb-o" tokens, at most 12 per chain.
class NarrativeChainDb {
  public:
    static NarrativeChainDb load(const std::string& chains_path,
                                 const std::string& synonyms_path = "");

    /// Chains containing both events. On an exact miss with fallback
    /// enabled, retries with Porter-stem matching, then with the bundled
    /// synonym table. Empty result is valid.
    std::vector<const Chain*> chains_containing(const ChainEvent& e1, const ChainEvent& e2,
                                                bool similarity_fallback) const;

    std::size_t size() const { return chains_.size(); }

  private:
    std::vector<Chain> chains_;
    std::unordered_map<std::string, std::vector<std::string>> synonyms_;
};

/// Symmetric (lemma, lemma) -> [0,1] relatedness scores.
/// TSV rows "a<TAB>b<TAB>value"; missing pair => 0.
class RelatednessTable {
  public:
    static RelatednessTable load(const std::string& path);

    double relatedness(const std::string& a, const std::string& b) const;
    std::size_t size() const { return values_.size(); }

  private:
    std::unordered_map<std::string, double> values_; // "min\tmax"
};

struct FrameRoles {
    std::string ext_role; ///< generic subject noun for the event
    std::string obj_role; ///< generic object noun
};

/// verb lemma -> generic role nouns. TSV rows "verb<TAB>ext<TAB>obj".
class FrameRoleTable {
  public:
    static FrameRoleTable load(const std::string& path);

    std::optional<FrameRoles> roles_for(const std::string& verb_lemma) const;
    std::size_t size() const { return roles_.size(); }

  private:
    std::unordered_map<std::string, FrameRoles> roles_;
};

/// Per-word sentiment scores in [-1,1]. TSV rows "lemma<TAB>score";
/// missing lemma scores 0.
class ScoreTable {
  public:
    static ScoreTable load(const std::string& path);

    double score(const std::string& lemma) const;
    std::size_t size() const { return scores_.size(); }

  private:
    std::unordered_map<std::string, double> scores_;
};

/// Exact-phrase hit counts with a mandatory write-through cache.
/// Offline (network disabled), an uncached phrase raises CacheMissOffline;
/// online, one fetch runs and its result is persisted before being returned.
class HitCountProvider {
  public:
    using Fetcher = std::function<long long(const std::string& phrase)>;

    HitCountProvider() = default;
    HitCountProvider(const HitCountProvider& other);
    HitCountProvider& operator=(const HitCountProvider& other);

    /// `cache_path` may name a missing file (treated as an empty cache);
    /// successful live lookups are appended to it.
    static HitCountProvider open(const std::string& cache_path, bool network_enabled,
                                 const std::string& endpoint = "");

    long long hit_count(const std::string& phrase);

    /// Replaces the HTTP fetcher (tests inject a stub endpoint this way).
    void set_fetcher(Fetcher fetcher);

    void save_cache(const std::string& path) const;
    bool network_enabled() const { return network_enabled_; }
    std::size_t cache_size() const;

  private:
    long long fetch(const std::string& phrase);

    mutable std::mutex mutex_;
    std::unordered_map<std::string, long long> cache_;
    bool network_enabled_ = false;
    std::string endpoint_;
    std::string cache_path_;
    Fetcher fetcher_;
};

/// Conventional file layout of a resource directory.
struct ResourcePaths {
    std::string corpus_index;    // corpus_index.json
    std::string polarity;        // polarity.tsv
    std::string chains;          // chains.tsv
    std::string synonyms;        // synonyms.tsv
    std::string relatedness;     // relatedness.tsv
    std::string frames;          // frames.tsv
    std::string scores;          // scores.tsv
    std::string hit_cache;       // hitcache.json
    std::string annotations;     // annotations.json
    bool network_enabled = false;
    std::string endpoint;

    static ResourcePaths from_root(const std::string& dir);
};

/// Everything the feature extractor needs, loaded once. A missing file
/// yields that resource empty (all lookups at their documented defaults).
struct ResourceBundle {
    CorpusIndex corpus;
    PolarityLexicon polarity;
    NarrativeChainDb chains;
    RelatednessTable relatedness;
    FrameRoleTable frames;
    ScoreTable scores;
    HitCountProvider hits;
    AnnotationStore annotations;

    static ResourceBundle load(const ResourcePaths& paths);
};

} // namespace winoreg
