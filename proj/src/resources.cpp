#include "winoreg/resources.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "winoreg/error.hpp"
#include "winoreg/stemmer.hpp"

namespace winoreg {

namespace {

using ojson = nlohmann::ordered_json;

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos)
        return {};
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

/// Parsed TSV rows; '#'-prefixed lines and blank lines are skipped.
std::vector<std::vector<std::string>> read_tsv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#')
            continue;
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string field;
        while (std::getline(ls, field, '\t'))
            fields.push_back(trim(field));
        rows.push_back(std::move(fields));
    }
    return rows;
}

std::string role_key(const std::string& lemma, Role role) {
    return lemma + "\t" + to_string(role);
}

std::string triple_key(const std::string& v, const std::string& cn, const std::string& x) {
    return v + "\t" + cn + "\t" + x;
}

constexpr const char* kIndexMagic = "winoreg-corpus-index";
constexpr int kIndexVersion = 1;

} // namespace

std::string to_string(Role role) {
    return role == Role::subject ? "subject" : "object";
}

Role role_from_string(const std::string& name) {
    if (name == "subject" || name == "s")
        return Role::subject;
    if (name == "object" || name == "o")
        return Role::object;
    throw ParseError("unknown role '" + name + "'");
}

// ---------------------------------------------------------------------------
// CorpusIndex

SentenceParser CorpusIndex::default_parser() {
    return [](const std::string& sentence) {
        static const TextAnalyzer analyzer;
        SentenceAnalysis out;
        out.tokens = analyzer.tokenize(sentence);
        out.clauses = analyzer.clause_spans(out.tokens);
        try {
            out.triples = analyzer.extract_triples(sentence);
        } catch (const ParseError&) {
            // verbless line: contributes nothing
        }
        return out;
    };
}

CorpusIndex CorpusIndex::build(std::istream& corpus, const SentenceParser& parser) {
    CorpusIndex idx;
    std::string line;
    while (std::getline(corpus, line)) {
        if (trim(line).empty())
            continue;
        SentenceAnalysis parse = parser(line);
        ++idx.doc_count_;

        for (const auto& triple : parse.triples) {
            if (triple.is_aux_link())
                continue;
            if (triple.subject && triple.subject->pos == PosTag::noun)
                ++idx.role_counts_[role_key(triple.subject->lemma, Role::subject)];
            if (triple.object && triple.object->pos == PosTag::noun)
                ++idx.role_counts_[role_key(triple.object->lemma, Role::object)];
        }

        // (V, Cn, X) per clause pair bridged by a connective.
        auto triple_of_clause = [&](const ClauseSpan& span) -> const SemanticTriple* {
            for (const auto& t : parse.triples)
                if (!t.is_aux_link() && t.verb.index >= span.begin &&
                    t.verb.index < span.end)
                    return &t;
            return nullptr;
        };
        for (std::size_t c = 0; c + 1 < parse.clauses.size(); ++c) {
            const ClauseSpan& right = parse.clauses[c + 1];
            if (!right.connective)
                continue;
            const SemanticTriple* left_t = triple_of_clause(parse.clauses[c]);
            const SemanticTriple* right_t = triple_of_clause(right);
            if (!left_t || !right_t)
                continue;
            std::string x;
            if (right_t->verb.pos == PosTag::verb)
                x = porter_stem(right_t->verb.lemma);
            else if (right_t->object && right_t->object->pos == PosTag::adj)
                x = porter_stem(right_t->object->lemma);
            if (x.empty())
                continue;
            const std::string cn = parse.tokens[*right.connective].lower;
            ++idx.triple_counts_[triple_key(left_t->verb.lemma, cn, x)];
        }
    }
    return idx;
}

CorpusIndex CorpusIndex::build_from_file(const std::string& path,
                                         const SentenceParser& parser) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path);
    return build(in, parser);
}

long long CorpusIndex::role_frequency(const std::string& lemma, Role role) const {
    auto it = role_counts_.find(role_key(lemma, role));
    return it == role_counts_.end() ? 0 : it->second;
}

long long CorpusIndex::connective_triple_frequency(const std::string& v,
                                                   const std::string& cn,
                                                   const std::string& x) const {
    auto it = triple_counts_.find(triple_key(v, cn, x));
    return it == triple_counts_.end() ? 0 : it->second;
}

void CorpusIndex::save(const std::string& path) const {
    ojson doc;
    doc["magic"] = kIndexMagic;
    doc["version"] = kIndexVersion;
    doc["doc_count"] = doc_count_;

    std::map<std::string, long long> sorted(role_counts_.begin(), role_counts_.end());
    ojson roles = ojson::array();
    for (const auto& [key, count] : sorted) {
        auto tab = key.find('\t');
        roles.push_back(ojson::array({key.substr(0, tab), key.substr(tab + 1), count}));
    }
    doc["role_counts"] = std::move(roles);

    std::map<std::string, long long> sorted_triples(triple_counts_.begin(),
                                                    triple_counts_.end());
    ojson triples = ojson::array();
    for (const auto& [key, count] : sorted_triples) {
        auto t1 = key.find('\t');
        auto t2 = key.find('\t', t1 + 1);
        triples.push_back(ojson::array({key.substr(0, t1), key.substr(t1 + 1, t2 - t1 - 1),
                                        key.substr(t2 + 1), count}));
    }
    doc["connective_triples"] = std::move(triples);

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path);
    out << doc.dump(2) << '\n';
    if (!out)
        throw IoError("error while writing " + path);
}

CorpusIndex CorpusIndex::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path);
    ojson doc;
    try {
        doc = ojson::parse(in);
    } catch (const ojson::parse_error& e) {
        throw FormatError(path + ": " + e.what());
    }
    try {
        if (!doc.is_object() || doc.value("magic", "") != kIndexMagic)
            throw FormatError(path + ": not a corpus index file");
        if (doc.value("version", -1) != kIndexVersion)
            throw VersionError(path + ": unsupported corpus index version");
        CorpusIndex idx;
        idx.doc_count_ = doc.at("doc_count").get<long long>();
        for (const auto& row : doc.at("role_counts"))
            idx.role_counts_[role_key(row.at(0).get<std::string>(),
                                      role_from_string(row.at(1).get<std::string>()))] =
                row.at(2).get<long long>();
        for (const auto& row : doc.at("connective_triples"))
            idx.triple_counts_[triple_key(row.at(0).get<std::string>(),
                                          row.at(1).get<std::string>(),
                                          row.at(2).get<std::string>())] =
                row.at(3).get<long long>();
        return idx;
    } catch (const ojson::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// PolarityLexicon

std::string to_string(Polarity p) {
    switch (p) {
    case Polarity::negative: return "negative";
    case Polarity::neutral: return "neutral";
    case Polarity::positive: return "positive";
    }
    return "neutral";
}

Polarity polarity_from_string(const std::string& name) {
    if (name == "negative")
        return Polarity::negative;
    if (name == "neutral")
        return Polarity::neutral;
    if (name == "positive")
        return Polarity::positive;
    throw ParseError("unknown polarity '" + name + "'");
}

PolarityLexicon PolarityLexicon::load(const std::string& path) {
    PolarityLexicon lex;
    for (const auto& row : read_tsv(path)) {
        if (row.size() != 2 && row.size() != 3)
            throw ParseError(path + ": expected 'lemma<TAB>polarity[<TAB>strength]'");
        PolarityEntry entry;
        entry.polarity = polarity_from_string(row[1]);
        if (row.size() == 3) {
            try {
                entry.strength = std::stod(row[2]);
            } catch (const std::exception&) {
                throw ParseError(path + ": bad strength '" + row[2] + "'");
            }
            if (entry.strength < 0.0 || entry.strength > 1.0)
                throw ValidationError(path + ": strength outside [0,1] for '" + row[0] + "'");
        }
        lex.entries_[row[0]] = entry;
    }
    return lex;
}

PolarityEntry PolarityLexicon::lookup(const std::string& lemma) const {
    auto it = entries_.find(lemma);
    return it == entries_.end() ? PolarityEntry{} : it->second;
}

// ---------------------------------------------------------------------------
// NarrativeChainDb

NarrativeChainDb NarrativeChainDb::load(const std::string& chains_path,
                                        const std::string& synonyms_path) {
    NarrativeChainDb db;
    std::ifstream in(chains_path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + chains_path);
    std::string line;
    while (std::getline(in, line)) {
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#')
            continue;
        Chain chain;
        std::istringstream ls(stripped);
        std::string token;
        while (ls >> token) {
            auto dash = token.rfind('-');
            if (dash == std::string::npos || dash == 0 || dash + 2 != token.size() ||
                (token[dash + 1] != 's' && token[dash + 1] != 'o'))
                throw ValidationError(chains_path + ": chain event '" + token +
                                      "' must end in -s or -o");
            chain.push_back({token.substr(0, dash),
                             token[dash + 1] == 's' ? Role::subject : Role::object});
        }
        if (chain.empty())
            continue;
        if (chain.size() > 12)
            throw ValidationError(chains_path + ": chain longer than 12 events");
        db.chains_.push_back(std::move(chain));
    }

    if (!synonyms_path.empty()) {
        for (const auto& row : read_tsv(synonyms_path)) {
            if (row.size() != 2)
                throw ParseError(synonyms_path + ": expected 'word<TAB>synonym'");
            db.synonyms_[row[0]].push_back(row[1]);
            db.synonyms_[row[1]].push_back(row[0]);
        }
    }
    return db;
}

std::vector<const Chain*> NarrativeChainDb::chains_containing(const ChainEvent& e1,
                                                              const ChainEvent& e2,
                                                              bool similarity_fallback) const {
    enum Stage { exact, stemmed, synonym };
    auto matches = [&](const ChainEvent& chain_event, const ChainEvent& query,
                       Stage stage) {
        if (chain_event.role != query.role)
            return false;
        switch (stage) {
        case exact:
            return chain_event.verb == query.verb;
        case stemmed:
            return porter_stem(chain_event.verb) == porter_stem(query.verb);
        case synonym: {
            if (chain_event.verb == query.verb)
                return true;
            auto it = synonyms_.find(query.verb);
            if (it == synonyms_.end())
                return false;
            return std::find(it->second.begin(), it->second.end(), chain_event.verb) !=
                   it->second.end();
        }
        }
        return false;
    };

    const Stage last_stage = similarity_fallback ? synonym : exact;
    for (int stage = exact; stage <= last_stage; ++stage) {
        std::vector<const Chain*> found;
        for (const auto& chain : chains_) {
            auto has = [&](const ChainEvent& query) {
                return std::any_of(chain.begin(), chain.end(), [&](const ChainEvent& ev) {
                    return matches(ev, query, static_cast<Stage>(stage));
                });
            };
            if (has(e1) && has(e2))
                found.push_back(&chain);
        }
        if (!found.empty())
            return found;
    }
    return {};
}

// ---------------------------------------------------------------------------
// RelatednessTable

RelatednessTable RelatednessTable::load(const std::string& path) {
    RelatednessTable tbl;
    for (const auto& row : read_tsv(path)) {
        if (row.size() != 3)
            throw ParseError(path + ": expected 'a<TAB>b<TAB>value'");
        double value;
        try {
            value = std::stod(row[2]);
        } catch (const std::exception&) {
            throw ParseError(path + ": bad value '" + row[2] + "'");
        }
        if (value < 0.0 || value > 1.0)
            throw ValidationError(path + ": relatedness outside [0,1] for (" + row[0] +
                                  ", " + row[1] + ")");
        std::string key = std::min(row[0], row[1]) + "\t" + std::max(row[0], row[1]);
        auto [it, inserted] = tbl.values_.emplace(key, value);
        if (!inserted && it->second != value)
            throw ValidationError(path + ": asymmetric values for (" + row[0] + ", " +
                                  row[1] + ")");
    }
    return tbl;
}

double RelatednessTable::relatedness(const std::string& a, const std::string& b) const {
    auto it = values_.find(std::min(a, b) + "\t" + std::max(a, b));
    return it == values_.end() ? 0.0 : it->second;
}

// ---------------------------------------------------------------------------
// FrameRoleTable

FrameRoleTable FrameRoleTable::load(const std::string& path) {
    FrameRoleTable tbl;
    for (const auto& row : read_tsv(path)) {
        if (row.size() != 3 || row[1].empty() || row[2].empty())
            throw ParseError(path + ": expected 'verb<TAB>ext<TAB>obj' with non-empty roles");
        tbl.roles_[row[0]] = FrameRoles{row[1], row[2]};
    }
    return tbl;
}

std::optional<FrameRoles> FrameRoleTable::roles_for(const std::string& verb_lemma) const {
    auto it = roles_.find(verb_lemma);
    if (it == roles_.end())
        return std::nullopt;
    return it->second;
}

// ---------------------------------------------------------------------------
// ScoreTable

ScoreTable ScoreTable::load(const std::string& path) {
    ScoreTable tbl;
    for (const auto& row : read_tsv(path)) {
        if (row.size() != 2)
            throw ParseError(path + ": expected 'lemma<TAB>score'");
        double value;
        try {
            value = std::stod(row[1]);
        } catch (const std::exception&) {
            throw ParseError(path + ": bad score '" + row[1] + "'");
        }
        if (value < -1.0 || value > 1.0)
            throw ValidationError(path + ": score outside [-1,1] for '" + row[0] + "'");
        tbl.scores_[row[0]] = value;
    }
    return tbl;
}

double ScoreTable::score(const std::string& lemma) const {
    auto it = scores_.find(lemma);
    return it == scores_.end() ? 0.0 : it->second;
}

// ---------------------------------------------------------------------------
// HitCountProvider

HitCountProvider::HitCountProvider(const HitCountProvider& other) {
    std::lock_guard lock(other.mutex_);
    cache_ = other.cache_;
    network_enabled_ = other.network_enabled_;
    endpoint_ = other.endpoint_;
    cache_path_ = other.cache_path_;
    fetcher_ = other.fetcher_;
}

HitCountProvider& HitCountProvider::operator=(const HitCountProvider& other) {
    if (this == &other)
        return *this;
    HitCountProvider copy(other);
    std::lock_guard lock(mutex_);
    cache_ = std::move(copy.cache_);
    network_enabled_ = copy.network_enabled_;
    endpoint_ = std::move(copy.endpoint_);
    cache_path_ = std::move(copy.cache_path_);
    fetcher_ = std::move(copy.fetcher_);
    return *this;
}

HitCountProvider HitCountProvider::open(const std::string& cache_path, bool network_enabled,
                                        const std::string& endpoint) {
    HitCountProvider p;
    p.network_enabled_ = network_enabled;
    p.endpoint_ = endpoint;
    p.cache_path_ = cache_path;
    if (!cache_path.empty() && std::filesystem::exists(cache_path)) {
        std::ifstream in(cache_path, std::ios::binary);
        if (!in)
            throw IoError("cannot open " + cache_path);
        ojson doc;
        try {
            doc = ojson::parse(in);
        } catch (const ojson::parse_error& e) {
            throw FormatError(cache_path + ": " + e.what());
        }
        if (!doc.is_object())
            throw FormatError(cache_path + ": expected a JSON object phrase -> count");
        for (const auto& [phrase, count] : doc.items()) {
            if (!count.is_number_integer() || count.get<long long>() < 0)
                throw FormatError(cache_path + ": bad count for \"" + phrase + "\"");
            p.cache_[phrase] = count.get<long long>();
        }
    }
    return p;
}

void HitCountProvider::set_fetcher(Fetcher fetcher) {
    std::lock_guard lock(mutex_);
    fetcher_ = std::move(fetcher);
}

std::size_t HitCountProvider::cache_size() const {
    std::lock_guard lock(mutex_);
    return cache_.size();
}

long long HitCountProvider::fetch(const std::string& phrase) {
    if (fetcher_)
        return fetcher_(phrase);
    if (endpoint_.empty())
        throw NetworkError("no hit-count endpoint configured");

    // endpoint = scheme://host[:port][path-prefix]
    auto scheme_end = endpoint_.find("://");
    std::size_t path_start = endpoint_.find(
        '/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    std::string base =
        path_start == std::string::npos ? endpoint_ : endpoint_.substr(0, path_start);
    std::string prefix =
        path_start == std::string::npos ? "/" : endpoint_.substr(path_start);

    httplib::Client client(base);
    client.set_connection_timeout(5, 0);
    client.set_read_timeout(10, 0);
    httplib::Params params{{"q", phrase}};
    auto res = client.Get(httplib::append_query_params(prefix, params));
    if (!res)
        throw NetworkError("hit-count request failed: " + httplib::to_string(res.error()));
    if (res->status != 200)
        throw NetworkError("hit-count endpoint returned status " +
                           std::to_string(res->status));
    try {
        auto doc = ojson::parse(res->body);
        long long count = doc.at("count").get<long long>();
        if (count < 0)
            throw NetworkError("hit-count endpoint returned a negative count");
        return count;
    } catch (const ojson::exception& e) {
        throw NetworkError(std::string("bad hit-count response: ") + e.what());
    }
}

long long HitCountProvider::hit_count(const std::string& phrase) {
    if (phrase.empty())
        throw ValidationError("hit_count: empty phrase");
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(phrase); it != cache_.end())
        return it->second;
    if (!network_enabled_)
        throw CacheMissOffline("\"" + phrase + "\" is not cached and network is disabled");

    long long count = fetch(phrase); // throws NetworkError on failure, caching nothing
    cache_[phrase] = count;
    if (!cache_path_.empty()) {
        ojson doc = ojson::object();
        std::map<std::string, long long> sorted(cache_.begin(), cache_.end());
        for (const auto& [key, value] : sorted)
            doc[key] = value;
        std::ofstream out(cache_path_, std::ios::binary);
        if (!out)
            throw IoError("cannot write " + cache_path_);
        out << doc.dump(2) << '\n';
    }
    return count;
}

void HitCountProvider::save_cache(const std::string& path) const {
    std::lock_guard lock(mutex_);
    ojson doc = ojson::object();
    std::map<std::string, long long> sorted(cache_.begin(), cache_.end());
    for (const auto& [key, value] : sorted)
        doc[key] = value;
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path);
    out << doc.dump(2) << '\n';
    if (!out)
        throw IoError("error while writing " + path);
}

// ---------------------------------------------------------------------------
// ResourceBundle

ResourcePaths ResourcePaths::from_root(const std::string& dir) {
    auto join = [&](const char* name) { return (std::filesystem::path(dir) / name).string(); };
    ResourcePaths paths;
    paths.corpus_index = join("corpus_index.json");
    paths.polarity = join("polarity.tsv");
    paths.chains = join("chains.tsv");
    paths.synonyms = join("synonyms.tsv");
    paths.relatedness = join("relatedness.tsv");
    paths.frames = join("frames.tsv");
    paths.scores = join("scores.tsv");
    paths.hit_cache = join("hitcache.json");
    paths.annotations = join("annotations.json");
    return paths;
}

ResourceBundle ResourceBundle::load(const ResourcePaths& paths) {
    auto present = [](const std::string& p) {
        return !p.empty() && std::filesystem::exists(p);
    };
    ResourceBundle bundle;
    if (present(paths.corpus_index))
        bundle.corpus = CorpusIndex::load(paths.corpus_index);
    if (present(paths.polarity))
        bundle.polarity = PolarityLexicon::load(paths.polarity);
    if (present(paths.chains))
        bundle.chains = NarrativeChainDb::load(
            paths.chains, present(paths.synonyms) ? paths.synonyms : "");
    if (present(paths.relatedness))
        bundle.relatedness = RelatednessTable::load(paths.relatedness);
    if (present(paths.frames))
        bundle.frames = FrameRoleTable::load(paths.frames);
    if (present(paths.scores))
        bundle.scores = ScoreTable::load(paths.scores);
    bundle.hits = HitCountProvider::open(paths.hit_cache, paths.network_enabled,
                                         paths.endpoint);
    if (present(paths.annotations))
        bundle.annotations = AnnotationStore::load(paths.annotations);
    return bundle;
}

} // namespace winoreg
