#include "winoreg/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "winoreg/csv.hpp"
#include "winoreg/error.hpp"
#include "winoreg/stemmer.hpp"

namespace winoreg {

namespace {

using ojson = nlohmann::ordered_json;

constexpr std::array<const char*, FeatureVector::feature_count> kFeatureNames = {
    "ST",     "SP",     "STN",    "QTN",    "SEM",    "SL",     "WN",
    "WP",     "HN",     "VF",     "JF",     "GL1i1",  "GL1i2",  "GL2i1",
    "GL2i2",  "GL3i1",  "GL3i2",  "GL4i1",  "GL4i2",  "GLF1i1", "GLF1i2",
    "GLF2i1", "GLF2i2", "GLF3i1", "GLF3i2", "GLF4i1", "GLF4i2", "CN",
    "CNF",    "CNT",    "NCH",    "RP1i1",  "RP1i2",  "RP2i1",  "RP2i2",
    "RP3i1",  "RP3i2",  "RPTL",   "OP1i1",  "OP1i2",  "OP2i1",  "OP2i2",
    "OP3i1",  "OP3i2",  "OPTL",   "TBSPOL", "TBQPOL"};

constexpr std::array<bool, FeatureVector::feature_count> kCategorical = {
    true,  true,  false, false, false, false, false, false, false, false,
    false, false, false, false, false, false, false, false, false, false,
    false, false, false, false, false, false, false, false, false, false,
    false, false, false, true,  true,  true,  true,  false, false, false,
    true,  true,  true,  true,  false, true,  true};

} // namespace

const std::vector<ComponentGroup>& component_groups() {
    static const std::vector<ComponentGroup> groups = {
        {"sentence_pattern", {"ST", "SP"}},
        {"negation", {"STN", "QTN"}},
        {"semantic_role", {"SEM"}},
        {"length", {"SL"}},
        {"word_relations", {"WN", "WP", "HN", "VF", "JF"}},
        {"search_queries",
         {"GL1i1", "GL1i2", "GL2i1", "GL2i2", "GL3i1", "GL3i2", "GL4i1", "GL4i2",
          "GLF1i1", "GLF1i2", "GLF2i1", "GLF2i2", "GLF3i1", "GLF3i2", "GLF4i1",
          "GLF4i2"}},
        {"relatedness", {"CN", "CNF"}},
        {"connective", {"CNT"}},
        {"narrative_chain", {"NCH"}},
        {"polarity_rule",
         {"RP1i1", "RP1i2", "RP2i1", "RP2i2", "RP3i1", "RP3i2", "RPTL"}},
        {"polarity_machine",
         {"OP1i1", "OP1i2", "OP2i1", "OP2i2", "OP3i1", "OP3i2", "OPTL"}},
        {"polarity_simple", {"TBSPOL", "TBQPOL"}},
    };
    return groups;
}

std::size_t component_index(const std::string& name) {
    const auto& groups = component_groups();
    for (std::size_t i = 0; i < groups.size(); ++i)
        if (groups[i].name == name)
            return i;
    throw UnknownGroup("unknown feature component '" + name + "'");
}

const std::array<std::string, FeatureVector::feature_count>& FeatureVector::feature_names() {
    static const auto names = [] {
        std::array<std::string, feature_count> out;
        for (std::size_t i = 0; i < feature_count; ++i)
            out[i] = kFeatureNames[i];
        return out;
    }();
    return names;
}

bool FeatureVector::categorical(std::size_t index) { return kCategorical.at(index); }

std::size_t FeatureVector::index_of(const std::string& feature) {
    for (std::size_t i = 0; i < feature_count; ++i)
        if (feature == kFeatureNames[i])
            return i;
    throw UnknownGroup("unknown feature '" + feature + "'");
}

long long FeatureVector::get_int(const std::string& feature) const {
    return std::get<long long>(values[index_of(feature)]);
}

const std::string& FeatureVector::get_str(const std::string& feature) const {
    return std::get<std::string>(values[index_of(feature)]);
}

void FeatureVector::set(const std::string& feature, long long v) {
    values[index_of(feature)] = v;
}

void FeatureVector::set(const std::string& feature, std::string v) {
    values[index_of(feature)] = std::move(v);
}

std::string FeatureVector::value_string(std::size_t index) const {
    const Value& v = values.at(index);
    if (std::holds_alternative<long long>(v))
        return std::to_string(std::get<long long>(v));
    return std::get<std::string>(v);
}

FeatureVector::Value FeatureVector::value_from_string(std::size_t index,
                                                      const std::string& s) {
    if (categorical(index))
        return s;
    try {
        return static_cast<long long>(std::stoll(s));
    } catch (const std::exception&) {
        throw ParseError("feature " + std::string(kFeatureNames[index]) +
                         ": bad numeric value '" + s + "'");
    }
}

// ---------------------------------------------------------------------------
// Per-half analysis shared by all components

struct FeatureExtractor::HalfAnalysis {
    std::vector<Token> s_tokens;
    std::vector<ClauseSpan> s_clauses;
    std::vector<SemanticTriple> s_triples; // empty when extraction failed
    bool s_triples_ok = false;
    const std::unordered_map<std::size_t, PosTag>* s_pos_overrides = nullptr;

    std::vector<Token> q_tokens;
    std::vector<SemanticTriple> q_triples;

    struct Candidate {
        std::vector<std::string> words;        // lowercase words of the answer
        std::optional<std::size_t> head_index; // token index of the head in the sentence
        std::string head_lower;
        std::string head_lemma;
        bool proper = false;
        std::optional<Role> role;                   // role at its governing verb
        const SemanticTriple* governing = nullptr;  // triple containing the head
    };
    std::array<Candidate, 2> cand;

    std::optional<std::size_t> pronoun_index;
    std::optional<std::size_t> pronoun_clause;
    const SemanticTriple* pronoun_triple = nullptr;
    std::optional<Role> pronoun_sentence_role;
    std::optional<Role> pronoun_question_role;
    const SemanticTriple* question_wh_triple = nullptr;
    const SemanticTriple* main_triple = nullptr;

    std::optional<Role> pronoun_role() const {
        return pronoun_question_role ? pronoun_question_role : pronoun_sentence_role;
    }

    std::optional<std::size_t> clause_of(std::size_t token_index) const {
        for (std::size_t c = 0; c < s_clauses.size(); ++c)
            if (token_index >= s_clauses[c].begin && token_index < s_clauses[c].end)
                return c;
        return std::nullopt;
    }

    /// The definite pronoun's governing relation, falling back to the
    /// question's wh triple ("Who advocated violence?") when the sentence
    /// parse yields none.
    const SemanticTriple* pronoun_relation() const {
        return pronoun_triple ? pronoun_triple : question_wh_triple;
    }

    std::optional<Role> pronoun_relation_role() const {
        if (pronoun_triple)
            return pronoun_sentence_role;
        if (question_wh_triple)
            return pronoun_question_role;
        return std::nullopt;
    }
};

namespace {

using Analysis = FeatureExtractor::HalfAnalysis;
using Candidate = Analysis::Candidate;

/// True when a triple is a copular relation (aux verb + adjective complement).
bool copular(const SemanticTriple& t) {
    return t.verb.pos == PosTag::aux_verb && t.object && t.object->pos == PosTag::adj;
}

Polarity flip(Polarity p) {
    switch (p) {
    case Polarity::negative: return Polarity::positive;
    case Polarity::positive: return Polarity::negative;
    case Polarity::neutral: return Polarity::neutral;
    }
    return Polarity::neutral;
}

/// Event polarity projected onto a participant: the subject of a negative
/// verb is negative and its object positive (mirrored for positive verbs).
Polarity project(Polarity event, Role role) {
    if (event == Polarity::neutral)
        return Polarity::neutral;
    return role == Role::subject ? event : flip(event);
}

struct PairDecision {
    long long i1 = 0, i2 = 0;
    bool decided() const { return i1 != 0 || i2 != 0; }
};

PairDecision decide_pair(long long h_a, long long h_b, double threshold) {
    double diff = static_cast<double>(h_a - h_b) /
                  static_cast<double>(std::max({h_a, h_b, 1LL}));
    PairDecision d;
    if (diff > threshold)
        d.i1 = 1;
    else if (diff < -threshold)
        d.i2 = 1;
    return d;
}

std::string bucket(double score) {
    if (score >= 0.1)
        return "positive";
    if (score <= -0.1)
        return "negative";
    return "neutral";
}

std::string join_words(const std::vector<std::string>& words) {
    std::string out;
    for (const auto& w : words) {
        if (!out.empty())
            out += ' ';
        out += w;
    }
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// FeatureExtractor

FeatureExtractor::FeatureExtractor(ResourceBundle& resources, ExtractionConfig config)
    : res_(resources), cfg_(config) {
    if (!(cfg_.threshold > 0.0 && cfg_.threshold < 1.0))
        throw ConfigError("threshold must lie in (0,1)");
    if (cfg_.min_triple_count < 1)
        throw ConfigError("min triple count must be >= 1");
    const PolarityLexicon& lex = res_.polarity;
    machine_ = [&lex](const std::string& lemma, bool negated) {
        Polarity p = lex.polarity_of(lemma);
        return negated ? flip(p) : p;
    };
}

void FeatureExtractor::set_machine_analyzer(PolarityAnalyzer analyzer) {
    if (!analyzer)
        throw ConfigError("machine analyzer must be callable");
    machine_ = std::move(analyzer);
}

FeatureExtractor::HalfAnalysis FeatureExtractor::analyze(const SchemaHalf& half) const {
    validate_half(half);
    HalfAnalysis a;

    const ParseAnnotation* ann = res_.annotations.find(half.id);
    const auto* s_pos = ann && !ann->sentence_pos.empty() ? &ann->sentence_pos : nullptr;
    const auto* q_pos = ann && !ann->question_pos.empty() ? &ann->question_pos : nullptr;

    a.s_pos_overrides = s_pos;
    a.s_tokens = analyzer_.tokenize(half.sentence, s_pos);
    a.s_clauses = analyzer_.clause_spans(a.s_tokens);
    try {
        a.s_triples = analyzer_.extract_triples(
            half.sentence, ann && !ann->sentence_triples.empty() ? &ann->sentence_triples
                                                                 : nullptr,
            s_pos);
        a.s_triples_ok = true;
    } catch (const ParseError&) {
    }

    a.q_tokens = analyzer_.tokenize(half.question, q_pos);
    try {
        a.q_triples = analyzer_.extract_triples(
            half.question, ann && !ann->question_triples.empty() ? &ann->question_triples
                                                                 : nullptr,
            q_pos);
    } catch (const ParseError&) {
    }

    // Candidates: locate each answer phrase in the sentence; its head is the
    // last noun of the phrase ("The city councilmen" -> councilmen).
    for (int i = 0; i < 2; ++i) {
        Candidate& c = a.cand[i];
        const std::string& answer = i == 0 ? half.answer1 : half.answer2;
        auto answer_tokens = analyzer_.tokenize(answer);
        std::size_t head_offset = answer_tokens.size() - 1;
        for (std::size_t k = answer_tokens.size(); k-- > 0;)
            if (answer_tokens[k].pos == PosTag::noun) {
                head_offset = k;
                break;
            }
        for (const auto& t : answer_tokens)
            c.words.push_back(t.lower);
        c.proper = !answer_tokens.empty() &&
                   answer_tokens[0].pos != PosTag::det &&
                   std::all_of(answer_tokens.begin(), answer_tokens.end(),
                               [](const Token& t) {
                                   return std::isupper(
                                       static_cast<unsigned char>(t.surface[0]));
                               });
        for (std::size_t start = 0; start + c.words.size() <= a.s_tokens.size(); ++start) {
            bool match = true;
            for (std::size_t k = 0; k < c.words.size(); ++k)
                if (a.s_tokens[start + k].lower != c.words[k]) {
                    match = false;
                    break;
                }
            if (match) {
                c.head_index = start + head_offset;
                break;
            }
        }
        if (c.head_index) {
            c.head_lower = a.s_tokens[*c.head_index].lower;
            c.head_lemma = lex::noun_lemma(c.head_lower);
        }
    }

    for (const auto& t : a.s_triples) {
        if (t.is_aux_link())
            continue;
        if (!a.main_triple)
            a.main_triple = &t;
        for (auto& c : a.cand) {
            if (!c.head_index || c.governing)
                continue;
            if (t.subject && t.subject->index == *c.head_index) {
                c.role = Role::subject;
                c.governing = &t;
            } else if (t.object && t.object->index == *c.head_index) {
                c.role = Role::object;
                c.governing = &t;
            }
        }
    }

    for (const auto& t : a.s_tokens)
        if (lex::is_definite_pronoun(t.lower)) {
            a.pronoun_index = t.index;
            break;
        }
    if (a.pronoun_index) {
        a.pronoun_clause = a.clause_of(*a.pronoun_index);
        for (const auto& t : a.s_triples) {
            if (t.is_aux_link())
                continue;
            if (t.subject && t.subject->index == *a.pronoun_index) {
                a.pronoun_triple = &t;
                a.pronoun_sentence_role = Role::subject;
                break;
            }
            if (t.object && t.object->index == *a.pronoun_index) {
                a.pronoun_triple = &t;
                a.pronoun_sentence_role = Role::object;
                break;
            }
        }
    }

    for (const auto& t : a.q_triples) {
        if (t.is_aux_link())
            continue;
        if (t.subject && lex::is_wh_word(t.subject->lower)) {
            a.question_wh_triple = &t;
            a.pronoun_question_role = Role::subject;
            break;
        }
        if (t.object && lex::is_wh_word(t.object->lower)) {
            a.question_wh_triple = &t;
            a.pronoun_question_role = Role::object;
            break;
        }
    }

    return a;
}

// ---------------------------------------------------------------------------
// Component implementations (free functions over the shared analysis)

namespace {

std::pair<std::string, std::string>
sentence_pattern_impl(const TextAnalyzer& analyzer, const SchemaHalf& half,
                      const std::unordered_map<std::size_t, PosTag>* pos_overrides) {
    SentenceShape shape = analyzer.classify_sentence(half.sentence, pos_overrides);
    return {to_string(shape.type), shape.pattern};
}

struct NegationResult {
    long long stn = 0, qtn = 0;
    bool applicable = false;
};

NegationResult negation_impl(const TextAnalyzer& analyzer, const Analysis& a) {
    // Candidate scope: triples of the clauses containing the candidate heads.
    std::set<std::size_t> cand_clauses;
    for (const auto& c : a.cand)
        if (c.head_index)
            if (auto cl = a.clause_of(*c.head_index))
                cand_clauses.insert(*cl);
    std::vector<SemanticTriple> cand_triples;
    for (const auto& t : a.s_triples)
        if (!t.is_aux_link())
            if (auto cl = a.clause_of(t.verb.index); cl && cand_clauses.count(*cl))
                cand_triples.push_back(t);

    // Pronoun scope: the pronoun's clause, else the question parse.
    std::vector<SemanticTriple> pron_triples;
    if (a.pronoun_clause) {
        for (const auto& t : a.s_triples)
            if (!t.is_aux_link())
                if (auto cl = a.clause_of(t.verb.index); cl && *cl == *a.pronoun_clause)
                    pron_triples.push_back(t);
    }
    if (pron_triples.empty())
        for (const auto& t : a.q_triples)
            if (!t.is_aux_link())
                pron_triples.push_back(t);

    auto stn = analyzer.detect_negation(cand_triples, NegationScope::candidates_clause);
    auto qtn = analyzer.detect_negation(pron_triples, NegationScope::pronoun_clause);
    NegationResult r;
    r.stn = stn.value_or(false) ? 1 : 0;
    r.qtn = qtn.value_or(false) ? 1 : 0;
    r.applicable = stn.has_value() && qtn.has_value();
    return r;
}

struct SemResult {
    long long sem = -1;
    bool applicable = false;
};

SemResult semantic_role_impl(const CorpusIndex& idx, const Analysis& a) {
    SemResult r;
    auto role = a.pronoun_role();
    if (!role)
        return r;
    r.applicable = true;

    auto majority = [&](const Candidate& c) -> std::optional<Role> {
        if (c.head_lemma.empty())
            return std::nullopt;
        long long subj = idx.role_frequency(c.head_lemma, Role::subject);
        long long obj = idx.role_frequency(c.head_lemma, Role::object);
        if (subj > obj)
            return Role::subject;
        if (obj > subj)
            return Role::object;
        return std::nullopt;
    };
    auto m1 = majority(a.cand[0]);
    auto m2 = majority(a.cand[1]);
    bool match1 = m1 && *m1 == *role;
    bool match2 = m2 && *m2 == *role;
    if (match1 && !match2)
        r.sem = 1;
    else if (match2 && !match1)
        r.sem = 2;
    return r;
}

struct WordRelationsResult {
    std::array<long long, 5> values{}; // WN, WP, HN, VF, JF
    bool applicable = false;
};

WordRelationsResult word_relations_impl(const Analysis& a) {
    WordRelationsResult r;
    std::optional<std::size_t> cn_index;
    for (const auto& span : a.s_clauses)
        if (span.connective) {
            cn_index = span.connective;
            break;
        }
    if (!cn_index)
        return r; // component only applies to sentences with a connective
    r.applicable = true;

    auto is_cand_head = [&](std::size_t i) {
        return (a.cand[0].head_index && *a.cand[0].head_index == i) ||
               (a.cand[1].head_index && *a.cand[1].head_index == i);
    };

    long long excluded_words = 1; // the connective
    for (const auto& c : a.cand)
        if (c.head_index)
            ++excluded_words;
    r.values[0] = static_cast<long long>(a.s_tokens.size()) - excluded_words; // WN

    long long wp = 0;
    for (std::size_t i = 0; i < *cn_index; ++i) {
        for (std::size_t j = *cn_index + 1; j < a.s_tokens.size(); ++j) {
            if (is_cand_head(i) || is_cand_head(j))
                continue;
            PosTag pi = a.s_tokens[i].pos, pj = a.s_tokens[j].pos;
            if ((pi == PosTag::adj && pj == PosTag::noun) ||
                (pi == PosTag::noun && pj == PosTag::adj))
                continue;
            ++wp;
        }
    }
    r.values[1] = wp; // WP

    std::set<std::string> heads, verbs, adjectives;
    for (const auto& c : a.cand) {
        if (c.governing) {
            heads.insert(c.governing->verb.lower);
            if (c.governing->verb.pos == PosTag::verb)
                verbs.insert(c.governing->verb.lower);
            // predicative adjective: "X was clever"
            if (c.role == Role::subject && copular(*c.governing))
                adjectives.insert(c.governing->object->lower);
        }
        // attributive adjectives inside the candidate phrase
        if (c.head_index) {
            std::size_t begin = *c.head_index - std::min<std::size_t>(*c.head_index,
                                                                      c.words.size() - 1);
            for (std::size_t k = begin; k < *c.head_index; ++k)
                if (a.s_tokens[k].pos == PosTag::adj)
                    adjectives.insert(a.s_tokens[k].lower);
        }
    }
    r.values[2] = static_cast<long long>(heads.size());      // HN
    r.values[3] = static_cast<long long>(verbs.size());      // VF
    r.values[4] = static_cast<long long>(adjectives.size()); // JF
    return r;
}

/// VQ/W come from the pronoun's clause in the sentence (its surface verb:
/// "cat was", not the question's "is"), falling back to the question's wh
/// triple; J is the predicate adjective after a verb-to-be.
QuerySet build_queries_impl(const Analysis& a, double threshold,
                            const std::string& a1, const std::string& a2) {
    std::string vq;
    std::vector<std::string> w;

    if (a.pronoun_triple && a.pronoun_clause) {
        const Token& verb = a.pronoun_triple->verb;
        vq = verb.lower;
        const ClauseSpan& span = a.s_clauses[*a.pronoun_clause];
        for (std::size_t i = verb.index + 1; i < span.end; ++i)
            w.push_back(a.s_tokens[i].lower);
    } else if (a.question_wh_triple) {
        const Token& verb = a.question_wh_triple->verb;
        vq = verb.lower;
        for (std::size_t i = verb.index + 1; i < a.q_tokens.size(); ++i)
            w.push_back(a.q_tokens[i].lower);
    } else {
        throw EmptyInput("no verb governing the definite pronoun");
    }

    std::optional<std::string> j;
    auto find_predicate_adj = [](const std::vector<Token>& tokens, std::size_t begin,
                                 std::size_t end) -> std::optional<std::string> {
        for (std::size_t i = begin; i < end; ++i)
            if (lex::is_verb_to_be(tokens[i].lower))
                for (std::size_t k = i + 1; k < end; ++k)
                    if (tokens[k].pos == PosTag::adj)
                        return tokens[k].lower;
        return std::nullopt;
    };
    if (a.pronoun_clause) {
        const ClauseSpan& span = a.s_clauses[*a.pronoun_clause];
        j = find_predicate_adj(a.s_tokens, span.begin, span.end);
    }
    if (!j)
        j = find_predicate_adj(a.q_tokens, 0, a.q_tokens.size());

    QuerySet q;
    q.threshold = threshold;
    q.qr1 = a1 + " " + vq;
    q.qr2 = a2 + " " + vq;
    q.qr3 = w.empty() ? q.qr1 : q.qr1 + " " + join_words(w);
    q.qr4 = w.empty() ? q.qr2 : q.qr2 + " " + join_words(w);
    if (j) {
        q.qr5 = *j + " " + a1;
        q.qr6 = *j + " " + a2;
    }
    return q;
}

struct SearchResult {
    std::array<long long, 8> values{};
    bool applicable = false;
};

SearchResult search_queries_impl(HitCountProvider& hits, const QuerySet& q) {
    SearchResult r;
    r.applicable = true;

    std::vector<PairDecision> decisions;
    auto run_pair = [&](const std::string& qa, const std::string& qb) {
        PairDecision d;
        try {
            d = decide_pair(hits.hit_count(qa), hits.hit_count(qb), q.threshold);
        } catch (const CacheMissOffline&) {
            r.applicable = false; // pair stays (0,0), logged via coverage
        }
        decisions.push_back(d);
        return d;
    };
    PairDecision g1 = run_pair(q.qr1, q.qr2);
    PairDecision g2 = run_pair(q.qr3, q.qr4);
    PairDecision g3 = q.qr5 ? run_pair(*q.qr5, *q.qr6) : PairDecision{};

    long long votes1 = g1.i1 + g2.i1 + g3.i1;
    long long votes2 = g1.i2 + g2.i2 + g3.i2;
    PairDecision g4;
    if (votes1 > votes2)
        g4.i1 = 1;
    else if (votes2 > votes1)
        g4.i2 = 1;

    r.values = {g1.i1, g1.i2, g2.i1, g2.i2, g3.i1, g3.i2, g4.i1, g4.i2};
    return r;
}

/// Frame-role substitution: applies only when both candidates are proper
/// names and the verb governing them has frame roles; each candidate is
/// replaced by the role noun matching its sentence role.
std::optional<std::pair<std::string, std::string>> frame_substitution(
    const FrameRoleTable& frames, const Analysis& a) {
    if (!a.cand[0].proper || !a.cand[1].proper)
        return std::nullopt;
    if (!a.main_triple || !a.cand[0].role || !a.cand[1].role)
        return std::nullopt;
    auto roles = frames.roles_for(a.main_triple->verb.lemma);
    if (!roles)
        return std::nullopt;
    auto substitute = [&](Role role) {
        return role == Role::subject ? roles->ext_role : roles->obj_role;
    };
    return std::make_pair(substitute(*a.cand[0].role), substitute(*a.cand[1].role));
}

struct RelatednessResult {
    long long cn = -1, cnf = -1;
    bool applicable = false;
};

/// The word compared against each candidate is the pronoun's predicate: the
/// object of its relation when the pronoun is the subject ("it was clever"
/// -> clever), else the relation's verb.
std::optional<std::string> pronoun_governing_lemma(const Analysis& a) {
    const SemanticTriple* t = a.pronoun_relation();
    auto role = a.pronoun_relation_role();
    if (!t || !role)
        return std::nullopt;
    if (*role == Role::subject && t->object)
        return t->object->lemma;
    return t->verb.lemma;
}

RelatednessResult relatedness_impl(const RelatednessTable& tbl,
                                   const FrameRoleTable& frames, const Analysis& a) {
    RelatednessResult r;
    auto gov = pronoun_governing_lemma(a);
    if (!gov)
        return r;
    r.applicable = true;

    auto compare = [&](const std::string& w1, const std::string& w2) -> long long {
        double v1 = tbl.relatedness(w1, *gov);
        double v2 = tbl.relatedness(w2, *gov);
        if (v1 == 0.0 && v2 == 0.0)
            return -1;
        if (v1 > v2)
            return 1;
        if (v2 > v1)
            return 2;
        return -1;
    };
    if (!a.cand[0].head_lemma.empty() && !a.cand[1].head_lemma.empty())
        r.cn = compare(a.cand[0].head_lemma, a.cand[1].head_lemma);
    if (auto sub = frame_substitution(frames, a))
        r.cnf = compare(lex::noun_lemma(sub->first), lex::noun_lemma(sub->second));
    return r;
}

struct ConnectiveResult {
    long long cnt = -1;
    bool applicable = false;
};

/// Picks the candidate by corpus evidence for (V, Cn, X): X verb -> the
/// candidate sharing the pronoun's role; X adjective without comparison ->
/// the subject of V; otherwise undetermined.
ConnectiveResult connective_impl(const CorpusIndex& idx, long long min_count,
                                 const Analysis& a) {
    ConnectiveResult r;
    if (!a.main_triple || !a.pronoun_triple || !a.pronoun_clause)
        return r;
    const ClauseSpan& pron_span = a.s_clauses[*a.pronoun_clause];
    if (!pron_span.connective)
        return r;

    std::string x;
    bool x_is_verb = false;
    std::string x_source_lower;
    if (a.pronoun_triple->verb.pos == PosTag::verb) {
        x = porter_stem(a.pronoun_triple->verb.lemma);
        x_source_lower = a.pronoun_triple->verb.lower;
        x_is_verb = true;
    } else if (copular(*a.pronoun_triple)) {
        x = porter_stem(a.pronoun_triple->object->lemma);
        x_source_lower = a.pronoun_triple->object->lower;
    } else {
        return r;
    }
    r.applicable = true;

    const std::string cn = a.s_tokens[*pron_span.connective].lower;
    long long count =
        idx.connective_triple_frequency(a.main_triple->verb.lemma, cn, x);
    if (count < min_count)
        return r;

    auto pick_by_role = [&](Role role) -> long long {
        bool c1 = a.cand[0].role && *a.cand[0].role == role;
        bool c2 = a.cand[1].role && *a.cand[1].role == role;
        if (c1 && !c2)
            return 1;
        if (c2 && !c1)
            return 2;
        return -1;
    };

    if (x_is_verb) {
        if (auto role = a.pronoun_sentence_role)
            r.cnt = pick_by_role(*role);
    } else {
        bool comparison = lex::is_comparative_adj(x_source_lower);
        for (const auto& t : a.s_tokens)
            comparison = comparison || t.lower == "than";
        if (!comparison)
            r.cnt = pick_by_role(Role::subject);
    }
    return r;
}

struct ChainResult {
    long long nch = -1;
    bool applicable = false;
};

/// Chains vote on the protagonist's role at V; the candidate holding that
/// role in the sentence wins ("refuse-o advocate-s" -> the refuse object).
ChainResult narrative_chain_impl(const NarrativeChainDb& db, const Analysis& a) {
    ChainResult r;
    if (!a.main_triple || a.main_triple->verb.pos != PosTag::verb)
        return r;
    const SemanticTriple* pron = a.pronoun_relation();
    auto pron_role = a.pronoun_relation_role();
    if (!pron || !pron_role || pron->verb.pos != PosTag::verb)
        return r;
    r.applicable = true;

    ChainEvent ex{pron->verb.lemma, *pron_role};
    std::size_t as_subject =
        db.chains_containing({a.main_triple->verb.lemma, Role::subject}, ex, true).size();
    std::size_t as_object =
        db.chains_containing({a.main_triple->verb.lemma, Role::object}, ex, true).size();
    if (as_subject == as_object)
        return r;
    Role protagonist = as_subject > as_object ? Role::subject : Role::object;

    bool c1 = a.cand[0].role && *a.cand[0].role == protagonist;
    bool c2 = a.cand[1].role && *a.cand[1].role == protagonist;
    if (c1 && !c2)
        r.nch = 1;
    else if (c2 && !c1)
        r.nch = 2;
    return r;
}

struct PolarityFeatures {
    long long i1 = 0, i2 = 0;
    // "none" marks pairs that could not be derived (coverage goes false).
    std::string p2i1 = "none", p2i2 = "none", p3i1 = "none", p3i2 = "none";
    long long total = -1;
    bool applicable = false;
};

PolarityFeatures polarity_impl(const FeatureExtractor::PolarityAnalyzer& polarity_of,
                               const Analysis& a) {
    PolarityFeatures r;

    auto participant_polarity = [&](const SemanticTriple& t,
                                    Role role) -> Polarity {
        if (copular(t))
            return polarity_of(t.object->lemma, t.negated_verb);
        return project(polarity_of(t.verb.lemma, t.negated_verb), role);
    };

    auto cand_polarity = [&](const Candidate& c) -> std::optional<Polarity> {
        if (!c.governing || !c.role)
            return std::nullopt;
        return participant_polarity(*c.governing, *c.role);
    };
    auto p1 = cand_polarity(a.cand[0]);
    auto p2 = cand_polarity(a.cand[1]);

    std::optional<Polarity> pron;
    if (const SemanticTriple* t = a.pronoun_relation())
        if (auto role = a.pronoun_relation_role())
            pron = participant_polarity(*t, *role);

    if (!p1 || !p2 || !pron)
        return r;
    r.applicable = true;

    bool match1 = *p1 != Polarity::neutral && *p1 == *pron;
    bool match2 = *p2 != Polarity::neutral && *p2 == *pron;
    if (match1 && !match2)
        r.i1 = 1;
    else if (match2 && !match1)
        r.i2 = 1;

    r.p2i1 = to_string(*p1) + "-" + to_string(*pron);
    r.p2i2 = to_string(*p2) + "-" + to_string(*pron);

    std::optional<std::string> reversing;
    for (const auto& span : a.s_clauses)
        if (span.connective &&
            lex::is_reversing_connective(a.s_tokens[*span.connective].lower)) {
            reversing = a.s_tokens[*span.connective].lower;
            break;
        }
    r.p3i1 = reversing ? r.p2i1 + "-" + *reversing : r.p2i1;
    r.p3i2 = reversing ? r.p2i2 + "-" + *reversing : r.p2i2;

    if (r.i1 > r.i2)
        r.total = 1;
    else if (r.i2 > r.i1)
        r.total = 2;
    return r;
}

struct SimplePolarityResult {
    std::string sentence_bucket = "neutral";
    std::string question_bucket = "neutral";
    bool applicable = false;
};

SimplePolarityResult polarity_simple_impl(const ScoreTable& scores, const Analysis& a) {
    SimplePolarityResult r;
    std::optional<std::string> sentence_word;
    if (a.main_triple)
        sentence_word = a.main_triple->verb.lemma;

    std::optional<std::string> question_word;
    if (const SemanticTriple* t = a.pronoun_relation())
        question_word = copular(*t) ? t->object->lemma : t->verb.lemma;

    if (!sentence_word || !question_word)
        return r;
    r.applicable = true;
    r.sentence_bucket = bucket(scores.score(*sentence_word));
    r.question_bucket = bucket(scores.score(*question_word));
    return r;
}

} // namespace

// ---------------------------------------------------------------------------
// Public component operations

std::pair<std::string, std::string>
FeatureExtractor::f_sentence_pattern(const SchemaHalf& half) const {
    auto a = analyze(half);
    return sentence_pattern_impl(analyzer_, half, a.s_pos_overrides);
}

std::pair<long long, long long> FeatureExtractor::f_negation(const SchemaHalf& half) const {
    auto a = analyze(half);
    auto r = negation_impl(analyzer_, a);
    return {r.stn, r.qtn};
}

long long FeatureExtractor::f_semantic_role(const SchemaHalf& half) const {
    return semantic_role_impl(res_.corpus, analyze(half)).sem;
}

long long FeatureExtractor::f_length(const SchemaHalf& half) const {
    return static_cast<long long>(analyze(half).s_tokens.size());
}

std::array<long long, 5> FeatureExtractor::f_word_relations(const SchemaHalf& half) const {
    return word_relations_impl(analyze(half)).values;
}

QuerySet FeatureExtractor::build_queries(const SchemaHalf& half) const {
    auto a = analyze(half);
    if (!a.cand[0].head_index || !a.cand[1].head_index)
        throw EmptyInput("candidates not located in sentence");
    return build_queries_impl(a, cfg_.threshold, a.cand[0].head_lower,
                              a.cand[1].head_lower);
}

std::array<long long, 8> FeatureExtractor::f_search_queries(const SchemaHalf& half) const {
    auto a = analyze(half);
    try {
        if (!a.cand[0].head_index || !a.cand[1].head_index)
            throw EmptyInput("candidates not located in sentence");
        QuerySet q = build_queries_impl(a, cfg_.threshold, a.cand[0].head_lower,
                                        a.cand[1].head_lower);
        return search_queries_impl(res_.hits, q).values;
    } catch (const EmptyInput&) {
        return {};
    }
}

std::array<long long, 8>
FeatureExtractor::f_search_queries_framed(const SchemaHalf& half) const {
    auto a = analyze(half);
    auto sub = frame_substitution(res_.frames, a);
    if (!sub)
        return {};
    try {
        QuerySet q = build_queries_impl(a, cfg_.threshold, sub->first, sub->second);
        return search_queries_impl(res_.hits, q).values;
    } catch (const EmptyInput&) {
        return {};
    }
}

std::pair<long long, long long> FeatureExtractor::f_relatedness(const SchemaHalf& half) const {
    auto r = relatedness_impl(res_.relatedness, res_.frames, analyze(half));
    return {r.cn, r.cnf};
}

long long FeatureExtractor::f_connective(const SchemaHalf& half) const {
    return connective_impl(res_.corpus, cfg_.min_triple_count, analyze(half)).cnt;
}

long long FeatureExtractor::f_narrative_chain(const SchemaHalf& half) const {
    return narrative_chain_impl(res_.chains, analyze(half)).nch;
}

std::tuple<long long, long long, std::string, std::string, std::string, std::string,
           long long>
FeatureExtractor::f_polarity_rule(const SchemaHalf& half) const {
    const PolarityLexicon& lex = res_.polarity;
    auto r = polarity_impl(
        [&lex](const std::string& lemma, bool) { return lex.polarity_of(lemma); },
        analyze(half));
    return {r.i1, r.i2, r.p2i1, r.p2i2, r.p3i1, r.p3i2, r.total};
}

std::tuple<long long, long long, std::string, std::string, std::string, std::string,
           long long>
FeatureExtractor::f_polarity_machine(const SchemaHalf& half) const {
    auto r = polarity_impl(machine_, analyze(half));
    return {r.i1, r.i2, r.p2i1, r.p2i2, r.p3i1, r.p3i2, r.total};
}

std::pair<std::string, std::string>
FeatureExtractor::f_polarity_simple(const SchemaHalf& half) const {
    auto r = polarity_simple_impl(res_.scores, analyze(half));
    return {r.sentence_bucket, r.question_bucket};
}

// ---------------------------------------------------------------------------
// Full extraction

FeatureVector FeatureExtractor::extract_all(const SchemaHalf& half) const {
    auto a = analyze(half);
    FeatureVector v;

    auto [st, sp] = sentence_pattern_impl(analyzer_, half, a.s_pos_overrides);
    v.set("ST", std::move(st));
    v.set("SP", std::move(sp));
    v.coverage[component_index("sentence_pattern")] = true;

    auto neg = negation_impl(analyzer_, a);
    v.set("STN", neg.stn);
    v.set("QTN", neg.qtn);
    v.coverage[component_index("negation")] = neg.applicable;

    auto sem = semantic_role_impl(res_.corpus, a);
    v.set("SEM", sem.sem);
    v.coverage[component_index("semantic_role")] = sem.applicable;

    v.set("SL", static_cast<long long>(a.s_tokens.size()));
    v.coverage[component_index("length")] = true;

    auto wr = word_relations_impl(a);
    const char* wr_names[] = {"WN", "WP", "HN", "VF", "JF"};
    for (int i = 0; i < 5; ++i)
        v.set(wr_names[i], wr.values[i]);
    v.coverage[component_index("word_relations")] = wr.applicable;

    bool search_ok = true;
    SearchResult gl, glf;
    if (a.cand[0].head_index && a.cand[1].head_index) {
        try {
            QuerySet q = build_queries_impl(a, cfg_.threshold, a.cand[0].head_lower,
                                            a.cand[1].head_lower);
            gl = search_queries_impl(res_.hits, q);
            search_ok = gl.applicable;
        } catch (const EmptyInput&) {
            search_ok = false;
        }
    } else {
        search_ok = false;
    }
    if (auto sub = frame_substitution(res_.frames, a)) {
        try {
            QuerySet q = build_queries_impl(a, cfg_.threshold, sub->first, sub->second);
            glf = search_queries_impl(res_.hits, q);
            search_ok = search_ok && glf.applicable;
        } catch (const EmptyInput&) {
            search_ok = false;
        }
    }
    const char* gl_names[] = {"GL1i1", "GL1i2", "GL2i1", "GL2i2",
                              "GL3i1", "GL3i2", "GL4i1", "GL4i2"};
    const char* glf_names[] = {"GLF1i1", "GLF1i2", "GLF2i1", "GLF2i2",
                               "GLF3i1", "GLF3i2", "GLF4i1", "GLF4i2"};
    for (int i = 0; i < 8; ++i) {
        v.set(gl_names[i], gl.values[i]);
        v.set(glf_names[i], glf.values[i]);
    }
    v.coverage[component_index("search_queries")] = search_ok;

    auto rel = relatedness_impl(res_.relatedness, res_.frames, a);
    v.set("CN", rel.cn);
    v.set("CNF", rel.cnf);
    v.coverage[component_index("relatedness")] = rel.applicable;

    auto cnt = connective_impl(res_.corpus, cfg_.min_triple_count, a);
    v.set("CNT", cnt.cnt);
    v.coverage[component_index("connective")] = cnt.applicable;

    auto nch = narrative_chain_impl(res_.chains, a);
    v.set("NCH", nch.nch);
    v.coverage[component_index("narrative_chain")] = nch.applicable;

    const PolarityLexicon& plex = res_.polarity;
    auto rp = polarity_impl(
        [&plex](const std::string& lemma, bool) { return plex.polarity_of(lemma); }, a);
    v.set("RP1i1", rp.i1);
    v.set("RP1i2", rp.i2);
    v.set("RP2i1", rp.p2i1);
    v.set("RP2i2", rp.p2i2);
    v.set("RP3i1", rp.p3i1);
    v.set("RP3i2", rp.p3i2);
    v.set("RPTL", rp.total);
    v.coverage[component_index("polarity_rule")] = rp.applicable;

    auto op = polarity_impl(machine_, a);
    v.set("OP1i1", op.i1);
    v.set("OP1i2", op.i2);
    v.set("OP2i1", op.p2i1);
    v.set("OP2i2", op.p2i2);
    v.set("OP3i1", op.p3i1);
    v.set("OP3i2", op.p3i2);
    v.set("OPTL", op.total);
    v.coverage[component_index("polarity_machine")] = op.applicable;

    auto tb = polarity_simple_impl(res_.scores, a);
    v.set("TBSPOL", tb.sentence_bucket);
    v.set("TBQPOL", tb.question_bucket);
    v.coverage[component_index("polarity_simple")] = tb.applicable;

    return v;
}

// ---------------------------------------------------------------------------
// FeatureSchema

FeatureSchema FeatureSchema::build(const std::vector<FeatureVector>& training) {
    FeatureSchema schema;
    for (const auto& v : training)
        for (std::size_t i = 0; i < FeatureVector::feature_count; ++i) {
            if (!FeatureVector::categorical(i))
                continue;
            const auto& s = std::get<std::string>(v.values[i]);
            auto& dict = schema.categories_[i];
            if (std::find(dict.begin(), dict.end(), s) == dict.end())
                dict.push_back(s);
        }
    return schema;
}

std::vector<double> FeatureSchema::encode(const FeatureVector& v) const {
    std::vector<double> out(FeatureVector::feature_count, 0.0);
    for (std::size_t i = 0; i < FeatureVector::feature_count; ++i) {
        if (!FeatureVector::categorical(i)) {
            out[i] = static_cast<double>(std::get<long long>(v.values[i]));
            continue;
        }
        const auto& s = std::get<std::string>(v.values[i]);
        const auto& dict = categories_[i];
        auto it = std::find(dict.begin(), dict.end(), s);
        out[i] = it == dict.end() ? 0.0 : static_cast<double>(it - dict.begin() + 1);
    }
    return out;
}

const std::vector<std::string>& FeatureSchema::categories(std::size_t feature_index) const {
    return categories_.at(feature_index);
}

std::string FeatureSchema::to_json() const {
    ojson doc;
    doc["magic"] = "winoreg-feature-schema";
    doc["version"] = 1;
    ojson dicts;
    for (std::size_t i = 0; i < FeatureVector::feature_count; ++i)
        if (FeatureVector::categorical(i))
            dicts[kFeatureNames[i]] = categories_[i];
    doc["dictionaries"] = std::move(dicts);
    return doc.dump(2);
}

FeatureSchema FeatureSchema::from_json(const std::string& text) {
    ojson doc;
    try {
        doc = ojson::parse(text);
    } catch (const ojson::parse_error& e) {
        throw FormatError(std::string("feature schema: ") + e.what());
    }
    if (doc.value("magic", "") != "winoreg-feature-schema")
        throw FormatError("not a feature schema document");
    if (doc.value("version", -1) != 1)
        throw VersionError("unsupported feature schema version");
    FeatureSchema schema;
    for (const auto& [name, dict] : doc.at("dictionaries").items()) {
        std::size_t idx = FeatureVector::index_of(name);
        if (!FeatureVector::categorical(idx))
            throw FormatError("feature schema lists non-categorical feature " + name);
        for (const auto& cat : dict)
            schema.categories_[idx].push_back(cat.get<std::string>());
    }
    return schema;
}

// ---------------------------------------------------------------------------
// Feature CSV dump

namespace {

std::vector<std::string> feature_csv_header() {
    std::vector<std::string> header = {"id"};
    for (const auto& name : FeatureVector::feature_names())
        header.push_back(name);
    for (const auto& group : component_groups())
        header.push_back("cov_" + group.name);
    header.push_back("hardness");
    return header;
}

} // namespace

void write_feature_csv(const std::string& path, const std::vector<FeatureRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path);
    csv::write_record(out, feature_csv_header());
    for (const auto& row : rows) {
        std::vector<std::string> record = {row.id};
        for (std::size_t i = 0; i < FeatureVector::feature_count; ++i)
            record.push_back(row.features.value_string(i));
        for (bool cov : row.features.coverage)
            record.push_back(cov ? "1" : "0");
        record.push_back(row.hardness ? ojson(*row.hardness).dump() : "");
        csv::write_record(out, record);
    }
    if (!out)
        throw IoError("error while writing " + path);
}

std::vector<FeatureRow> read_feature_csv(const std::string& path) {
    auto records = csv::read_file(path);
    const auto header = feature_csv_header();
    if (records.empty() || records[0] != header)
        throw ParseError(path + ": bad or missing feature CSV header");
    std::vector<FeatureRow> rows;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.size() != header.size())
            throw ParseError(path + ": record " + std::to_string(r) + " has " +
                             std::to_string(rec.size()) + " fields, expected " +
                             std::to_string(header.size()));
        FeatureRow row;
        row.id = rec[0];
        std::size_t col = 1;
        for (std::size_t i = 0; i < FeatureVector::feature_count; ++i, ++col)
            row.features.values[i] = FeatureVector::value_from_string(i, rec[col]);
        for (std::size_t i = 0; i < FeatureVector::component_count; ++i, ++col) {
            if (rec[col] != "0" && rec[col] != "1")
                throw ParseError(path + ": record " + std::to_string(r) +
                                 ": coverage flag must be 0 or 1");
            row.features.coverage[i] = rec[col] == "1";
        }
        if (!rec[col].empty()) {
            try {
                row.hardness = std::stod(rec[col]);
            } catch (const std::exception&) {
                throw ParseError(path + ": record " + std::to_string(r) +
                                 ": bad hardness value");
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace winoreg
