#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace winoreg {

enum class PosTag {
    noun,
    verb,
    aux_verb,
    adj,
    pronoun,
    det,
    conj_sub,
    conj_coord,
    other,
};

std::string to_string(PosTag tag);
PosTag pos_tag_from_string(const std::string& name);

/// One word of a sentence. Punctuation never reaches a Token: the tokenizer
/// strips it, so indices count words only and are contiguous from 0.
struct Token {
    std::string surface; ///< original spelling
    std::string lower;   ///< lowercased surface
    std::string lemma;   ///< lowercase base form, never empty
    PosTag pos = PosTag::other;
    std::size_t index = 0;
};

/// Subject-verb-object relation extracted from one clause. Two shapes exist:
///  - full triple: verb plus at least one of subject/object, e.g.
///    [cat-noun, caught-verb, mouse-noun] or [it-pronoun, was-aux-verb,
///    clever-adj];
///  - verb-verb link: no subject, verb is an auxiliary and object is the
///    main verb it attaches to, e.g. [was-aux-verb, caught-verb].
struct SemanticTriple {
    std::optional<Token> subject;
    Token verb;
    std::optional<Token> object;
    bool negated_subject_clause = false; ///< negation marker inside the subject span
    bool negated_verb = false;           ///< negation marker attached to the verb

    bool is_aux_link() const {
        return !subject && object && verb.pos == PosTag::aux_verb &&
               (object->pos == PosTag::verb || object->pos == PosTag::aux_verb);
    }
};

/// "[cat-noun, caught-verb, mouse-noun]" — present elements in
/// subject, verb, object order, each as word-postag.
std::string to_string(const SemanticTriple& triple);

enum class SentenceType { simple, compound, complex, compound_complex };

std::string to_string(SentenceType type);

/// Sentence-level structure: the type plus the clause pattern, e.g.
/// a complex sentence with pattern "SV because SV".
struct SentenceShape {
    SentenceType type = SentenceType::simple;
    std::string pattern;
};

/// Half-open token range [begin, end) forming one clause.
/// `connective` is the index of the clause-linking word in front of this
/// clause (absent for the first clause). The connective token itself is not
/// part of any clause span.
struct ClauseSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::optional<std::size_t> connective;
};

/// Externally supplied parse for one schema half, keyed by half id. When
/// present, its triples are used verbatim (after validation against the
/// tokenized text) instead of the rule-based extractor, and its POS
/// overrides are applied during tokenization.
struct ParseAnnotation {
    std::vector<SemanticTriple> sentence_triples;
    std::vector<SemanticTriple> question_triples;
    std::unordered_map<std::size_t, PosTag> sentence_pos;
    std::unordered_map<std::size_t, PosTag> question_pos;
};

/// JSON side-file of ParseAnnotations:
///   { "<half-id>": { "sentence_triples": [...], "question_triples": [...],
///                    "sentence_pos": {"3": "verb"}, "question_pos": {} } }
/// Each triple element is {"surface": w, "pos": tag, "index": n} or null.
class AnnotationStore {
  public:
    static AnnotationStore load(const std::string& path);

    const ParseAnnotation* find(const std::string& half_id) const;
    std::size_t size() const { return by_id_.size(); }

  private:
    std::unordered_map<std::string, ParseAnnotation> by_id_;
};

enum class NegationScope { candidates_clause, pronoun_clause };

/// Rule-based linguistic layer: a bundled lexicon plus suffix heuristics
/// assign POS tags; clause and triple structure is derived from the tags.
/// All methods are pure and deterministic.
class TextAnalyzer {
  public:
    /// Splits `text` into word tokens (punctuation discarded), assigning POS
    /// and lemma. Never fails: unknown words default to nouns. Entries of
    /// `pos_overrides` (token index -> tag) win over the built-in rules.
    std::vector<Token>
    tokenize(const std::string& text,
             const std::unordered_map<std::size_t, PosTag>* pos_overrides = nullptr) const;

    /// Clause segmentation: token ranges split at clause-linking connectives
    /// (a connective splits only when verbs occur on both sides of it).
    std::vector<ClauseSpan> clause_spans(const std::vector<Token>& tokens) const;

    /// Extracts one triple per clause — subject = head of the noun/pronoun
    /// group before the clause's main verb, object = head of the first
    /// noun/adjective group after it — plus aux-verb links from auxiliary
    /// subordinate clauses to the main-clause verb. If `annotated` is given,
    /// returns those triples verbatim after validating their token indices.
    /// Throws ParseError when no clause contains a verb.
    std::vector<SemanticTriple>
    extract_triples(const std::string& text,
                    const std::vector<SemanticTriple>* annotated = nullptr,
                    const std::unordered_map<std::size_t, PosTag>* pos_overrides =
                        nullptr) const;

    /// Sentence type from the detected clause-linking connectives (only
    /// coordinators => compound, only subordinators => complex, both =>
    /// compound-complex, none => simple) and the clause pattern, e.g.
    /// "SV and SV because SV".
    SentenceShape classify_sentence(
        const std::string& text,
        const std::unordered_map<std::size_t, PosTag>* pos_overrides = nullptr) const;

    /// True if a negation marker (not, n't, never, no) attaches to the verb
    /// or subject of any given triple; nullopt when no triple covers the
    /// scope (caller encodes 0 and records the gap).
    std::optional<bool> detect_negation(const std::vector<SemanticTriple>& triples,
                                        NegationScope scope) const;

    /// Stop-word removal + lemmatization, order preserved. May be empty.
    std::vector<std::string> preprocess_sequence(const std::string& text) const;
};

/// Shared word-class lookups (bundled lexicon). All take lowercase words.
namespace lex {

bool is_stop_word(const std::string& w);
bool is_verb_to_be(const std::string& w);
bool is_aux(const std::string& w);
bool is_negation_marker(const std::string& w);
bool is_definite_pronoun(const std::string& w);
bool is_wh_word(const std::string& w);
bool is_subordinator(const std::string& w);
bool is_coordinator(const std::string& w);
/// Contrastive connectives that reverse polarity expectations
/// (although, though, but, yet, whereas).
bool is_reversing_connective(const std::string& w);
/// True for a comparative adjective form ("taller", "bigger", "nicer").
bool is_comparative_adj(const std::string& w);

std::string verb_lemma(const std::string& w);
std::string noun_lemma(const std::string& w);
std::string adj_lemma(const std::string& w);

} // namespace lex

} // namespace winoreg
