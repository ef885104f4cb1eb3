#include "winoreg/text.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include <json.hpp>

#include "text_tables.hpp"
#include "winoreg/error.hpp"

namespace winoreg {

namespace {

using tables::WordSet;

bool ends_with(const std::string& w, const char* suffix) {
    std::string s(suffix);
    return w.size() >= s.size() && w.compare(w.size() - s.size(), s.size(), s) == 0;
}

std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '\'' || c == '-';
}

// Raw word split: punctuation dropped, clitics ("n't", "'s", ...) detached.
std::vector<std::string> split_words(const std::string& text) {
    std::vector<std::string> words;
    std::string cur;
    auto flush = [&] {
        if (cur.empty())
            return;
        while (!cur.empty() && (cur.front() == '\'' || cur.front() == '-'))
            cur.erase(cur.begin());
        while (!cur.empty() && (cur.back() == '\'' || cur.back() == '-'))
            cur.pop_back();
        if (cur.empty())
            return;
        std::string lower = to_lower(cur);
        if (ends_with(lower, "n't") && lower.size() > 3) {
            words.push_back(cur.substr(0, cur.size() - 3));
            words.push_back("n't");
        } else {
            auto apos = lower.rfind('\'');
            static const WordSet clitics = {"'s", "'re", "'ll", "'ve", "'d", "'m"};
            if (apos != std::string::npos && apos > 0 && clitics.count(lower.substr(apos))) {
                words.push_back(cur.substr(0, apos));
                words.push_back(cur.substr(apos));
            } else {
                words.push_back(cur);
            }
        }
        cur.clear();
    };
    for (char c : text) {
        if (is_word_char(c))
            cur.push_back(c);
        else
            flush();
    }
    flush();
    return words;
}

bool is_number(const std::string& w) {
    return !w.empty() && std::all_of(w.begin(), w.end(), [](unsigned char c) {
        return std::isdigit(c) || c == '-' || c == '\'';
    });
}

// Could this word be a verb form known to the lexicon?
bool verb_recognizable(const std::string& lower) {
    if (tables::irregular_verb_lemmas().count(lower))
        return true;
    if (tables::verbs().count(lower))
        return true;
    std::string lemma = lex::verb_lemma(lower);
    return lemma != lower && tables::verbs().count(lemma);
}

bool adjective_recognizable(const std::string& lower) {
    if (tables::adjectives().count(lower))
        return true;
    return lex::adj_lemma(lower) != lower;
}

// Would this word default to something nominal (used to resolve the
// determiner/pronoun ambiguity of "her", "this", "that", ...)?
bool noun_ish(const std::string& lower) {
    if (lower.empty())
        return false;
    if (lex::is_aux(lower) || tables::prepositions().count(lower) ||
        tables::coordinators().count(lower) || tables::subordinators().count(lower) ||
        tables::negations().count(lower) || tables::pronouns().count(lower) ||
        tables::adverbs().count(lower))
        return false;
    if (verb_recognizable(lower) && !tables::determiners().count(lower))
        return adjective_recognizable(lower); // noun/verb ambiguous: allow if also adj-like
    return true;
}

std::string lemma_for(const std::string& lower, PosTag pos) {
    switch (pos) {
    case PosTag::verb:
        return lex::verb_lemma(lower);
    case PosTag::aux_verb: {
        const auto& irr = tables::irregular_verb_lemmas();
        if (auto it = irr.find(lower); it != irr.end())
            return it->second;
        if (lower == "n't")
            return "not";
        return lower;
    }
    case PosTag::noun:
        return lex::noun_lemma(lower);
    case PosTag::adj:
        return lex::adj_lemma(lower);
    default:
        return lower == "n't" ? "not" : lower;
    }
}

bool verb_like(const Token& t) {
    return t.pos == PosTag::verb || t.pos == PosTag::aux_verb;
}


bool connective_tag(const Token& t) {
    return t.pos == PosTag::conj_sub || t.pos == PosTag::conj_coord;
}

using ojson = nlohmann::ordered_json;

Token token_from_json(const ojson& j) {
    Token t;
    t.surface = j.at("surface").get<std::string>();
    t.lower = to_lower(t.surface);
    t.pos = pos_tag_from_string(j.at("pos").get<std::string>());
    t.index = j.at("index").get<std::size_t>();
    t.lemma = j.contains("lemma") ? j["lemma"].get<std::string>()
                                  : lemma_for(t.lower, t.pos);
    return t;
}

SemanticTriple triple_from_json(const ojson& j) {
    SemanticTriple t;
    if (j.contains("subject") && !j["subject"].is_null())
        t.subject = token_from_json(j["subject"]);
    t.verb = token_from_json(j.at("verb"));
    if (j.contains("object") && !j["object"].is_null())
        t.object = token_from_json(j["object"]);
    t.negated_subject_clause = j.value("negated_subject_clause", false);
    t.negated_verb = j.value("negated_verb", false);
    return t;
}

} // namespace

std::string to_string(PosTag tag) {
    switch (tag) {
    case PosTag::noun: return "noun";
    case PosTag::verb: return "verb";
    case PosTag::aux_verb: return "aux-verb";
    case PosTag::adj: return "adj";
    case PosTag::pronoun: return "pronoun";
    case PosTag::det: return "det";
    case PosTag::conj_sub: return "conj-sub";
    case PosTag::conj_coord: return "conj-coord";
    case PosTag::other: return "other";
    }
    return "other";
}

PosTag pos_tag_from_string(const std::string& name) {
    if (name == "noun") return PosTag::noun;
    if (name == "verb") return PosTag::verb;
    if (name == "aux-verb") return PosTag::aux_verb;
    if (name == "adj") return PosTag::adj;
    if (name == "pronoun") return PosTag::pronoun;
    if (name == "det") return PosTag::det;
    if (name == "conj-sub") return PosTag::conj_sub;
    if (name == "conj-coord") return PosTag::conj_coord;
    if (name == "other") return PosTag::other;
    throw ParseError("unknown pos tag '" + name + "'");
}

std::string to_string(const SemanticTriple& triple) {
    std::string out = "[";
    auto append = [&](const Token& t) {
        if (out.size() > 1)
            out += ", ";
        out += t.lower + "-" + to_string(t.pos);
    };
    if (triple.subject)
        append(*triple.subject);
    append(triple.verb);
    if (triple.object)
        append(*triple.object);
    out += "]";
    return out;
}

std::string to_string(SentenceType type) {
    switch (type) {
    case SentenceType::simple: return "simple";
    case SentenceType::compound: return "compound";
    case SentenceType::complex: return "complex";
    case SentenceType::compound_complex: return "compound-complex";
    }
    return "simple";
}

std::vector<Token>
TextAnalyzer::tokenize(const std::string& text,
                       const std::unordered_map<std::size_t, PosTag>* pos_overrides) const {
    if (text.empty())
        throw EmptyInput("tokenize: empty text");
    auto words = split_words(text);
    std::vector<Token> tokens;
    tokens.reserve(words.size());

    bool in_det_phrase = false; // inside "det (adj|noun)*"
    for (std::size_t i = 0; i < words.size(); ++i) {
        Token t;
        t.surface = words[i];
        t.lower = to_lower(words[i]);
        t.index = i;
        const std::string& w = t.lower;
        const std::string next = i + 1 < words.size() ? to_lower(words[i + 1]) : "";
        bool capitalized =
            i > 0 && std::isupper(static_cast<unsigned char>(t.surface[0]));

        if (w == "not" || w == "n't" || w == "never") {
            t.pos = PosTag::other;
        } else if (tables::be_forms().count(w) || tables::modals().count(w) ||
                   tables::have_do_forms().count(w)) {
            t.pos = PosTag::aux_verb; // have/do revisited below
        } else if (tables::coordinators().count(w)) {
            t.pos = PosTag::conj_coord;
        } else if (tables::subordinators().count(w)) {
            t.pos = PosTag::conj_sub;
        } else if (tables::wh_words().count(w)) {
            t.pos = PosTag::pronoun;
        } else if (tables::determiners().count(w)) {
            // Words that are both determiner and pronoun ("her", "that",
            // "this", ...) act as determiner only in front of something nominal.
            t.pos = !tables::pronouns().count(w) || noun_ish(next) ? PosTag::det
                                                                   : PosTag::pronoun;
        } else if (tables::pronouns().count(w)) {
            t.pos = PosTag::pronoun;
        } else if (tables::prepositions().count(w) || tables::adverbs().count(w) ||
                   ends_with(w, "ly") || is_number(w) || w == "'s" || w == "'re" ||
                   w == "'ll" || w == "'ve" || w == "'d" || w == "'m") {
            t.pos = PosTag::other;
        } else if (adjective_recognizable(w)) {
            t.pos = PosTag::adj;
        } else if (verb_recognizable(w)) {
            t.pos = in_det_phrase ? PosTag::noun : PosTag::verb;
        } else if (capitalized) {
            t.pos = PosTag::noun;
        } else if (ends_with(w, "ing") || ends_with(w, "ed")) {
            t.pos = in_det_phrase ? PosTag::adj : PosTag::verb;
        } else if (ends_with(w, "ous") || ends_with(w, "ful") || ends_with(w, "less") ||
                   ends_with(w, "ive") || ends_with(w, "able") || ends_with(w, "ible") ||
                   (ends_with(w, "ish") && w.size() >= 6)) {
            // length guard: "foolish"/"selfish" but not "fish"/"dish"
            t.pos = PosTag::adj;
        } else {
            t.pos = PosTag::noun;
        }

        if (t.pos == PosTag::det)
            in_det_phrase = true;
        else if (t.pos != PosTag::adj && t.pos != PosTag::noun)
            in_det_phrase = false;
        else if (t.pos == PosTag::noun)
            in_det_phrase = false; // phrase head reached
        tokens.push_back(std::move(t));
    }

    // "have"/"do" forms are auxiliaries only when a verb follows in the same
    // clause ("did not catch" vs "they had a permit").
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i].pos != PosTag::aux_verb ||
            !tables::have_do_forms().count(tokens[i].lower))
            continue;
        bool keeps_aux = false;
        for (std::size_t j = i + 1; j < tokens.size() && !connective_tag(tokens[j]); ++j) {
            if (tokens[j].pos == PosTag::verb ||
                (tokens[j].pos == PosTag::aux_verb &&
                 tables::be_forms().count(tokens[j].lower))) {
                keeps_aux = true;
                break;
            }
        }
        if (!keeps_aux)
            tokens[i].pos = PosTag::verb;
    }

    if (pos_overrides)
        for (const auto& [idx, pos] : *pos_overrides)
            if (idx < tokens.size())
                tokens[idx].pos = pos;

    for (auto& t : tokens)
        t.lemma = lemma_for(t.lower, t.pos);
    return tokens;
}

std::vector<ClauseSpan> TextAnalyzer::clause_spans(const std::vector<Token>& tokens) const {
    std::vector<ClauseSpan> spans;
    if (tokens.empty())
        return spans;

    auto has_verb = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
            if (verb_like(tokens[i]))
                return true;
        return false;
    };

    ClauseSpan cur;
    cur.begin = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (!connective_tag(tokens[i]))
            continue;
        // A connective splits only with verbs on both sides of it. The right
        // side extends to the next connective candidate or the sentence end.
        std::size_t right_end = tokens.size();
        for (std::size_t j = i + 1; j < tokens.size(); ++j)
            if (connective_tag(tokens[j])) {
                right_end = j;
                break;
            }
        if (has_verb(cur.begin, i) && has_verb(i + 1, right_end)) {
            cur.end = i;
            spans.push_back(cur);
            cur = ClauseSpan{};
            cur.begin = i + 1;
            cur.connective = i;
        }
    }
    cur.end = tokens.size();
    spans.push_back(cur);
    return spans;
}

namespace {

// Head of the first noun/pronoun group in [begin, end): a pronoun is its own
// group; a run of nouns is one group headed by its last word
// ("The city councilmen" -> councilmen).
std::optional<std::size_t> first_nominal_head(const std::vector<Token>& tokens,
                                              std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
        if (tokens[i].pos == PosTag::pronoun)
            return i;
        if (tokens[i].pos == PosTag::noun) {
            std::size_t head = i;
            while (head + 1 < end && tokens[head + 1].pos == PosTag::noun)
                ++head;
            return head;
        }
    }
    return std::nullopt;
}

std::optional<SemanticTriple> clause_triple(const std::vector<Token>& tokens,
                                            const ClauseSpan& span) {
    // Main verb: first real verb, else first auxiliary (copular clause).
    std::optional<std::size_t> verb_idx;
    for (std::size_t i = span.begin; i < span.end; ++i)
        if (tokens[i].pos == PosTag::verb) {
            verb_idx = i;
            break;
        }
    if (!verb_idx)
        for (std::size_t i = span.begin; i < span.end; ++i)
            if (tokens[i].pos == PosTag::aux_verb) {
                verb_idx = i;
                break;
            }
    if (!verb_idx)
        return std::nullopt;

    SemanticTriple triple;
    triple.verb = tokens[*verb_idx];

    // Question inversion: "Whom did the cat catch?" — wh word is the fronted
    // object and the noun group between auxiliary and verb is the subject.
    bool inverted = false;
    if (span.begin < *verb_idx && lex::is_wh_word(tokens[span.begin].lower) &&
        span.begin + 1 < *verb_idx && tokens[span.begin + 1].pos == PosTag::aux_verb) {
        auto subj = first_nominal_head(tokens, span.begin + 2, *verb_idx);
        if (subj) {
            triple.subject = tokens[*subj];
            triple.object = tokens[span.begin];
            inverted = true;
        }
    }

    if (!inverted) {
        if (auto subj = first_nominal_head(tokens, span.begin, *verb_idx))
            triple.subject = tokens[*subj];
        if (auto obj = first_nominal_head(tokens, *verb_idx + 1, span.end)) {
            triple.object = tokens[*obj];
        } else {
            for (std::size_t i = *verb_idx + 1; i < span.end; ++i)
                if (tokens[i].pos == PosTag::adj) {
                    triple.object = tokens[i];
                    break;
                }
        }
    }

    std::size_t subject_idx = triple.subject ? triple.subject->index : span.begin;
    for (std::size_t i = span.begin; i < span.end; ++i) {
        if (!lex::is_negation_marker(tokens[i].lower))
            continue;
        if (triple.subject && i < subject_idx)
            triple.negated_subject_clause = true;
        else
            triple.negated_verb = true;
    }

    if (!triple.subject && !triple.object)
        return std::nullopt;
    return triple;
}

} // namespace

std::vector<SemanticTriple> TextAnalyzer::extract_triples(
    const std::string& text, const std::vector<SemanticTriple>* annotated,
    const std::unordered_map<std::size_t, PosTag>* pos_overrides) const {
    auto tokens = tokenize(text, pos_overrides);

    if (annotated) {
        for (const auto& triple : *annotated) {
            auto check = [&](const Token& t) {
                if (t.index >= tokens.size() || tokens[t.index].lower != t.lower)
                    throw ValidationError("annotated triple token '" + t.surface +
                                          "'@" + std::to_string(t.index) +
                                          " does not match text \"" + text + "\"");
            };
            if (triple.subject)
                check(*triple.subject);
            check(triple.verb);
            if (triple.object)
                check(*triple.object);
        }
        return *annotated;
    }

    auto spans = clause_spans(tokens);
    bool any_verb = false;
    std::vector<SemanticTriple> triples;
    std::vector<std::size_t> triple_clause; // clause index per triple
    for (std::size_t c = 0; c < spans.size(); ++c) {
        for (std::size_t i = spans[c].begin; i < spans[c].end; ++i)
            any_verb = any_verb || verb_like(tokens[i]);
        if (auto triple = clause_triple(tokens, spans[c])) {
            triples.push_back(std::move(*triple));
            triple_clause.push_back(c);
        }
    }
    if (!any_verb)
        throw ParseError("no verb found in \"" + text + "\"");

    // Auxiliary subordinate clauses link back to the main-clause verb:
    // "... caught ... because it was clever" -> [was-aux-verb, caught-verb].
    if (!triples.empty() && triple_clause.front() == 0 &&
        triples.front().verb.pos == PosTag::verb) {
        const Token& main_verb = triples.front().verb;
        std::vector<SemanticTriple> links;
        for (std::size_t k = 1; k < triples.size(); ++k) {
            if (triples[k].verb.pos != PosTag::aux_verb)
                continue;
            SemanticTriple link;
            link.verb = triples[k].verb;
            link.object = main_verb;
            links.push_back(std::move(link));
        }
        triples.insert(triples.end(), links.begin(), links.end());
    }
    return triples;
}

SentenceShape TextAnalyzer::classify_sentence(
    const std::string& text,
    const std::unordered_map<std::size_t, PosTag>* pos_overrides) const {
    auto tokens = tokenize(text, pos_overrides);
    auto spans = clause_spans(tokens);

    bool any_sub = false, any_coord = false;
    SentenceShape shape;
    for (const auto& span : spans) {
        if (span.connective) {
            const Token& conn = tokens[*span.connective];
            any_sub = any_sub || conn.pos == PosTag::conj_sub;
            any_coord = any_coord || conn.pos == PosTag::conj_coord;
            shape.pattern += " " + conn.lower + " ";
        }
        bool has_verb = false;
        std::optional<std::size_t> first_verb;
        for (std::size_t i = span.begin; i < span.end; ++i)
            if (verb_like(tokens[i])) {
                has_verb = true;
                first_verb = i;
                break;
            }
        bool has_subject =
            first_nominal_head(tokens, span.begin, first_verb ? *first_verb : span.end)
                .has_value();
        if (has_subject)
            shape.pattern += "S";
        if (has_verb)
            shape.pattern += "V";
    }

    shape.type = any_sub && any_coord ? SentenceType::compound_complex
                 : any_sub            ? SentenceType::complex
                 : any_coord          ? SentenceType::compound
                                      : SentenceType::simple;
    return shape;
}

std::optional<bool> TextAnalyzer::detect_negation(const std::vector<SemanticTriple>& triples,
                                                  NegationScope) const {
    if (triples.empty())
        return std::nullopt;
    for (const auto& t : triples)
        if (t.negated_verb || t.negated_subject_clause)
            return true;
    return false;
}

std::vector<std::string> TextAnalyzer::preprocess_sequence(const std::string& text) const {
    std::vector<std::string> lemmas;
    for (const auto& t : tokenize(text))
        if (!lex::is_stop_word(t.lower))
            lemmas.push_back(t.lemma);
    return lemmas;
}

AnnotationStore AnnotationStore::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path);
    ojson doc;
    try {
        doc = ojson::parse(in);
    } catch (const ojson::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
    if (!doc.is_object())
        throw ParseError(path + ": top-level value must be an object");

    AnnotationStore store;
    try {
        for (const auto& [id, entry] : doc.items()) {
            ParseAnnotation ann;
            if (entry.contains("sentence_triples"))
                for (const auto& j : entry["sentence_triples"])
                    ann.sentence_triples.push_back(triple_from_json(j));
            if (entry.contains("question_triples"))
                for (const auto& j : entry["question_triples"])
                    ann.question_triples.push_back(triple_from_json(j));
            auto read_pos = [&](const char* key,
                                std::unordered_map<std::size_t, PosTag>& out) {
                if (!entry.contains(key))
                    return;
                for (const auto& [idx, tag] : entry[key].items())
                    out[static_cast<std::size_t>(std::stoul(idx))] =
                        pos_tag_from_string(tag.get<std::string>());
            };
            read_pos("sentence_pos", ann.sentence_pos);
            read_pos("question_pos", ann.question_pos);
            store.by_id_[id] = std::move(ann);
        }
    } catch (const ojson::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return store;
}

const ParseAnnotation* AnnotationStore::find(const std::string& half_id) const {
    auto it = by_id_.find(half_id);
    return it == by_id_.end() ? nullptr : &it->second;
}

} // namespace winoreg
