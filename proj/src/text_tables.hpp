#pragma once

// Internal accessors for the bundled word-class tables (see text_tables.cpp).
// Not part of the public interface.

#include <string>
#include <unordered_map>
#include <unordered_set>

namespace winoreg::tables {

using WordSet = std::unordered_set<std::string>;
using WordMap = std::unordered_map<std::string, std::string>;

const WordSet& verbs();        // base-form verb lemmas
const WordSet& adjectives();   // base-form adjectives
const WordSet& adverbs();
const WordSet& pronouns();
const WordSet& determiners();
const WordSet& be_forms();
const WordSet& have_do_forms(); // aux only when a later verb exists
const WordSet& modals();
const WordSet& prepositions();
const WordSet& subordinators();
const WordSet& coordinators();
const WordSet& negations();
const WordSet& wh_words();
const WordSet& stop_words();
const WordMap& irregular_verb_lemmas(); // inflected -> base
const WordMap& irregular_noun_lemmas(); // plural -> singular

} // namespace winoreg::tables
