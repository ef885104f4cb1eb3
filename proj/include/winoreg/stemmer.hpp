#pragma once

#include <string>

namespace winoreg {

/// Porter suffix-stripping stemmer. Input is expected to be a lowercase
/// ASCII word; anything shorter than three letters is returned unchanged.
/// Used to conflate inflected forms when counting discourse-connective
/// triples and when matching events against narrative chains.
std::string porter_stem(const std::string& word);

} // namespace winoreg
