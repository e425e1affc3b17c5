#pragma once

#include <string_view>

namespace quantone::embedded {

/// Text of data/canonical-100.tsv.
std::string_view canonical_corpus();
/// Text of data/lexicon-default.txt.
std::string_view default_lexicon();

}  // namespace quantone::embedded
