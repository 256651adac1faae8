#pragma once

#include <cstdint>
#include <vector>

#include "dsner/data.hpp"

namespace dsner {

/// Deterministic toy corpus: pattern-grammar sentences with planted PER, LOC
/// and ORG entities, labeled in BIO. The surface vocabularies of the three
/// entity roles are disjoint, so the corpus is cleanly learnable at desk
/// scale; digits appear so the normalization path gets exercised.
std::vector<RawSentence> synthetic_corpus(std::size_t sentences, std::uint64_t seed);

}  // namespace dsner
