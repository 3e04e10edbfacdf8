#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "clustag/corpus.hpp"

namespace clustag {

// Parameters for the planted-redundancy corpus: pairs of tags with identical
// contextual behaviour and disjoint vocabularies, embedded in an otherwise
// ambiguous corpus. Such a pair is always admissible and is the merge a
// correct clustering run should find.
struct SyntheticSpec {
    std::size_t num_tags = 20;
    std::size_t planted_pairs = 3;
    std::size_t vocab_size = 2000;
    std::size_t num_sentences = 5000;
    std::size_t min_sentence_len = 5;
    std::size_t max_sentence_len = 12;
    double ambiguous_fraction = 0.25;  // words that also carry a second tag
    std::uint64_t seed = 1;
};

Corpus gen_synthetic(const SyntheticSpec& spec);

// The tag-name pairs planted by gen_synthetic for the same spec.
std::vector<std::pair<std::string, std::string>> planted_pair_names(const SyntheticSpec& spec);

}  // namespace clustag
