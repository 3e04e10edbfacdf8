#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "clustag/corpus.hpp"
#include "clustag/lexicon.hpp"
#include "clustag/model.hpp"
#include "clustag/tagset.hpp"

namespace clustag {

// One tag per token. ids are original tag ids after restoration (or plain
// decoding); guessed marks unknown-word fallback positions; fallback is set
// when every complete path had probability zero and the per-token
// most-frequent-candidate rule was used instead.
struct TagSequence {
    std::vector<TagId> ids;
    std::vector<bool> guessed;
    bool fallback = false;
    double log_prob = 0.0;
};

struct DecodeOptions {
    std::size_t beam = 0;  // 0 = exact
};

// Second-order Viterbi over the model's own tagset. Known words are
// restricted to their lexicon tags; unknown words range over all labels with
// uniform emission 1/|tagset|. Ties resolve to the lexicographically
// smallest label-name sequence. The returned ids are tag ids (the model must
// be over the original tagset).
TagSequence viterbi_tag(std::span<const std::string> words, const TrigramModel& model,
                        const Lexicon& lexicon, const DecodeOptions& opts = {});

// Decodes with cluster labels (candidates are the clusters of the word's
// lexicon tags) and restores original tags per token. Unknown words restore
// to the most frequent original tag of the assigned cluster and are marked
// guessed.
TagSequence tag_and_restore(std::span<const std::string> words, const TrigramModel& model,
                            const ClusterTagset& clustering, const Lexicon& lexicon,
                            const DecodeOptions& opts = {});

// Batch helpers; sentences are decoded independently (in parallel when
// threads > 1) and returned in input order.
std::vector<TagSequence> tag_sentences(std::span<const std::vector<std::string>> sentences,
                                       const TrigramModel& model,
                                       const ClusterTagset& clustering, const Lexicon& lexicon,
                                       int threads = 1, const DecodeOptions& opts = {});
std::vector<TagSequence> tag_corpus(const Corpus& corpus, const TrigramModel& model,
                                    const ClusterTagset& clustering, const Lexicon& lexicon,
                                    int threads = 1, const DecodeOptions& opts = {});

}  // namespace clustag
