#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "clustag/corpus.hpp"
#include "clustag/lexicon.hpp"
#include "clustag/tagset.hpp"

namespace clustag {

// A label is a position in the model's tagset: a tag id when training over
// the original tagset, a cluster index when training over a reduced one. The
// two boundary pseudo-labels live just past the real ones.
using Label = std::uint32_t;

// Tag n-gram and emission counts. Extraction pads each sentence with two
// BOS for trigrams and bigrams and one EOS at the end; unigrams cover the
// real tokens plus one EOS per sentence. Context totals track, for every
// history, the number of continuation events (successors other than BOS), so
// each relative-frequency estimate is a proper distribution over
// tagset ∪ {EOS}.
struct NgramCounts {
    std::vector<std::string> label_names;  // real labels only
    bool lowercase = false;
    Vocab words;  // emission forms, folded when lowercase is set

    std::vector<Count> unigram;     // size labels+2; BOS slot stays 0
    std::vector<Count> bigram_ctx;  // continuation totals per history label
    std::unordered_map<std::uint64_t, Count> bigram;
    std::unordered_map<std::uint64_t, Count> trigram;
    std::unordered_map<std::uint64_t, Count> trigram_ctx;
    std::unordered_map<std::uint64_t, Count> emission;

    Count unigram_total = 0;  // token_total + sentence_total
    Count token_total = 0;
    Count sentence_total = 0;

    Label num_labels() const { return static_cast<Label>(label_names.size()); }
    Label bos() const { return num_labels(); }
    Label eos() const { return num_labels() + 1; }

    static std::uint64_t key2(Label a, Label b) {
        return (static_cast<std::uint64_t>(a) << 21) | b;
    }
    static std::uint64_t key3(Label a, Label b, Label c) {
        return (key2(a, b) << 21) | c;
    }
    static std::uint64_t emit_key(Label t, WordId w) {
        return (static_cast<std::uint64_t>(t) << 32) | w;
    }

    Count get(const std::unordered_map<std::uint64_t, Count>& m, std::uint64_t key) const {
        auto it = m.find(key);
        return it == m.end() ? 0 : it->second;
    }

    bool operator==(const NgramCounts& other) const;
};

// Counts over the original tagset (mapping == nullptr) or over a reduced
// tagset (every tag replaced by its cluster before counting).
NgramCounts count_ngrams(const Corpus& corpus, const ClusterTagset* mapping, bool lowercase);

// Image of the counts under the tag -> cluster map, without touching the
// corpus. base must be over the original tagset of the mapping.
NgramCounts project_counts(const NgramCounts& base, const ClusterTagset& mapping);

// Pointwise sum of two count structures over the same label space, so corpus
// parts can be counted independently and added. Word interning follows the
// left operand.
NgramCounts combine_counts(const NgramCounts& a, const NgramCounts& b);

struct Lambdas {
    double l1 = 0.0;  // unigram weight
    double l2 = 0.0;  // bigram weight
    double l3 = 0.0;  // trigram weight
};

// Deleted-interpolation weights: each trigram occurrence credits the order
// whose discounted relative frequency is largest, ties toward the lower
// order; credits are normalized to sum to exactly 1.
Lambdas estimate_lambdas(const NgramCounts& counts);

// Smoothed contextual p(t3|t1,t2) and unsmoothed lexical p(w|t).
class TrigramModel {
public:
    static TrigramModel build(NgramCounts counts);
    static TrigramModel with_lambdas(NgramCounts counts, Lambdas lambdas);

    const NgramCounts& counts() const { return counts_; }
    Lambdas lambdas() const { return lambdas_; }
    bool lowercase() const { return counts_.lowercase; }

    Label num_labels() const { return counts_.num_labels(); }
    Label bos() const { return counts_.bos(); }
    Label eos() const { return counts_.eos(); }
    const std::string& label_name(Label l) const { return counts_.label_names[l]; }
    std::optional<Label> find_label(std::string_view name) const;

    // λ1·p̂(t3) + λ2·p̂(t3|t2) + λ3·p̂(t3|t1,t2); each term is 0 when its
    // denominator is 0.
    double contextual_prob(Label t1, Label t2, Label t3) const;
    double log_contextual(Label t1, Label t2, Label t3) const;

    // count(t, word) / unigram(t); 0 for never-emitted words.
    double lexical_prob(Label t, WordId w) const;
    double lexical_prob(Label t, std::string_view word) const;
    double log_lexical(Label t, WordId w) const;

    std::optional<WordId> emit_word_id(std::string_view word) const;

    // Sorted text lines: TRI<TAB>t1 t2 t3<TAB>count, EMIT<TAB>t word<TAB>count,
    // LAMBDA<TAB>l1 l2 l3. Lossless: lower-order counts are re-derived as
    // trigram marginals on load.
    void dump(std::ostream& out) const;
    static TrigramModel load(std::istream& in, bool lowercase);

private:
    TrigramModel(NgramCounts counts, Lambdas lambdas)
        : counts_(std::move(counts)), lambdas_(lambdas) {}

    NgramCounts counts_;
    Lambdas lambdas_;
};

}  // namespace clustag
