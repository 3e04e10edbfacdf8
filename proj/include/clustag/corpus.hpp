#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "clustag/tagset.hpp"

namespace clustag {

struct TaggedToken {
    std::string word;
    TagId tag = kNoTag;
};

struct Sentence {
    std::vector<TaggedToken> tokens;
};

struct Corpus {
    std::vector<Sentence> sentences;
    std::shared_ptr<const Tagset> tagset;

    std::size_t token_count() const;
};

struct CorpusSplit {
    Corpus training;
    Corpus clustering;
    Corpus testing;
};

// One token per line as "word<TAB>tag", blank line ends a sentence, '#' lines
// are comments. Tags may not contain spaces and the boundary names <s>/</s>
// are reserved.
Corpus parse_corpus(std::istream& in);
Corpus parse_corpus_file(const std::string& path);

void serialize_corpus(const Corpus& corpus, std::ostream& out);

struct SplitFractions {
    double training = 0.0;
    double clustering = 0.0;
    double testing = 0.0;
};

// Half-open sentence-index ranges, one per part.
struct SplitRanges {
    struct Range {
        std::size_t begin = 0;
        std::size_t end = 0;
    };
    Range training, clustering, testing;
};

enum class SplitMode { contiguous, shuffled };

struct SplitSpec {
    std::variant<SplitFractions, SplitRanges> parts = SplitFractions{};
    SplitMode mode = SplitMode::contiguous;
};

// Deterministic, sentence-granular split. Fractions are taken as
// floor(fraction * sentence_count) sentences per part; leftovers are
// discarded. In shuffled mode the sentence order is permuted with the seeded
// generator before the parts are cut.
CorpusSplit split_corpus(const Corpus& corpus, const SplitSpec& spec, std::uint64_t seed);

// Concatenation of two parts drawn from the same tagset.
Corpus concat(const Corpus& a, const Corpus& b);

// The corpus re-expressed over a target tagset, matching tags by name.
// Throws if a tag is missing from the target.
Corpus retag(const Corpus& corpus, std::shared_ptr<const Tagset> target);

// Union of the two corpora's tag inventories, left names first.
std::shared_ptr<const Tagset> union_tagset(const Corpus& a, const Corpus& b);

// Lenient reader for text to be tagged: one token per line, blank line ends a
// sentence; anything after a TAB (an existing annotation) is ignored.
std::vector<std::vector<std::string>> read_plain_sentences(std::istream& in);

}  // namespace clustag
