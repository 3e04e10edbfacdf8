#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "clustag/corpus.hpp"
#include "clustag/tagset.hpp"
#include "clustag/util.hpp"

namespace clustag {

using WordId = std::uint32_t;
using Count = std::uint64_t;

using Vocab = StringInterner<WordId>;

struct TagCount {
    TagId tag = kNoTag;
    Count count = 0;
};

// Word -> tag membership with occurrence counts, plus the pairwise conflict
// relation between tags (two tags conflict iff some word carries both).
class Lexicon {
public:
    static Lexicon build(const Corpus& corpus, bool lowercase);

    const Tagset& tagset() const { return *tags_; }
    const std::shared_ptr<const Tagset>& tagset_ptr() const { return tags_; }
    bool lowercase() const { return lowercase_; }
    const Vocab& vocab() const { return words_; }

    // Folds the query word per the lowercase setting.
    std::optional<WordId> word_id(std::string_view word) const;
    bool is_known(std::string_view word) const { return word_id(word).has_value(); }

    // Sorted by tag id; empty for unknown words.
    std::span<const TagCount> tags_of(WordId w) const { return entries_[w]; }
    std::vector<TagId> tag_ids_of(std::string_view word) const;

    Count count(WordId w, TagId t) const;
    Count total_count(TagId t) const { return tag_totals_[t]; }
    Count token_total() const { return token_total_; }

    bool conflict(TagId a, TagId b) const { return conflict_[a * tags_->size() + b]; }

    // Lines "word<TAB>tag<TAB>count" sorted by word then tag name.
    void dump(std::ostream& out) const;

private:
    Lexicon() = default;

    std::shared_ptr<const Tagset> tags_;
    bool lowercase_ = false;
    Vocab words_;
    std::vector<std::vector<TagCount>> entries_;  // indexed by WordId
    std::vector<Count> tag_totals_;               // indexed by TagId
    std::vector<bool> conflict_;                  // size |T|^2
    Count token_total_ = 0;
};

}  // namespace clustag
