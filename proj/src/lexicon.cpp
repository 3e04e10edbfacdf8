#include "clustag/lexicon.hpp"

#include <algorithm>
#include <ostream>

#include "clustag/errors.hpp"

namespace clustag {

Lexicon Lexicon::build(const Corpus& corpus, bool lowercase) {
    Lexicon lex;
    lex.tags_ = corpus.tagset;
    lex.lowercase_ = lowercase;
    lex.tag_totals_.assign(lex.tags_->size(), 0);

    for (const Sentence& s : corpus.sentences) {
        for (const TaggedToken& tok : s.tokens) {
            WordId w = lowercase ? lex.words_.intern(fold_ascii(tok.word))
                                 : lex.words_.intern(tok.word);
            if (w == lex.entries_.size()) lex.entries_.emplace_back();
            auto& tags = lex.entries_[w];
            auto it = std::find_if(tags.begin(), tags.end(),
                                   [&](const TagCount& tc) { return tc.tag == tok.tag; });
            if (it == tags.end()) {
                tags.push_back(TagCount{tok.tag, 1});
            } else {
                ++it->count;
            }
            ++lex.tag_totals_[tok.tag];
            ++lex.token_total_;
        }
    }
    for (auto& tags : lex.entries_) {
        std::sort(tags.begin(), tags.end(),
                  [](const TagCount& a, const TagCount& b) { return a.tag < b.tag; });
    }

    const std::size_t t = lex.tags_->size();
    lex.conflict_.assign(t * t, false);
    for (const auto& tags : lex.entries_) {
        for (std::size_t i = 0; i < tags.size(); ++i) {
            for (std::size_t j = i + 1; j < tags.size(); ++j) {
                lex.conflict_[tags[i].tag * t + tags[j].tag] = true;
                lex.conflict_[tags[j].tag * t + tags[i].tag] = true;
            }
        }
    }
    return lex;
}

std::optional<WordId> Lexicon::word_id(std::string_view word) const {
    if (lowercase_) return words_.find(fold_ascii(word));
    return words_.find(word);
}

std::vector<TagId> Lexicon::tag_ids_of(std::string_view word) const {
    auto w = word_id(word);
    if (!w) return {};
    std::vector<TagId> out;
    out.reserve(entries_[*w].size());
    for (const TagCount& tc : entries_[*w]) out.push_back(tc.tag);
    return out;
}

Count Lexicon::count(WordId w, TagId t) const {
    for (const TagCount& tc : entries_[w]) {
        if (tc.tag == t) return tc.count;
    }
    return 0;
}

void Lexicon::dump(std::ostream& out) const {
    std::vector<WordId> order(words_.size());
    for (WordId w = 0; w < words_.size(); ++w) order[w] = w;
    std::sort(order.begin(), order.end(),
              [&](WordId a, WordId b) { return words_.name(a) < words_.name(b); });
    for (WordId w : order) {
        std::vector<TagCount> tags(entries_[w].begin(), entries_[w].end());
        std::sort(tags.begin(), tags.end(), [&](const TagCount& a, const TagCount& b) {
            return tags_->name(a.tag) < tags_->name(b.tag);
        });
        for (const TagCount& tc : tags) {
            out << words_.name(w) << '\t' << tags_->name(tc.tag) << '\t' << tc.count << '\n';
        }
    }
}

}  // namespace clustag
