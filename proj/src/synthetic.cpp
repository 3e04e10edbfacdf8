#include "clustag/synthetic.hpp"

#include <algorithm>
#include <cstdio>

#include "clustag/errors.hpp"
#include "clustag/util.hpp"

namespace clustag {

namespace {

std::string tag_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "T%02zu", i);
    return buf;
}

std::string word_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "w%04zu", i);
    return buf;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> planted_pair_names(const SyntheticSpec& spec) {
    std::vector<std::pair<std::string, std::string>> pairs;
    for (std::size_t p = 0; p < spec.planted_pairs; ++p) {
        pairs.emplace_back(tag_name(2 * p), tag_name(2 * p + 1));
    }
    return pairs;
}

Corpus gen_synthetic(const SyntheticSpec& spec) {
    if (spec.num_tags < 2) throw ConfigError("need at least two tags");
    if (2 * spec.planted_pairs > spec.num_tags)
        throw ConfigError("too many planted pairs for the tagset size");
    if (spec.vocab_size < spec.num_tags)
        throw ConfigError("vocabulary must cover every tag");
    if (spec.min_sentence_len == 0 || spec.min_sentence_len > spec.max_sentence_len)
        throw ConfigError("bad sentence length bounds");
    if (spec.num_sentences == 0) throw ConfigError("need at least one sentence");

    Rng rng(spec.seed);
    const std::size_t num_tags = spec.num_tags;
    const std::size_t pairs = spec.planted_pairs;
    const std::size_t supers = num_tags - pairs;

    // Members of a planted pair behave identically in context: the
    // generating process walks over "supers" (pair = one super) and flips a
    // coin only at emission time. Pair supers are kept rare and reachable
    // from many contexts, so the per-member trigram counts stay sparse and
    // pooling them is what a correct clustering run gains from.

    // Word pools: primary tag round-robin; a slice of words also carries a
    // second tag, never the pair-mate of the first. Ambiguous words lean
    // toward pair members and are emitted more often than plain ones, which
    // is where tagging decisions actually happen.
    std::vector<std::vector<std::size_t>> words_of_tag(num_tags);
    for (std::size_t v = 0; v < spec.vocab_size; ++v) {
        std::size_t primary = v % num_tags;
        words_of_tag[primary].push_back(v);
        if (rng.unit() < spec.ambiguous_fraction && num_tags > 2) {
            std::size_t second = rng.below(num_tags);
            if (2 * pairs < num_tags && rng.unit() < 0.6) {
                // Cross a pair member with an outside tag.
                if (primary < 2 * pairs) {
                    second = 2 * pairs + rng.below(num_tags - 2 * pairs);
                } else if (pairs > 0) {
                    second = rng.below(2 * pairs);
                }
            }
            bool mates = primary < 2 * pairs && second < 2 * pairs && primary / 2 == second / 2;
            if (second != primary && !mates) {
                for (int boost = 0; boost < 3; ++boost) {
                    words_of_tag[primary].push_back(v);
                    words_of_tag[second].push_back(v);
                }
            }
        }
    }

    // Random walk over supers with dense-ish rows. Pair supers carry reduced
    // weight wherever they appear.
    auto super_weight = [&](std::size_t s, double raw) { return s < pairs ? 0.35 * raw : raw; };
    std::vector<std::vector<std::pair<std::size_t, double>>> rows(supers);
    for (std::size_t s = 0; s < supers; ++s) {
        std::vector<std::size_t> nexts{(s + 1) % supers};
        std::size_t extra = std::min<std::size_t>(7, supers > 1 ? supers - 1 : 0);
        for (std::size_t k = 0; k < extra; ++k) {
            std::size_t cand = rng.below(supers);
            if (std::find(nexts.begin(), nexts.end(), cand) == nexts.end()) nexts.push_back(cand);
        }
        // Every row can reach every pair super, so pair contexts are diverse.
        for (std::size_t p = 0; p < pairs; ++p) {
            if (std::find(nexts.begin(), nexts.end(), p) == nexts.end()) nexts.push_back(p);
        }
        double total = 0.0;
        for (std::size_t next : nexts) {
            double w = super_weight(next, 0.2 + rng.unit());
            rows[s].emplace_back(next, w);
            total += w;
        }
        for (auto& [next, w] : rows[s]) w /= total;
    }
    std::vector<double> initial(supers);
    {
        double total = 0.0;
        for (std::size_t s = 0; s < supers; ++s) {
            initial[s] = super_weight(s, 0.2 + rng.unit());
            total += initial[s];
        }
        for (double& w : initial) w /= total;
    }

    auto sample_row = [&](const std::vector<std::pair<std::size_t, double>>& row) {
        double u = rng.unit();
        double acc = 0.0;
        for (const auto& [next, w] : row) {
            acc += w;
            if (u < acc) return next;
        }
        return row.back().first;
    };
    auto sample_initial = [&] {
        double u = rng.unit();
        double acc = 0.0;
        for (std::size_t s = 0; s < supers; ++s) {
            acc += initial[s];
            if (u < acc) return s;
        }
        return supers - 1;
    };

    auto tags = std::make_shared<Tagset>();
    std::vector<TagId> tag_ids(num_tags);
    for (std::size_t t = 0; t < num_tags; ++t) tag_ids[t] = tags->intern(tag_name(t));

    Corpus corpus;
    corpus.tagset = tags;
    corpus.sentences.reserve(spec.num_sentences);
    for (std::size_t s = 0; s < spec.num_sentences; ++s) {
        std::size_t len =
            spec.min_sentence_len + rng.below(spec.max_sentence_len - spec.min_sentence_len + 1);
        Sentence sentence;
        sentence.tokens.reserve(len);
        std::size_t super = sample_initial();
        for (std::size_t i = 0; i < len; ++i) {
            std::size_t tag = super < pairs ? 2 * super + rng.below(2) : 2 * pairs + (super - pairs);
            const auto& pool = words_of_tag[tag];
            std::size_t word = pool[rng.below(pool.size())];
            sentence.tokens.push_back(TaggedToken{word_name(word), tag_ids[tag]});
            super = sample_row(rows[super]);
        }
        corpus.sentences.push_back(std::move(sentence));
    }
    return corpus;
}

}  // namespace clustag
