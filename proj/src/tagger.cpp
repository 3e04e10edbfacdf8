#include "clustag/tagger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "clustag/errors.hpp"

namespace clustag {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr Label kMissing = 0xFFFFFFFFu;
constexpr Label kBoundary = 0xFFFFFFFEu;  // decode-space BOS/EOS sentinel

// Shared per-decode state: the decode label space (tag ids or cluster
// indices), its name-keyed mapping onto the model's label space, and the
// candidate inventory for unknown words.
struct DecodeContext {
    const TrigramModel* model = nullptr;
    const Lexicon* lexicon = nullptr;
    const ClusterTagset* clustering = nullptr;  // null = decode over tag ids
    std::vector<Label> to_model;
    std::vector<const std::string*> names;
    std::vector<Label> all_by_name;
    double log_uniform = 0.0;

    DecodeContext(const TrigramModel& m, const Lexicon& lex, const ClusterTagset* clusters)
        : model(&m), lexicon(&lex), clustering(clusters) {
        if (m.lowercase() != lex.lowercase())
            throw ConfigError("model and lexicon disagree about case folding");
        const std::size_t n =
            clusters != nullptr ? clusters->size() : lexicon->tagset().size();
        if (n == 0) throw Error("empty tagset");
        names.resize(n);
        to_model.resize(n);
        for (Label l = 0; l < n; ++l) {
            names[l] = clusters != nullptr ? &clusters->cluster(l).display_name
                                           : &lexicon->tagset().name(l);
            auto ml = m.find_label(*names[l]);
            to_model[l] = ml ? *ml : kMissing;
        }
        all_by_name.resize(n);
        for (Label l = 0; l < n; ++l) all_by_name[l] = l;
        std::sort(all_by_name.begin(), all_by_name.end(),
                  [&](Label a, Label b) { return *names[a] < *names[b]; });
        log_uniform = -std::log(static_cast<double>(n));
    }

    const std::string& name(Label l) const { return *names[l]; }

    Label model_label(Label decode_label) const {
        if (decode_label == kBoundary) return kMissing;  // resolved by caller
        return to_model[decode_label];
    }

    // Mirrors TrigramModel::contextual_prob, treating labels unknown to the
    // model as zero-count labels.
    double log_ctx(Label a, Label b, Label c) const {
        Label m1 = a == kBoundary ? model->bos() : to_model[a];
        Label m2 = b == kBoundary ? model->bos() : to_model[b];
        Label m3 = c == kBoundary ? model->eos() : to_model[c];
        if (m1 != kMissing && m2 != kMissing && m3 != kMissing)
            return model->log_contextual(m1, m2, m3);
        if (m3 == kMissing) return kNegInf;
        const NgramCounts& counts = model->counts();
        double p = 0.0;
        if (counts.unigram_total > 0) {
            p += model->lambdas().l1 * (static_cast<double>(counts.unigram[m3]) /
                                        static_cast<double>(counts.unigram_total));
        }
        if (m2 != kMissing) {
            Count ctx2 = counts.bigram_ctx[m2];
            if (ctx2 > 0) {
                p += model->lambdas().l2 *
                     (static_cast<double>(counts.get(counts.bigram, NgramCounts::key2(m2, m3))) /
                      static_cast<double>(ctx2));
            }
        }
        return p > 0.0 ? std::log(p) : kNegInf;
    }
};

struct TokenCands {
    std::vector<Label> labels;  // decode labels, sorted by display name
    std::vector<double> log_emit;
    std::size_t fallback_index = 0;
    bool unknown = false;
};

TokenCands make_candidates(const DecodeContext& ctx, const std::string& word) {
    TokenCands tc;
    auto wid = ctx.lexicon->word_id(word);
    if (!wid) {
        tc.unknown = true;
        tc.labels = ctx.all_by_name;
        tc.log_emit.assign(tc.labels.size(), ctx.log_uniform);
        // Most frequent label by training counts.
        Count best = 0;
        for (std::size_t i = 0; i < tc.labels.size(); ++i) {
            Label ml = ctx.to_model[tc.labels[i]];
            Count c = ml == kMissing ? 0 : ctx.model->counts().unigram[ml];
            if (c > best) {
                best = c;
                tc.fallback_index = i;
            }
        }
        return tc;
    }

    std::span<const TagCount> tags = ctx.lexicon->tags_of(*wid);
    if (ctx.clustering != nullptr) {
        for (const TagCount& t : tags) {
            Label cl = ctx.clustering->cluster_of(t.tag);
            if (std::find(tc.labels.begin(), tc.labels.end(), cl) == tc.labels.end())
                tc.labels.push_back(cl);
        }
    } else {
        for (const TagCount& t : tags) tc.labels.push_back(t.tag);
    }
    std::sort(tc.labels.begin(), tc.labels.end(),
              [&](Label a, Label b) { return ctx.name(a) < ctx.name(b); });

    auto mw = ctx.model->emit_word_id(word);
    tc.log_emit.reserve(tc.labels.size());
    Count best = 0;
    for (std::size_t i = 0; i < tc.labels.size(); ++i) {
        Label ml = ctx.to_model[tc.labels[i]];
        double p = (ml != kMissing && mw) ? ctx.model->lexical_prob(ml, *mw) : 0.0;
        tc.log_emit.push_back(p > 0.0 ? std::log(p) : kNegInf);
        // Most frequent candidate for this word.
        Count c = 0;
        if (ctx.clustering != nullptr) {
            for (const TagCount& t : tags) {
                if (ctx.clustering->cluster_of(t.tag) == tc.labels[i]) c += t.count;
            }
        } else {
            c = ctx.lexicon->count(*wid, tc.labels[i]);
        }
        if (c > best) {
            best = c;
            tc.fallback_index = i;
        }
    }
    return tc;
}

struct RawDecode {
    std::vector<Label> labels;
    bool fallback = false;
    double log_prob = kNegInf;
};

// Candidate index sequence of the path ending at position pos in state
// (ja = index at pos-1, jb = index at pos).
std::vector<std::uint32_t> reconstruct(const std::vector<TokenCands>& tokens,
                                       const std::vector<std::vector<std::uint32_t>>& back,
                                       std::size_t pos, std::uint32_t ja, std::uint32_t jb) {
    std::vector<std::uint32_t> idx(pos + 1);
    idx[pos] = jb;
    if (pos >= 1) idx[pos - 1] = ja;
    std::uint32_t a = ja, b = jb;
    for (std::size_t p = pos; p >= 2; --p) {
        std::uint32_t z = back[p][a * tokens[p].labels.size() + b];
        idx[p - 2] = z;
        b = a;
        a = z;
    }
    return idx;
}

// Lexicographic order of two same-score paths by label-name sequence.
bool path_precedes(const DecodeContext& ctx, const std::vector<TokenCands>& tokens,
                   const std::vector<std::vector<std::uint32_t>>& back, std::size_t pos,
                   std::uint32_t ja1, std::uint32_t jb1, std::uint32_t ja2, std::uint32_t jb2) {
    auto p1 = reconstruct(tokens, back, pos, ja1, jb1);
    auto p2 = reconstruct(tokens, back, pos, ja2, jb2);
    for (std::size_t i = 0; i <= pos; ++i) {
        const std::string& n1 = ctx.name(tokens[i].labels[p1[i]]);
        const std::string& n2 = ctx.name(tokens[i].labels[p2[i]]);
        if (n1 != n2) return n1 < n2;
    }
    return false;
}

RawDecode decode_core(const DecodeContext& ctx, const std::vector<TokenCands>& tokens,
                      const DecodeOptions& opts) {
    const std::size_t n = tokens.size();
    std::vector<std::vector<double>> score(n);
    std::vector<std::vector<std::uint32_t>> back(n);

    {
        const std::size_t c0 = tokens[0].labels.size();
        score[0].resize(c0);
        back[0].assign(c0, 0);
        for (std::size_t jc = 0; jc < c0; ++jc) {
            double s = ctx.log_ctx(kBoundary, kBoundary, tokens[0].labels[jc]);
            s += tokens[0].log_emit[jc];
            score[0][jc] = s;
        }
    }

    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t pp = i >= 2 ? tokens[i - 2].labels.size() : 1;
        const std::size_t pc = tokens[i - 1].labels.size();
        const std::size_t cc = tokens[i].labels.size();
        score[i].assign(pc * cc, kNegInf);
        back[i].assign(pc * cc, 0);
        for (std::size_t jb = 0; jb < pc; ++jb) {
            const Label lb = tokens[i - 1].labels[jb];
            for (std::size_t jc = 0; jc < cc; ++jc) {
                const Label lc = tokens[i].labels[jc];
                double best = kNegInf;
                std::uint32_t best_a = 0;
                bool have = false;
                for (std::size_t ja = 0; ja < pp; ++ja) {
                    const Label la = i >= 2 ? tokens[i - 2].labels[ja] : kBoundary;
                    double s = score[i - 1][ja * pc + jb];
                    double cand = s + ctx.log_ctx(la, lb, lc);
                    cand += tokens[i].log_emit[jc];
                    bool better = cand > best;
                    if (!better && have && cand == best && cand != kNegInf && i >= 2) {
                        better = path_precedes(ctx, tokens, back, i - 1,
                                               static_cast<std::uint32_t>(ja),
                                               static_cast<std::uint32_t>(jb), best_a,
                                               static_cast<std::uint32_t>(jb));
                    }
                    if (!have || better) {
                        have = true;
                        best = cand;
                        best_a = static_cast<std::uint32_t>(ja);
                    }
                }
                score[i][jb * cc + jc] = best;
                back[i][jb * cc + jc] = best_a;
            }
        }
        if (opts.beam > 0 && score[i].size() > opts.beam) {
            std::vector<std::size_t> order(score[i].size());
            for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
            std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
                if (score[i][x] != score[i][y]) return score[i][x] > score[i][y];
                return x < y;
            });
            for (std::size_t k = opts.beam; k < order.size(); ++k) score[i][order[k]] = kNegInf;
        }
    }

    // Final transition into EOS.
    double best_total = kNegInf;
    std::uint32_t best_a = 0, best_b = 0;
    bool have = false;
    const std::size_t last = n - 1;
    const std::size_t pc = last >= 1 ? tokens[last - 1].labels.size() : 1;
    const std::size_t cc = tokens[last].labels.size();
    for (std::size_t ja = 0; ja < pc; ++ja) {
        const Label la = last >= 1 ? tokens[last - 1].labels[ja] : kBoundary;
        for (std::size_t jb = 0; jb < cc; ++jb) {
            double s = score[last][ja * cc + jb];
            double total = s + ctx.log_ctx(la, tokens[last].labels[jb], kBoundary);
            bool better = total > best_total;
            if (!better && have && total == best_total && total != kNegInf) {
                better = path_precedes(ctx, tokens, back, last, static_cast<std::uint32_t>(ja),
                                       static_cast<std::uint32_t>(jb), best_a, best_b);
            }
            if (!have || better) {
                have = true;
                best_total = total;
                best_a = static_cast<std::uint32_t>(ja);
                best_b = static_cast<std::uint32_t>(jb);
            }
        }
    }

    RawDecode out;
    if (best_total == kNegInf) {
        // Every complete path has probability zero: fall back to the
        // locally most frequent candidate per token and flag the sentence.
        out.fallback = true;
        out.labels.reserve(n);
        for (const TokenCands& tc : tokens) out.labels.push_back(tc.labels[tc.fallback_index]);
        return out;
    }
    auto idx = reconstruct(tokens, back, last, best_a, best_b);
    out.labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.labels.push_back(tokens[i].labels[idx[i]]);
    out.log_prob = best_total;
    return out;
}

RawDecode decode_sentence(const DecodeContext& ctx, std::span<const std::string> words,
                          const DecodeOptions& opts) {
    if (words.empty()) throw Error("cannot tag an empty sentence");
    std::vector<TokenCands> tokens;
    tokens.reserve(words.size());
    for (const std::string& w : words) tokens.push_back(make_candidates(ctx, w));
    return decode_core(ctx, tokens, opts);
}

TagId most_frequent_in_cluster(const Cluster& cluster, const Lexicon& lexicon) {
    TagId best = cluster.members.front();
    Count best_count = lexicon.total_count(best);
    for (TagId t : cluster.members) {
        // Members are name-sorted, so ties keep the smaller name.
        if (lexicon.total_count(t) > best_count) {
            best = t;
            best_count = lexicon.total_count(t);
        }
    }
    return best;
}

}  // namespace

TagSequence viterbi_tag(std::span<const std::string> words, const TrigramModel& model,
                        const Lexicon& lexicon, const DecodeOptions& opts) {
    DecodeContext ctx(model, lexicon, nullptr);
    RawDecode raw = decode_sentence(ctx, words, opts);
    TagSequence seq;
    seq.ids.assign(raw.labels.begin(), raw.labels.end());
    seq.guessed.assign(words.size(), false);
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (!lexicon.is_known(words[i])) seq.guessed[i] = true;
    }
    seq.fallback = raw.fallback;
    seq.log_prob = raw.log_prob;
    return seq;
}

TagSequence tag_and_restore(std::span<const std::string> words, const TrigramModel& model,
                            const ClusterTagset& clustering, const Lexicon& lexicon,
                            const DecodeOptions& opts) {
    DecodeContext ctx(model, lexicon, &clustering);
    RawDecode raw = decode_sentence(ctx, words, opts);
    TagSequence seq;
    seq.ids.resize(words.size());
    seq.guessed.assign(words.size(), false);
    seq.fallback = raw.fallback;
    seq.log_prob = raw.log_prob;
    for (std::size_t i = 0; i < words.size(); ++i) {
        const Cluster& cluster = clustering.cluster(raw.labels[i]);
        if (lexicon.is_known(words[i])) {
            seq.ids[i] = restore_original(words[i], cluster, lexicon);
        } else {
            seq.ids[i] = most_frequent_in_cluster(cluster, lexicon);
            seq.guessed[i] = true;
        }
    }
    return seq;
}

std::vector<TagSequence> tag_sentences(std::span<const std::vector<std::string>> sentences,
                                       const TrigramModel& model,
                                       const ClusterTagset& clustering, const Lexicon& lexicon,
                                       int threads, const DecodeOptions& opts) {
    DecodeContext ctx(model, lexicon, &clustering);
    std::vector<TagSequence> out(sentences.size());

    auto run = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const std::vector<std::string>& words = sentences[i];
            RawDecode raw = decode_sentence(ctx, words, opts);
            TagSequence& seq = out[i];
            seq.ids.resize(words.size());
            seq.guessed.assign(words.size(), false);
            seq.fallback = raw.fallback;
            seq.log_prob = raw.log_prob;
            for (std::size_t k = 0; k < words.size(); ++k) {
                const Cluster& cluster = clustering.cluster(raw.labels[k]);
                if (lexicon.is_known(words[k])) {
                    seq.ids[k] = restore_original(words[k], cluster, lexicon);
                } else {
                    seq.ids[k] = most_frequent_in_cluster(cluster, lexicon);
                    seq.guessed[k] = true;
                }
            }
        }
    };

    const std::size_t n = sentences.size();
    if (threads <= 1 || n < 2) {
        run(0, n);
        return out;
    }
    const std::size_t workers = std::min<std::size_t>(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t begin = n * w / workers;
        std::size_t end = n * (w + 1) / workers;
        pool.emplace_back(run, begin, end);
    }
    for (auto& t : pool) t.join();
    return out;
}

std::vector<TagSequence> tag_corpus(const Corpus& corpus, const TrigramModel& model,
                                    const ClusterTagset& clustering, const Lexicon& lexicon,
                                    int threads, const DecodeOptions& opts) {
    std::vector<std::vector<std::string>> sentences(corpus.sentences.size());
    for (std::size_t i = 0; i < corpus.sentences.size(); ++i) {
        sentences[i].reserve(corpus.sentences[i].tokens.size());
        for (const TaggedToken& tok : corpus.sentences[i].tokens)
            sentences[i].push_back(tok.word);
    }
    return tag_sentences(sentences, model, clustering, lexicon, threads, opts);
}

}  // namespace clustag
