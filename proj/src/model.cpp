#include "clustag/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>

#include "clustag/errors.hpp"
#include "clustag/util.hpp"

namespace clustag {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

bool NgramCounts::operator==(const NgramCounts& other) const {
    return label_names == other.label_names && lowercase == other.lowercase &&
           words == other.words && unigram == other.unigram && bigram_ctx == other.bigram_ctx &&
           bigram == other.bigram && trigram == other.trigram &&
           trigram_ctx == other.trigram_ctx && emission == other.emission &&
           unigram_total == other.unigram_total && token_total == other.token_total &&
           sentence_total == other.sentence_total;
}

NgramCounts count_ngrams(const Corpus& corpus, const ClusterTagset* mapping, bool lowercase) {
    NgramCounts counts;
    counts.lowercase = lowercase;
    if (mapping != nullptr) {
        if (!(*mapping->tagset_ptr() == *corpus.tagset))
            throw Error("cluster mapping is over a different tagset than the corpus");
        counts.label_names = mapping->display_names();
    } else {
        counts.label_names = corpus.tagset->names();
    }
    const Label bos = counts.bos();
    const Label eos = counts.eos();
    counts.unigram.assign(counts.num_labels() + 2, 0);
    counts.bigram_ctx.assign(counts.num_labels() + 2, 0);

    std::vector<Label> padded;
    for (const Sentence& s : corpus.sentences) {
        padded.clear();
        padded.push_back(bos);
        padded.push_back(bos);
        for (const TaggedToken& tok : s.tokens) {
            Label l = (mapping != nullptr) ? mapping->cluster_of(tok.tag) : tok.tag;
            padded.push_back(l);
            ++counts.unigram[l];
            WordId w = lowercase ? counts.words.intern(fold_ascii(tok.word))
                                 : counts.words.intern(tok.word);
            ++counts.emission[NgramCounts::emit_key(l, w)];
            ++counts.token_total;
        }
        padded.push_back(eos);
        ++counts.unigram[eos];
        ++counts.sentence_total;

        for (std::size_t i = 0; i + 1 < padded.size(); ++i) {
            ++counts.bigram[NgramCounts::key2(padded[i], padded[i + 1])];
            // Continuation totals exclude successors that are BOS, so every
            // conditional normalizes over tagset ∪ {EOS}.
            if (padded[i + 1] != bos) ++counts.bigram_ctx[padded[i]];
        }
        for (std::size_t i = 0; i + 2 < padded.size(); ++i) {
            ++counts.trigram[NgramCounts::key3(padded[i], padded[i + 1], padded[i + 2])];
            ++counts.trigram_ctx[NgramCounts::key2(padded[i], padded[i + 1])];
        }
    }
    counts.unigram_total = counts.token_total + counts.sentence_total;
    return counts;
}

NgramCounts project_counts(const NgramCounts& base, const ClusterTagset& mapping) {
    // Labels correspond to the mapping's tags by name; the order may differ
    // (a reloaded model dump sorts its labels) and tags the counts never saw
    // simply contribute nothing.
    std::vector<Label> cluster_of_label(base.num_labels());
    for (Label l = 0; l < base.num_labels(); ++l) {
        auto tag = mapping.tagset().find(base.label_names[l]);
        if (!tag)
            throw Error("projection mapping does not cover tag \"" + base.label_names[l] + "\"");
        cluster_of_label[l] = mapping.cluster_of(*tag);
    }

    NgramCounts out;
    out.lowercase = base.lowercase;
    out.label_names = mapping.display_names();
    out.words = base.words;
    out.unigram.assign(out.num_labels() + 2, 0);
    out.bigram_ctx.assign(out.num_labels() + 2, 0);
    out.token_total = base.token_total;
    out.sentence_total = base.sentence_total;
    out.unigram_total = base.unigram_total;

    // Boundary labels map to themselves across the two label spaces.
    auto remap = [&](Label l) -> Label {
        if (l == base.bos()) return out.bos();
        if (l == base.eos()) return out.eos();
        return cluster_of_label[l];
    };

    for (Label l = 0; l < base.num_labels() + 2; ++l) {
        out.unigram[remap(l)] += base.unigram[l];
        out.bigram_ctx[remap(l)] += base.bigram_ctx[l];
    }
    // BOS never carries unigram or continuation mass of its own; the += above
    // only moves real-label and EOS slots plus the BOS history row.
    for (const auto& [key, c] : base.bigram) {
        Label a = static_cast<Label>(key >> 21), b = static_cast<Label>(key & 0x1FFFFF);
        out.bigram[NgramCounts::key2(remap(a), remap(b))] += c;
    }
    for (const auto& [key, c] : base.trigram) {
        Label a = static_cast<Label>(key >> 42), b = static_cast<Label>((key >> 21) & 0x1FFFFF),
              d = static_cast<Label>(key & 0x1FFFFF);
        out.trigram[NgramCounts::key3(remap(a), remap(b), remap(d))] += c;
    }
    for (const auto& [key, c] : base.trigram_ctx) {
        Label a = static_cast<Label>(key >> 21), b = static_cast<Label>(key & 0x1FFFFF);
        out.trigram_ctx[NgramCounts::key2(remap(a), remap(b))] += c;
    }
    for (const auto& [key, c] : base.emission) {
        Label t = static_cast<Label>(key >> 32);
        WordId w = static_cast<WordId>(key & 0xFFFFFFFF);
        out.emission[NgramCounts::emit_key(remap(t), w)] += c;
    }
    return out;
}

NgramCounts combine_counts(const NgramCounts& a, const NgramCounts& b) {
    if (a.label_names != b.label_names) throw Error("cannot combine counts over different tagsets");
    if (a.lowercase != b.lowercase) throw Error("cannot combine counts with different case folding");

    NgramCounts out = a;
    for (Label l = 0; l < out.num_labels() + 2; ++l) {
        out.unigram[l] += b.unigram[l];
        out.bigram_ctx[l] += b.bigram_ctx[l];
    }
    for (const auto& [key, c] : b.bigram) out.bigram[key] += c;
    for (const auto& [key, c] : b.trigram) out.trigram[key] += c;
    for (const auto& [key, c] : b.trigram_ctx) out.trigram_ctx[key] += c;

    std::vector<WordId> word_map(b.words.size());
    for (WordId w = 0; w < b.words.size(); ++w) word_map[w] = out.words.intern(b.words.name(w));
    for (const auto& [key, c] : b.emission) {
        Label t = static_cast<Label>(key >> 32);
        WordId w = word_map[static_cast<WordId>(key & 0xFFFFFFFF)];
        out.emission[NgramCounts::emit_key(t, w)] += c;
    }

    out.token_total += b.token_total;
    out.sentence_total += b.sentence_total;
    out.unigram_total += b.unigram_total;
    return out;
}

Lambdas estimate_lambdas(const NgramCounts& counts) {
    if (counts.token_total == 0) throw Error("cannot estimate interpolation weights: no counts");

    Count credit1 = 0, credit2 = 0, credit3 = 0;
    for (const auto& [key, c3] : counts.trigram) {
        Label t1 = static_cast<Label>(key >> 42);
        Label t2 = static_cast<Label>((key >> 21) & 0x1FFFFF);
        Label t3 = static_cast<Label>(key & 0x1FFFFF);

        Count ctx3 = counts.get(counts.trigram_ctx, NgramCounts::key2(t1, t2));
        Count c2 = counts.get(counts.bigram, NgramCounts::key2(t2, t3));
        Count ctx2 = counts.bigram_ctx[t2];
        Count c1 = counts.unigram[t3];

        double d3 = ctx3 > 1 ? static_cast<double>(c3 - 1) / static_cast<double>(ctx3 - 1) : 0.0;
        double d2 = ctx2 > 1 ? static_cast<double>(c2 - 1) / static_cast<double>(ctx2 - 1) : 0.0;
        double d1 = counts.unigram_total > 1
                        ? static_cast<double>(c1 - 1) / static_cast<double>(counts.unigram_total - 1)
                        : 0.0;

        // Ties go to the lower-order estimate.
        if (d1 >= d2 && d1 >= d3) {
            credit1 += c3;
        } else if (d2 >= d3) {
            credit2 += c3;
        } else {
            credit3 += c3;
        }
    }

    Count total = credit1 + credit2 + credit3;
    if (total == 0) return Lambdas{1.0, 0.0, 0.0};

    Lambdas l;
    l.l1 = static_cast<double>(credit1) / static_cast<double>(total);
    l.l2 = static_cast<double>(credit2) / static_cast<double>(total);
    l.l3 = static_cast<double>(credit3) / static_cast<double>(total);

    // Recompute the largest weight from the other two and nudge it by ulps
    // until l1 + l2 + l3 == 1.0 holds in double arithmetic.
    double* weights[3] = {&l.l1, &l.l2, &l.l3};
    std::size_t largest = 0;
    for (std::size_t i = 1; i < 3; ++i) {
        if (*weights[i] > *weights[largest]) largest = i;
    }
    double others = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        if (i != largest) others += *weights[i];
    }
    *weights[largest] = 1.0 - others;
    for (int guard = 0; guard < 8 && l.l1 + l.l2 + l.l3 != 1.0; ++guard) {
        *weights[largest] = std::nextafter(*weights[largest],
                                           l.l1 + l.l2 + l.l3 < 1.0 ? 2.0 : -1.0);
    }
    return l;
}

TrigramModel TrigramModel::build(NgramCounts counts) {
    Lambdas l = estimate_lambdas(counts);
    return TrigramModel(std::move(counts), l);
}

TrigramModel TrigramModel::with_lambdas(NgramCounts counts, Lambdas lambdas) {
    return TrigramModel(std::move(counts), lambdas);
}

std::optional<Label> TrigramModel::find_label(std::string_view name) const {
    for (Label l = 0; l < counts_.num_labels(); ++l) {
        if (counts_.label_names[l] == name) return l;
    }
    return std::nullopt;
}

double TrigramModel::contextual_prob(Label t1, Label t2, Label t3) const {
    double p = 0.0;
    if (counts_.unigram_total > 0) {
        p += lambdas_.l1 * (static_cast<double>(counts_.unigram[t3]) /
                            static_cast<double>(counts_.unigram_total));
    }
    Count ctx2 = counts_.bigram_ctx[t2];
    if (ctx2 > 0) {
        p += lambdas_.l2 * (static_cast<double>(counts_.get(counts_.bigram,
                                                            NgramCounts::key2(t2, t3))) /
                            static_cast<double>(ctx2));
    }
    Count ctx3 = counts_.get(counts_.trigram_ctx, NgramCounts::key2(t1, t2));
    if (ctx3 > 0) {
        p += lambdas_.l3 * (static_cast<double>(counts_.get(counts_.trigram,
                                                            NgramCounts::key3(t1, t2, t3))) /
                            static_cast<double>(ctx3));
    }
    return p;
}

double TrigramModel::log_contextual(Label t1, Label t2, Label t3) const {
    double p = contextual_prob(t1, t2, t3);
    return p > 0.0 ? std::log(p) : kNegInf;
}

double TrigramModel::lexical_prob(Label t, WordId w) const {
    Count uni = counts_.unigram[t];
    if (uni == 0) return 0.0;
    Count c = counts_.get(counts_.emission, NgramCounts::emit_key(t, w));
    return static_cast<double>(c) / static_cast<double>(uni);
}

double TrigramModel::lexical_prob(Label t, std::string_view word) const {
    auto w = emit_word_id(word);
    return w ? lexical_prob(t, *w) : 0.0;
}

double TrigramModel::log_lexical(Label t, WordId w) const {
    double p = lexical_prob(t, w);
    return p > 0.0 ? std::log(p) : kNegInf;
}

std::optional<WordId> TrigramModel::emit_word_id(std::string_view word) const {
    if (counts_.lowercase) return counts_.words.find(fold_ascii(word));
    return counts_.words.find(word);
}

void TrigramModel::dump(std::ostream& out) const {
    auto name_of = [&](Label l) -> std::string {
        if (l == bos()) return "<s>";
        if (l == eos()) return "</s>";
        return counts_.label_names[l];
    };

    std::vector<std::string> lines;
    lines.reserve(counts_.trigram.size() + counts_.emission.size() + 1);
    for (const auto& [key, c] : counts_.trigram) {
        Label a = static_cast<Label>(key >> 42), b = static_cast<Label>((key >> 21) & 0x1FFFFF),
              d = static_cast<Label>(key & 0x1FFFFF);
        lines.push_back("TRI\t" + name_of(a) + " " + name_of(b) + " " + name_of(d) + "\t" +
                        std::to_string(c));
    }
    for (const auto& [key, c] : counts_.emission) {
        Label t = static_cast<Label>(key >> 32);
        WordId w = static_cast<WordId>(key & 0xFFFFFFFF);
        lines.push_back("EMIT\t" + name_of(t) + " " + counts_.words.name(w) + "\t" +
                        std::to_string(c));
    }
    lines.push_back("LAMBDA\t" + format_double(lambdas_.l1) + " " + format_double(lambdas_.l2) +
                    " " + format_double(lambdas_.l3));
    std::sort(lines.begin(), lines.end());
    for (const std::string& line : lines) out << line << '\n';
}

TrigramModel TrigramModel::load(std::istream& in, bool lowercase) {
    struct TriLine {
        std::string t1, t2, t3;
        Count count;
    };
    struct EmitLine {
        std::string tag, word;
        Count count;
    };
    std::vector<TriLine> tris;
    std::vector<EmitLine> emits;
    Lambdas lambdas;
    bool have_lambda = false;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        auto fields = split_on(line, '\t');
        if (fields.size() < 2) throw ParseError(lineno, "malformed model line");
        std::string_view kind = fields[0];
        if (kind == "LAMBDA") {
            auto parts = split_on(fields[1], ' ');
            if (parts.size() != 3) throw ParseError(lineno, "LAMBDA needs three weights");
            try {
                lambdas.l1 = std::stod(std::string(parts[0]));
                lambdas.l2 = std::stod(std::string(parts[1]));
                lambdas.l3 = std::stod(std::string(parts[2]));
            } catch (const std::exception&) {
                throw ParseError(lineno, "bad LAMBDA weight");
            }
            have_lambda = true;
            continue;
        }
        if (fields.size() != 3) throw ParseError(lineno, "malformed model line");
        Count count = 0;
        try {
            count = std::stoull(std::string(fields[2]));
        } catch (const std::exception&) {
            throw ParseError(lineno, "bad count");
        }
        if (kind == "TRI") {
            auto parts = split_on(fields[1], ' ');
            if (parts.size() != 3) throw ParseError(lineno, "TRI needs three tags");
            tris.push_back(TriLine{std::string(parts[0]), std::string(parts[1]),
                                   std::string(parts[2]), count});
        } else if (kind == "EMIT") {
            std::string_view body = fields[1];
            std::size_t space = body.find(' ');
            if (space == std::string_view::npos || space + 1 >= body.size())
                throw ParseError(lineno, "EMIT needs a tag and a word");
            emits.push_back(EmitLine{std::string(body.substr(0, space)),
                                     std::string(body.substr(space + 1)), count});
        } else {
            throw ParseError(lineno, "unknown record \"" + std::string(kind) + "\"");
        }
    }
    if (!have_lambda) throw Error("model file has no LAMBDA line");
    if (tris.empty()) throw Error("model file has no TRI lines");

    // Label ids are assigned in sorted-name order; probabilities and decoding
    // are name-keyed, so the id permutation relative to training is harmless.
    std::vector<std::string> names;
    auto collect = [&](const std::string& n) {
        if (n != "<s>" && n != "</s>") names.push_back(n);
    };
    for (const TriLine& t : tris) {
        collect(t.t1);
        collect(t.t2);
        collect(t.t3);
    }
    for (const EmitLine& e : emits) collect(e.tag);
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());

    NgramCounts counts;
    counts.lowercase = lowercase;
    counts.label_names = names;
    counts.unigram.assign(counts.num_labels() + 2, 0);
    counts.bigram_ctx.assign(counts.num_labels() + 2, 0);
    const Label bos = counts.bos();
    const Label eos = counts.eos();

    StringInterner<Label> index;
    for (const std::string& n : names) index.intern(n);
    auto label_of = [&](const std::string& n) -> Label {
        if (n == "<s>") return bos;
        if (n == "</s>") return eos;
        return *index.find(n);
    };

    // Lower-order counts are exact marginals of the trigram table.
    for (const TriLine& t : tris) {
        Label a = label_of(t.t1), b = label_of(t.t2), c = label_of(t.t3);
        counts.trigram[NgramCounts::key3(a, b, c)] += t.count;
        counts.trigram_ctx[NgramCounts::key2(a, b)] += t.count;
        counts.bigram[NgramCounts::key2(b, c)] += t.count;
        if (c != bos) counts.bigram_ctx[b] += t.count;
        counts.unigram[c] += t.count;
    }
    // The only bigram missing from the third-position marginal is (BOS,BOS),
    // one per sentence.
    Count sentences = counts.unigram[eos];
    counts.bigram[NgramCounts::key2(bos, bos)] += sentences;
    counts.sentence_total = sentences;
    Count tokens = 0;
    for (Label l = 0; l < counts.num_labels(); ++l) tokens += counts.unigram[l];
    counts.token_total = tokens;
    counts.unigram_total = tokens + sentences;

    for (const EmitLine& e : emits) {
        Label t = label_of(e.tag);
        if (t == bos || t == eos) throw Error("boundary labels cannot emit");
        WordId w = counts.words.intern(e.word);
        counts.emission[NgramCounts::emit_key(t, w)] += e.count;
    }
    return TrigramModel(std::move(counts), lambdas);
}

}  // namespace clustag
