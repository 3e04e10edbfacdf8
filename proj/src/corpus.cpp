#include "clustag/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "clustag/errors.hpp"
#include "clustag/util.hpp"

namespace clustag {

std::size_t Corpus::token_count() const {
    std::size_t n = 0;
    for (const Sentence& s : sentences) n += s.tokens.size();
    return n;
}

Corpus parse_corpus(std::istream& in) {
    auto tags = std::make_shared<Tagset>();
    Corpus corpus;
    Sentence current;
    std::string line;
    std::size_t lineno = 0;

    auto flush = [&] {
        if (!current.tokens.empty()) {
            corpus.sentences.push_back(std::move(current));
            current = Sentence{};
        }
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty() && line.front() == '#') continue;
        if (line.empty()) {
            flush();
            continue;
        }
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos) throw ParseError(lineno, "missing tab separator");
        if (line.find('\t', tab + 1) != std::string::npos)
            throw ParseError(lineno, "more than one tab separator");
        std::string word = line.substr(0, tab);
        std::string tag = line.substr(tab + 1);
        if (word.empty()) throw ParseError(lineno, "empty word");
        if (tag.empty()) throw ParseError(lineno, "empty tag");
        if (tag.find(' ') != std::string::npos)
            throw ParseError(lineno, "tag \"" + tag + "\" contains a space");
        if (tag == "<s>" || tag == "</s>")
            throw ParseError(lineno, "tag name \"" + tag + "\" is reserved");
        current.tokens.push_back(TaggedToken{std::move(word), tags->intern(tag)});
    }
    flush();
    if (corpus.sentences.empty()) throw Error("no sentences");
    corpus.tagset = std::move(tags);
    return corpus;
}

Corpus parse_corpus_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open corpus file: " + path);
    return parse_corpus(in);
}

void serialize_corpus(const Corpus& corpus, std::ostream& out) {
    for (const Sentence& s : corpus.sentences) {
        for (const TaggedToken& tok : s.tokens) {
            out << tok.word << '\t' << corpus.tagset->name(tok.tag) << '\n';
        }
        out << '\n';
    }
}

namespace {

Corpus take(const Corpus& source, const std::vector<std::size_t>& order, std::size_t begin,
            std::size_t end) {
    Corpus part;
    part.tagset = source.tagset;
    part.sentences.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) part.sentences.push_back(source.sentences[order[i]]);
    return part;
}

}  // namespace

CorpusSplit split_corpus(const Corpus& corpus, const SplitSpec& spec, std::uint64_t seed) {
    const std::size_t n = corpus.sentences.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    if (spec.mode == SplitMode::shuffled) {
        Rng rng(seed);
        rng.shuffle(order);
    }

    std::size_t na = 0, nb = 0, nc = 0;
    if (const auto* fr = std::get_if<SplitFractions>(&spec.parts)) {
        if (fr->training < 0 || fr->clustering < 0 || fr->testing < 0)
            throw ConfigError("split fractions must be non-negative");
        if (fr->training + fr->clustering + fr->testing > 1.0 + 1e-9)
            throw ConfigError("split fractions sum to more than 1");
        na = static_cast<std::size_t>(std::floor(fr->training * static_cast<double>(n) + 1e-9));
        nb = static_cast<std::size_t>(std::floor(fr->clustering * static_cast<double>(n) + 1e-9));
        nc = static_cast<std::size_t>(std::floor(fr->testing * static_cast<double>(n) + 1e-9));
        CorpusSplit split;
        split.training = take(corpus, order, 0, na);
        split.clustering = take(corpus, order, na, na + nb);
        split.testing = take(corpus, order, na + nb, na + nb + nc);
        return split;
    }

    const auto& ranges = std::get<SplitRanges>(spec.parts);
    auto check = [&](const SplitRanges::Range& r, const char* what) {
        if (r.begin > r.end) throw ConfigError(std::string(what) + " range is reversed");
        if (r.end > n) throw ConfigError(std::string(what) + " range exceeds sentence count");
    };
    check(ranges.training, "training");
    check(ranges.clustering, "clustering");
    check(ranges.testing, "testing");
    const SplitRanges::Range all[3] = {ranges.training, ranges.clustering, ranges.testing};
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            bool overlap = all[i].begin < all[j].end && all[j].begin < all[i].end;
            if (overlap) throw ConfigError("split ranges overlap");
        }
    }
    CorpusSplit split;
    split.training = take(corpus, order, ranges.training.begin, ranges.training.end);
    split.clustering = take(corpus, order, ranges.clustering.begin, ranges.clustering.end);
    split.testing = take(corpus, order, ranges.testing.begin, ranges.testing.end);
    return split;
}

Corpus concat(const Corpus& a, const Corpus& b) {
    if (a.sentences.empty()) return b;
    if (b.sentences.empty()) return a;
    if (!(a.tagset == b.tagset || *a.tagset == *b.tagset))
        throw Error("cannot concatenate corpora with different tagsets");
    Corpus out;
    out.tagset = a.tagset;
    out.sentences = a.sentences;
    out.sentences.insert(out.sentences.end(), b.sentences.begin(), b.sentences.end());
    return out;
}

Corpus retag(const Corpus& corpus, std::shared_ptr<const Tagset> target) {
    if (corpus.tagset == target || *corpus.tagset == *target) {
        Corpus out = corpus;
        out.tagset = std::move(target);
        return out;
    }
    std::vector<TagId> remap(corpus.tagset->size());
    for (TagId t = 0; t < corpus.tagset->size(); ++t) {
        auto mapped = target->find(corpus.tagset->name(t));
        if (!mapped) throw Error("tag \"" + corpus.tagset->name(t) + "\" missing from tagset");
        remap[t] = *mapped;
    }
    Corpus out;
    out.tagset = std::move(target);
    out.sentences = corpus.sentences;
    for (Sentence& s : out.sentences) {
        for (TaggedToken& tok : s.tokens) tok.tag = remap[tok.tag];
    }
    return out;
}

std::shared_ptr<const Tagset> union_tagset(const Corpus& a, const Corpus& b) {
    auto tags = std::make_shared<Tagset>();
    for (const std::string& name : a.tagset->names()) tags->intern(name);
    for (const std::string& name : b.tagset->names()) tags->intern(name);
    return tags;
}

std::vector<std::vector<std::string>> read_plain_sentences(std::istream& in) {
    std::vector<std::vector<std::string>> sentences;
    std::vector<std::string> current;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty() && line.front() == '#') continue;
        if (line.empty()) {
            if (!current.empty()) sentences.push_back(std::move(current));
            current.clear();
            continue;
        }
        std::size_t tab = line.find('\t');
        current.push_back(tab == std::string::npos ? line : line.substr(0, tab));
    }
    if (!current.empty()) sentences.push_back(std::move(current));
    return sentences;
}

}  // namespace clustag
