#include <doctest.h>

#include <set>
#include <sstream>

#include "clustag/corpus.hpp"
#include "clustag/errors.hpp"
#include "clustag/util.hpp"
#include "oracles.hpp"

using namespace clustag;

namespace {

Corpus parse_str(const std::string& text) {
    std::istringstream in(text);
    return parse_corpus(in);
}

std::string serialize_str(const Corpus& corpus) {
    std::ostringstream out;
    serialize_corpus(corpus, out);
    return out.str();
}

Corpus numbered_corpus(std::size_t sentences) {
    std::string text;
    for (std::size_t i = 0; i < sentences; ++i) text += "w" + std::to_string(i) + "\tT\n\n";
    return parse_str(text);
}

std::multiset<std::string> sentence_multiset(const Corpus& corpus) {
    std::multiset<std::string> out;
    for (const Sentence& s : corpus.sentences) {
        std::string key;
        for (const TaggedToken& tok : s.tokens)
            key += tok.word + "/" + corpus.tagset->name(tok.tag) + " ";
        out.insert(key);
    }
    return out;
}

}  // namespace

TEST_CASE("parse_corpus reads the tab-separated format") {
    Corpus c = parse_str("the\tAT\ncliff\tNN\n\n");
    REQUIRE(c.sentences.size() == 1);
    CHECK(c.sentences[0].tokens.size() == 2);
    CHECK(c.sentences[0].tokens[0].word == "the");
    CHECK(c.tagset->size() == 2);
    CHECK(c.tagset->find("AT").has_value());
    CHECK(c.tagset->find("NN").has_value());
}

TEST_CASE("parse_corpus accepts a trailing sentence without a blank line") {
    Corpus c = parse_str("easier\tJJR\n");
    REQUIRE(c.sentences.size() == 1);
    CHECK(c.tagset->size() == 1);
    CHECK(c.tagset->find("JJR").has_value());
}

TEST_CASE("parse_corpus reports malformed lines with their number") {
    CHECK_THROWS_AS(parse_str("a\tAT\nb\n"), ParseError);
    try {
        parse_str("a\tAT\nb\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse_str("a\tAT\tX\n"), ParseError);  // two tabs
    CHECK_THROWS_AS(parse_str("\tAT\n"), ParseError);      // empty word
    CHECK_THROWS_AS(parse_str("a\t\n"), ParseError);       // empty tag
    CHECK_THROWS_AS(parse_str("a\t<s>\n"), ParseError);    // reserved name
    CHECK_THROWS_AS(parse_str("a\tN P\n"), ParseError);    // space in tag
}

TEST_CASE("parse_corpus rejects empty input") {
    CHECK_THROWS_WITH(parse_str(""), "no sentences");
    CHECK_THROWS_WITH(parse_str("# only a comment\n\n"), "no sentences");
}

TEST_CASE("parse_corpus skips comments and keeps sentence order") {
    Corpus c = parse_str("# header\na\tX\n\n# middle\nb\tY\nc\tX\n\n");
    REQUIRE(c.sentences.size() == 2);
    CHECK(c.sentences[0].tokens[0].word == "a");
    CHECK(c.sentences[1].tokens.size() == 2);
}

TEST_CASE("serialize round-trips a comment-free corpus byte for byte") {
    std::string text = "the\tAT\ncliff\tNN\n\na\tAT\n\n";
    CHECK(serialize_str(parse_str(text)) == text);

    auto random = oracles::random_corpus({.seed = 7});
    std::string bytes = serialize_str(random);
    CHECK(serialize_str(parse_str(bytes)) == bytes);
}

TEST_CASE("contiguous fraction split cuts 10 sentences into 8/1/1") {
    Corpus c = numbered_corpus(10);
    SplitSpec spec{SplitFractions{0.8, 0.1, 0.1}, SplitMode::contiguous};
    CorpusSplit split = split_corpus(c, spec, 0);
    CHECK(split.training.sentences.size() == 8);
    CHECK(split.clustering.sentences.size() == 1);
    CHECK(split.testing.sentences.size() == 1);
    CHECK(split.training.sentences[0].tokens[0].word == "w0");
    CHECK(split.clustering.sentences[0].tokens[0].word == "w8");
    CHECK(split.testing.sentences[0].tokens[0].word == "w9");
}

TEST_CASE("an empty clustering part is a valid split") {
    Corpus c = numbered_corpus(10);
    SplitSpec spec{SplitFractions{0.9, 0.0, 0.1}, SplitMode::contiguous};
    CorpusSplit split = split_corpus(c, spec, 0);
    CHECK(split.training.sentences.size() == 9);
    CHECK(split.clustering.sentences.empty());
    CHECK(split.testing.sentences.size() == 1);
}

TEST_CASE("shuffled splits are deterministic per seed") {
    Corpus c = numbered_corpus(50);
    SplitSpec spec{SplitFractions{0.6, 0.2, 0.2}, SplitMode::shuffled};
    CorpusSplit first = split_corpus(c, spec, 42);
    CorpusSplit second = split_corpus(c, spec, 42);
    CHECK(serialize_str(first.training) == serialize_str(second.training));
    CHECK(serialize_str(first.clustering) == serialize_str(second.clustering));
    CHECK(serialize_str(first.testing) == serialize_str(second.testing));

    CorpusSplit other = split_corpus(c, spec, 43);
    CHECK(serialize_str(first.training) != serialize_str(other.training));
}

TEST_CASE("split parts are disjoint and the union plus discard is the source") {
    Corpus c = numbered_corpus(23);
    SplitSpec spec{SplitFractions{0.5, 0.25, 0.2}, SplitMode::shuffled};
    CorpusSplit split = split_corpus(c, spec, 9);
    CHECK(split.training.sentences.size() == 11);
    CHECK(split.clustering.sentences.size() == 5);
    CHECK(split.testing.sentences.size() == 4);
    auto all = sentence_multiset(split.training);
    auto clustering = sentence_multiset(split.clustering);
    auto testing = sentence_multiset(split.testing);
    all.insert(clustering.begin(), clustering.end());
    all.insert(testing.begin(), testing.end());
    auto source = sentence_multiset(c);
    CHECK(all.size() == 20);
    // Every drawn sentence exists in the source; the numbered corpus has
    // unique sentences so this also proves pairwise disjointness.
    for (const auto& s : all) CHECK(source.count(s) == 1);
    CHECK(std::set<std::string>(all.begin(), all.end()).size() == all.size());
}

TEST_CASE("fraction sum above one is a configuration error") {
    Corpus c = numbered_corpus(4);
    SplitSpec spec{SplitFractions{0.8, 0.3, 0.1}, SplitMode::contiguous};
    CHECK_THROWS_AS(split_corpus(c, spec, 0), ConfigError);
}

TEST_CASE("explicit ranges select exact sentence blocks") {
    Corpus c = numbered_corpus(10);
    SplitRanges ranges{{0, 6}, {6, 8}, {8, 10}};
    SplitSpec spec{ranges, SplitMode::contiguous};
    CorpusSplit split = split_corpus(c, spec, 0);
    CHECK(split.training.sentences.size() == 6);
    CHECK(split.clustering.sentences.size() == 2);
    CHECK(split.testing.sentences.size() == 2);

    SplitRanges overlapping{{0, 6}, {5, 8}, {8, 10}};
    CHECK_THROWS_AS(split_corpus(c, SplitSpec{overlapping, SplitMode::contiguous}, 0),
                    ConfigError);
    SplitRanges outside{{0, 6}, {6, 8}, {8, 12}};
    CHECK_THROWS_AS(split_corpus(c, SplitSpec{outside, SplitMode::contiguous}, 0), ConfigError);
}

TEST_CASE("concat requires matching tagsets and preserves order") {
    Corpus a = parse_str("x\tA\n\n");
    Corpus b = parse_str("y\tA\n\nz\tA\n\n");
    Corpus joined = concat(a, b);
    CHECK(joined.sentences.size() == 3);
    CHECK(joined.sentences[0].tokens[0].word == "x");

    Corpus other = parse_str("y\tB\n\n");
    CHECK_THROWS_AS(concat(a, other), Error);
}

TEST_CASE("the parser survives arbitrary byte soup") {
    Rng rng(99);
    const char alphabet[] = {'a', 'B', '\t', '\n', '#', ' ', '<', '>', '/', 's', ','};
    for (int round = 0; round < 300; ++round) {
        std::string junk;
        std::size_t len = rng.below(60);
        for (std::size_t i = 0; i < len; ++i) junk += alphabet[rng.below(sizeof(alphabet))];
        try {
            Corpus c = parse_str(junk);
            CHECK(!c.sentences.empty());  // success implies at least one sentence
        } catch (const Error&) {
            // rejected input is the other valid outcome
        }
    }
}

TEST_CASE("read_plain_sentences ignores annotations and comments") {
    std::istringstream in("the\nold\tX\ncliff\n\n# note\neasier\n");
    auto sentences = read_plain_sentences(in);
    REQUIRE(sentences.size() == 2);
    CHECK(sentences[0] == std::vector<std::string>{"the", "old", "cliff"});
    CHECK(sentences[1] == std::vector<std::string>{"easier"});
}
