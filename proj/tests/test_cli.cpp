#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "clustag/cli.hpp"
#include "clustag/corpus.hpp"

using namespace clustag;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("clustag_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string repeat(const std::string& block, int times) {
    std::string out;
    for (int i = 0; i < times; ++i) out += block;
    return out;
}

const char* kTinyCorpus =
    "the\tAT\nold\tJJ\nrock\tNN\n\n"
    "the\tAT\nold\tJJ\ncliff\tNN\n\n"
    "easier\tJJR\n\n"
    "tallest\tJJT\n\n";

}  // namespace

TEST_CASE("gen-synthetic writes a deterministic parseable corpus") {
    TempDir tmp;
    std::vector<std::string> args{"gen-synthetic", "-o", tmp.file("syn.tags"),
                                  "--tags", "10", "--pairs", "2", "--vocab", "200",
                                  "--sentences", "60", "--seed", "9"};
    CHECK(run_cli(args) == 0);
    Corpus corpus = parse_corpus_file(tmp.file("syn.tags"));
    CHECK(corpus.tagset->size() == 10);
    CHECK(corpus.sentences.size() == 60);

    std::vector<std::string> again{"gen-synthetic", "-o", tmp.file("syn2.tags"),
                                   "--tags", "10", "--pairs", "2", "--vocab", "200",
                                   "--sentences", "60", "--seed", "9"};
    CHECK(run_cli(again) == 0);
    CHECK(read_file(tmp.file("syn.tags")) == read_file(tmp.file("syn2.tags")));
}

TEST_CASE("split cuts a corpus into three files") {
    TempDir tmp;
    std::string text;
    for (int i = 0; i < 10; ++i) text += "w" + std::to_string(i) + "\tT\n\n";
    write_file(tmp.file("c.tags"), text);
    CHECK(run_cli({"split", tmp.file("c.tags"), "-o", tmp.file("part"), "--split",
                   "0.8,0.1,0.1"}) == 0);
    CHECK(parse_corpus_file(tmp.file("part.train")).sentences.size() == 8);
    CHECK(parse_corpus_file(tmp.file("part.cluster")).sentences.size() == 1);
    CHECK(parse_corpus_file(tmp.file("part.test")).sentences.size() == 1);
}

TEST_CASE("train writes a model and rejects malformed corpora") {
    TempDir tmp;
    write_file(tmp.file("c.tags"), kTinyCorpus);
    CHECK(run_cli({"train", tmp.file("c.tags"), "-o", tmp.file("model")}) == 0);
    std::string model = read_file(tmp.file("model"));
    CHECK(model.find("TRI\t") != std::string::npos);
    CHECK(model.find("LAMBDA\t") != std::string::npos);

    CHECK(run_cli({"train", tmp.file("missing.tags"), "-o", tmp.file("m2")}) != 0);
    write_file(tmp.file("bad.tags"), "a\tAT\nbroken-line\n");
    CHECK(run_cli({"train", tmp.file("bad.tags"), "-o", tmp.file("m3")}) != 0);
}

TEST_CASE("tag restores original tags through a cluster map") {
    TempDir tmp;
    std::string corpus = repeat(kTinyCorpus, 4);
    write_file(tmp.file("c.tags"), corpus);
    write_file(tmp.file("map"), "AT\nJJ\nNN\nJJR,JJT\n");
    write_file(tmp.file("in.txt"), "easier\n\nthe\nold\ncliff\n");
    REQUIRE(run_cli({"train", tmp.file("c.tags"), "-o", tmp.file("model")}) == 0);

    CHECK(run_cli({"tag", tmp.file("in.txt"), "--model", tmp.file("model"), "--lexicon",
                   tmp.file("c.tags"), "--clusters", tmp.file("map"), "-o",
                   tmp.file("out.tags")}) == 0);
    std::string tagged = read_file(tmp.file("out.tags"));
    CHECK(tagged == "easier\tJJR\n\nthe\tAT\nold\tJJ\ncliff\tNN\n\n");

    SUBCASE("an identity map and no map agree") {
        write_file(tmp.file("id.map"), "AT\nJJ\nNN\nJJR\nJJT\n");
        CHECK(run_cli({"tag", tmp.file("in.txt"), "--model", tmp.file("model"), "--lexicon",
                       tmp.file("c.tags"), "--clusters", tmp.file("id.map"), "-o",
                       tmp.file("out_id.tags")}) == 0);
        CHECK(run_cli({"tag", tmp.file("in.txt"), "--model", tmp.file("model"), "--lexicon",
                       tmp.file("c.tags"), "-o", tmp.file("out_plain.tags")}) == 0);
        CHECK(read_file(tmp.file("out_id.tags")) == read_file(tmp.file("out_plain.tags")));
    }

    SUBCASE("rerunning is byte-identical") {
        CHECK(run_cli({"tag", tmp.file("in.txt"), "--model", tmp.file("model"), "--lexicon",
                       tmp.file("c.tags"), "--clusters", tmp.file("map"), "-o",
                       tmp.file("out2.tags")}) == 0);
        CHECK(read_file(tmp.file("out.tags")) == read_file(tmp.file("out2.tags")));
    }

    SUBCASE("verbose mode marks unknown-word guesses") {
        write_file(tmp.file("unk.txt"), "boulder\n");
        CHECK(run_cli({"tag", tmp.file("unk.txt"), "--model", tmp.file("model"), "--lexicon",
                       tmp.file("c.tags"), "-v", "-o", tmp.file("unk.tags")}) == 0);
        CHECK(read_file(tmp.file("unk.tags")).find("\t#guess") != std::string::npos);
    }

    SUBCASE("show-clusters appends the cluster column") {
        CHECK(run_cli({"tag", tmp.file("in.txt"), "--model", tmp.file("model"), "--lexicon",
                       tmp.file("c.tags"), "--clusters", tmp.file("map"), "--show-clusters",
                       "-o", tmp.file("out3.tags")}) == 0);
        CHECK(read_file(tmp.file("out3.tags")).find("easier\tJJR\t{JJR,JJT}") !=
              std::string::npos);
    }

    SUBCASE("a wide beam matches exact decoding") {
        CHECK(run_cli({"tag", tmp.file("in.txt"), "--model", tmp.file("model"), "--lexicon",
                       tmp.file("c.tags"), "--clusters", tmp.file("map"), "--beam", "1000",
                       "-o", tmp.file("out_beam.tags")}) == 0);
        CHECK(read_file(tmp.file("out_beam.tags")) == read_file(tmp.file("out.tags")));
    }

    SUBCASE("an inadmissible hand-edited map is rejected") {
        // cliff carries NN in the corpus; merging NN with AT is fine, but a
        // map that pairs two tags of one word must fail on load.
        write_file(tmp.file("c2.tags"), std::string(kTinyCorpus) + "cliff\tNP\n\n");
        REQUIRE(run_cli({"train", tmp.file("c2.tags"), "-o", tmp.file("model2")}) == 0);
        write_file(tmp.file("bad.map"), "AT\nJJ\nNN,NP\nJJR\nJJT\n");
        CHECK(run_cli({"tag", tmp.file("in.txt"), "--model", tmp.file("model2"), "--lexicon",
                       tmp.file("c2.tags"), "--clusters", tmp.file("bad.map")}) != 0);
    }
}

TEST_CASE("cluster emits a map and a trace") {
    TempDir tmp;
    REQUIRE(run_cli({"gen-synthetic", "-o", tmp.file("syn.tags"), "--tags", "10", "--pairs", "2",
                     "--vocab", "400", "--sentences", "1500", "--ambiguous", "0.2", "--seed",
                     "2"}) == 0);
    REQUIRE(run_cli({"split", tmp.file("syn.tags"), "-o", tmp.file("p"), "--split",
                     "0.8,0.2,0.0"}) == 0);
    CHECK(run_cli({"cluster", tmp.file("p.train"), tmp.file("p.cluster"), "-m",
                   tmp.file("out.map"), "-t", tmp.file("out.trace.json")}) == 0);

    std::string map = read_file(tmp.file("out.map"));
    CHECK(map.find(',') != std::string::npos);  // at least one non-singleton line
    auto trace = nlohmann::json::parse(read_file(tmp.file("out.trace.json")));
    CHECK(trace["steps"].size() >= 1);
    CHECK(trace["initial_accuracy"].is_number());

    SUBCASE("the emitted map reloads cleanly for tagging") {
        REQUIRE(run_cli({"train", tmp.file("p.train"), "-o", tmp.file("model")}) == 0);
        write_file(tmp.file("in.txt"), "w0000\nw0001\n");
        CHECK(run_cli({"tag", tmp.file("in.txt"), "--model", tmp.file("model"), "--lexicon",
                       tmp.file("p.train"), "--clusters", tmp.file("out.map"), "-o",
                       tmp.file("out.tags")}) == 0);
    }
}

TEST_CASE("cluster fails on an empty clustering part") {
    TempDir tmp;
    write_file(tmp.file("c.tags"), kTinyCorpus);
    write_file(tmp.file("empty.tags"), "");
    CHECK(run_cli({"cluster", tmp.file("c.tags"), tmp.file("empty.tags"), "-m",
                   tmp.file("out.map")}) != 0);
}

TEST_CASE("train output is byte-identical across reruns") {
    TempDir tmp;
    write_file(tmp.file("c.tags"), repeat(kTinyCorpus, 3));
    REQUIRE(run_cli({"train", tmp.file("c.tags"), "-o", tmp.file("m1")}) == 0);
    REQUIRE(run_cli({"train", tmp.file("c.tags"), "-o", tmp.file("m2")}) == 0);
    CHECK(read_file(tmp.file("m1")) == read_file(tmp.file("m2")));

    SUBCASE("the lexicon dump option writes the sorted lexicon") {
        REQUIRE(run_cli({"train", tmp.file("c.tags"), "-o", tmp.file("m3"), "--dump-lexicon",
                         tmp.file("lex")}) == 0);
        std::string lex = read_file(tmp.file("lex"));
        CHECK(lex.find("cliff\tNN\t3") != std::string::npos);
        CHECK(lex.find("easier\tJJR\t3") != std::string::npos);
    }
}

TEST_CASE("case folding applies across the whole pipeline") {
    TempDir tmp;
    write_file(tmp.file("c.tags"), repeat(kTinyCorpus, 4));
    write_file(tmp.file("in.txt"), "The\nOLD\ncliff\n");
    REQUIRE(run_cli({"train", tmp.file("c.tags"), "-o", tmp.file("model"), "--lowercase"}) == 0);
    CHECK(run_cli({"tag", tmp.file("in.txt"), "--model", tmp.file("model"), "--lexicon",
                   tmp.file("c.tags"), "--lowercase", "-v", "-o", tmp.file("out.tags")}) == 0);
    std::string tagged = read_file(tmp.file("out.tags"));
    // Folded forms are known, so nothing is guessed and case is preserved in
    // the output words.
    CHECK(tagged == "The\tAT\nOLD\tJJ\ncliff\tNN\n\n");
}

TEST_CASE("eval scores a prediction file") {
    TempDir tmp;
    write_file(tmp.file("gold.tags"), kTinyCorpus);
    write_file(tmp.file("pred.tags"), kTinyCorpus);
    CHECK(run_cli({"eval", "--gold", tmp.file("gold.tags"), "--pred", tmp.file("pred.tags"),
                   "--lexicon", tmp.file("gold.tags"), "-o", tmp.file("report.json")}) == 0);
    auto report = nlohmann::json::parse(read_file(tmp.file("report.json")));
    CHECK(report["known_accuracy"] == 1.0);
}

TEST_CASE("experiment runs a four-row protocol") {
    TempDir tmp;
    REQUIRE(run_cli({"gen-synthetic", "-o", tmp.file("syn.tags"), "--tags", "8", "--pairs", "2",
                     "--vocab", "200", "--sentences", "400", "--seed", "13"}) == 0);
    std::string config =
        "corpus = " + tmp.file("syn.tags") + "\n" +
        "split = 0.7,0.15,0.15\n"
        "seed = 1\n"
        "[exp1]\ntrain = A,B\ntest = C\n"
        "[exp2]\ntrain = A,C\ntest = B\n"
        "[exp3]\ntrain = A\ncluster = B\ntest = C\n"
        "[exp4]\ntrain = A\ncluster = C\ntest = B\n";
    write_file(tmp.file("config.ini"), config);
    fs::create_directories(tmp.file("out"));
    CHECK(run_cli({"experiment", tmp.file("config.ini"), "-d", tmp.file("out")}) == 0);

    for (const char* name : {"exp1", "exp2", "exp3", "exp4"}) {
        auto report = nlohmann::json::parse(
            read_file(tmp.file("out") + "/" + std::string(name) + ".report.json"));
        CHECK(report["known_tokens"].get<std::size_t>() > 0);
    }
    CHECK(fs::exists(tmp.file("out") + "/exp3.trace.json"));
    CHECK(fs::exists(tmp.file("out") + "/exp3.clusters"));
    CHECK(fs::exists(tmp.file("out") + "/exp4.clusters"));

    SUBCASE("bad fractions fail") {
        write_file(tmp.file("bad.ini"), "corpus = " + tmp.file("syn.tags") +
                                            "\nsplit = 0.9,0.9,0.1\n[e]\ntrain = A\ntest = C\n");
        CHECK(run_cli({"experiment", tmp.file("bad.ini"), "-d", tmp.file("out")}) != 0);
    }
}
