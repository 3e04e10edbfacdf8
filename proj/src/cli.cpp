#include "clustag/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "clustag/clustering.hpp"
#include "clustag/corpus.hpp"
#include "clustag/errors.hpp"
#include "clustag/eval.hpp"
#include "clustag/lexicon.hpp"
#include "clustag/model.hpp"
#include "clustag/synthetic.hpp"
#include "clustag/tagger.hpp"
#include "clustag/tagset.hpp"
#include "clustag/util.hpp"

namespace clustag {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open output file: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open input file: " + path);
    return in;
}

SplitSpec make_split_spec(const std::string& fractions, const std::string& ranges,
                          const std::string& mode) {
    SplitSpec spec;
    if (!ranges.empty()) {
        auto parts = split_on(ranges, ',');
        if (parts.size() != 3) throw ConfigError("--split-ranges needs three begin:end ranges");
        SplitRanges r;
        SplitRanges::Range* slots[3] = {&r.training, &r.clustering, &r.testing};
        for (int i = 0; i < 3; ++i) {
            auto bounds = split_on(trim(parts[i]), ':');
            if (bounds.size() != 2) throw ConfigError("range must be begin:end");
            slots[i]->begin = std::stoull(std::string(trim(bounds[0])));
            slots[i]->end = std::stoull(std::string(trim(bounds[1])));
        }
        spec.parts = r;
    } else if (!fractions.empty()) {
        auto parts = split_on(fractions, ',');
        if (parts.size() != 3) throw ConfigError("--split needs three fractions");
        SplitFractions f;
        f.training = std::stod(std::string(trim(parts[0])));
        f.clustering = std::stod(std::string(trim(parts[1])));
        f.testing = std::stod(std::string(trim(parts[2])));
        spec.parts = f;
    }
    if (mode == "shuffled") {
        spec.mode = SplitMode::shuffled;
    } else if (mode == "contiguous" || mode.empty()) {
        spec.mode = SplitMode::contiguous;
    } else {
        throw ConfigError("--split-mode is contiguous or shuffled");
    }
    return spec;
}

struct SplitArgs {
    std::string corpus, out_prefix;
    std::string fractions, ranges, mode;
    std::uint64_t seed = 0;
};

int cmd_split(const SplitArgs& args) {
    if (args.fractions.empty() && args.ranges.empty())
        throw ConfigError("pass --split fractions or --split-ranges");
    Corpus corpus = parse_corpus_file(args.corpus);
    SplitSpec spec = make_split_spec(args.fractions, args.ranges, args.mode);
    CorpusSplit split = split_corpus(corpus, spec, args.seed);
    struct Part {
        const Corpus* corpus;
        const char* suffix;
    };
    const Part parts[3] = {{&split.training, ".train"},
                           {&split.clustering, ".cluster"},
                           {&split.testing, ".test"}};
    for (const Part& part : parts) {
        auto out = open_out(args.out_prefix + part.suffix);
        serialize_corpus(*part.corpus, out);
    }
    std::cout << "sentences: train " << split.training.sentences.size() << ", cluster "
              << split.clustering.sentences.size() << ", test "
              << split.testing.sentences.size() << " (of " << corpus.sentences.size() << ")\n";
    return 0;
}

struct TrainArgs {
    std::string corpus, out, lexicon_out;
    bool lowercase = false;
};

int cmd_train(const TrainArgs& args) {
    Corpus corpus = parse_corpus_file(args.corpus);
    TrigramModel model = TrigramModel::build(count_ngrams(corpus, nullptr, args.lowercase));
    auto out = open_out(args.out);
    model.dump(out);
    if (!args.lexicon_out.empty()) {
        auto lex_out = open_out(args.lexicon_out);
        Lexicon::build(corpus, args.lowercase).dump(lex_out);
    }
    return 0;
}

struct ClusterArgs {
    std::string train, part, map_out, trace_out;
    bool lowercase = false;
    bool strict = false;
    std::size_t max_merges = 0;
    int threads = 1;
};

int cmd_cluster(const ClusterArgs& args) {
    Corpus train_raw = parse_corpus_file(args.train);
    Corpus part_raw = parse_corpus_file(args.part);
    // Both parts must live in one tag space.
    auto tags = union_tagset(train_raw, part_raw);
    Corpus train = retag(train_raw, tags);
    Corpus part = retag(part_raw, tags);

    Lexicon lexicon = Lexicon::build(concat(train, part), args.lowercase);
    NgramCounts counts = count_ngrams(train, nullptr, args.lowercase);
    ClusterConfig config{args.strict, args.max_merges, args.threads};
    ClusterTrace trace = greedy_cluster(counts, part, lexicon, config);

    auto map_out = open_out(args.map_out);
    save_cluster_map(trace.final_clustering, map_out);
    if (!args.trace_out.empty()) {
        auto trace_out = open_out(args.trace_out);
        trace_out << trace_to_json(trace);
    }
    std::cout << "merges: " << trace.steps.size() << "  tagset: " << lexicon.tagset().size()
              << " -> " << trace.final_clustering.size()
              << "  clustering-part accuracy: " << trace.initial_accuracy << " -> "
              << trace.final_accuracy << "\n";
    return 0;
}

struct TagArgs {
    std::string model, clusters, lexicon, input, out;
    bool lowercase = false;
    bool show_clusters = false;
    bool verbose = false;
    std::size_t beam = 0;
    int threads = 1;
};

int cmd_tag(const TagArgs& args) {
    Corpus lexicon_source = parse_corpus_file(args.lexicon);
    Lexicon lexicon = Lexicon::build(lexicon_source, args.lowercase);

    auto model_in = open_in(args.model);
    TrigramModel model = TrigramModel::load(model_in, args.lowercase);

    std::shared_ptr<const Tagset> tags = lexicon_source.tagset;
    std::unique_ptr<ClusterTagset> clustering;
    if (!args.clusters.empty()) {
        auto map_in = open_in(args.clusters);
        clustering = std::make_unique<ClusterTagset>(load_cluster_map(map_in, tags, lexicon));
        // Tagging runs over the reduced labels; project the model onto them.
        model = TrigramModel::build(project_counts(model.counts(), *clustering));
    } else {
        clustering = std::make_unique<ClusterTagset>(identity_clustering(tags));
    }

    std::vector<std::vector<std::string>> sentences;
    if (args.input == "-") {
        sentences = read_plain_sentences(std::cin);
    } else {
        auto in = open_in(args.input);
        sentences = read_plain_sentences(in);
    }

    std::ostream* out = &std::cout;
    std::ofstream out_file;
    if (!args.out.empty()) {
        out_file = open_out(args.out);
        out = &out_file;
    }

    DecodeOptions opts{args.beam};
    std::vector<TagSequence> tagged =
        tag_sentences(sentences, model, *clustering, lexicon, args.threads, opts);
    for (std::size_t s = 0; s < sentences.size(); ++s) {
        const auto& words = sentences[s];
        const TagSequence& seq = tagged[s];
        for (std::size_t i = 0; i < words.size(); ++i) {
            *out << words[i] << '\t' << tags->name(seq.ids[i]);
            if (args.show_clusters)
                *out << '\t' << clustering->cluster(clustering->cluster_of(seq.ids[i])).display_name;
            if (args.verbose && seq.guessed[i]) *out << "\t#guess";
            *out << '\n';
        }
        *out << '\n';
    }
    return 0;
}

struct EvalArgs {
    std::string gold, pred, lexicon, out;
    bool lowercase = false;
};

int cmd_eval(const EvalArgs& args) {
    Corpus gold = parse_corpus_file(args.gold);
    Corpus pred_raw = parse_corpus_file(args.pred);
    Corpus lexicon_source = parse_corpus_file(args.lexicon);
    Lexicon lexicon = Lexicon::build(lexicon_source, args.lowercase);

    // Gold and predictions are compared in one tag space; the lexicon only
    // decides which words count as known.
    auto tags = union_tagset(gold, pred_raw);
    gold = retag(gold, tags);
    Corpus pred = retag(pred_raw, tags);

    if (pred.sentences.size() != gold.sentences.size())
        throw Error("prediction/gold sentence count mismatch");
    std::vector<TagSequence> predicted(pred.sentences.size());
    for (std::size_t i = 0; i < pred.sentences.size(); ++i) {
        const auto& tokens = pred.sentences[i].tokens;
        predicted[i].guessed.assign(tokens.size(), false);
        for (const TaggedToken& tok : tokens) predicted[i].ids.push_back(tok.tag);
    }

    EvalReport report = accuracy(gold, predicted, lexicon);
    std::string json = report_to_json(report, *gold.tagset);
    if (args.out.empty()) {
        std::cout << json;
    } else {
        open_out(args.out) << json;
    }
    return 0;
}

struct ExperimentArgs {
    std::string config, out_dir;
};

int cmd_experiment(const ExperimentArgs& args) {
    auto config_in = open_in(args.config);
    ExperimentSetup setup = parse_experiment_config(config_in);
    if (setup.corpus_path.empty()) throw ConfigError("config sets no corpus path");
    Corpus corpus = parse_corpus_file(setup.corpus_path);
    std::vector<ExperimentResult> results = run_experiments(setup, corpus);

    std::string prefix = args.out_dir.empty() ? "." : args.out_dir;
    for (const ExperimentResult& r : results) {
        open_out(prefix + "/" + r.name + ".report.json")
            << report_to_json(r.report, *corpus.tagset);
        if (r.trace) {
            open_out(prefix + "/" + r.name + ".trace.json") << trace_to_json(*r.trace);
            auto map_out = open_out(prefix + "/" + r.name + ".clusters");
            save_cluster_map(r.trace->final_clustering, map_out);
        }
    }
    std::cout << experiments_summary_json(results);
    return 0;
}

struct GenArgs {
    std::string out;
    std::size_t tags = 20, pairs = 3, vocab = 2000, sentences = 5000;
    std::size_t min_len = 5, max_len = 12;
    double ambiguous = 0.25;
    std::uint64_t seed = 1;
};

int cmd_gen_synthetic(const GenArgs& args) {
    SyntheticSpec spec;
    spec.num_tags = args.tags;
    spec.planted_pairs = args.pairs;
    spec.vocab_size = args.vocab;
    spec.num_sentences = args.sentences;
    spec.min_sentence_len = args.min_len;
    spec.max_sentence_len = args.max_len;
    spec.ambiguous_fraction = args.ambiguous;
    spec.seed = args.seed;
    Corpus corpus = gen_synthetic(spec);
    if (args.out.empty() || args.out == "-") {
        serialize_corpus(corpus, std::cout);
    } else {
        auto out = open_out(args.out);
        serialize_corpus(corpus, out);
    }
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& argv) {
    CLI::App app{"Trigram POS tagging with restorable tagset reduction"};
    app.require_subcommand(1);

    SplitArgs split_args;
    auto* split = app.add_subcommand("split", "Split a corpus into train/cluster/test parts");
    split->add_option("corpus", split_args.corpus, "Tagged corpus to split")->required();
    split->add_option("-o,--out-prefix", split_args.out_prefix,
                      "Prefix for the .train/.cluster/.test files")
        ->required();
    split->add_option("--split", split_args.fractions, "Part fractions, e.g. 0.8,0.1,0.1");
    split->add_option("--split-ranges", split_args.ranges,
                      "Explicit sentence ranges, e.g. 0:800,800:900,900:1000");
    split->add_option("--split-mode", split_args.mode, "contiguous (default) or shuffled");
    split->add_option("--seed", split_args.seed, "Shuffle seed");

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "Count tag n-grams and write a model file");
    train->add_option("corpus", train_args.corpus, "Tagged corpus (word<TAB>tag lines)")
        ->required();
    train->add_option("-o,--out", train_args.out, "Model output path")->required();
    train->add_option("--dump-lexicon", train_args.lexicon_out,
                      "Also write the word/tag/count lexicon");
    train->add_flag("--lowercase", train_args.lowercase, "Fold words to lowercase");

    ClusterArgs cluster_args;
    auto* cluster =
        app.add_subcommand("cluster", "Reduce the tagset against a held-out clustering part");
    cluster->add_option("train", cluster_args.train, "Training corpus")->required();
    cluster->add_option("part", cluster_args.part, "Clustering part corpus")->required();
    cluster->add_option("-m,--map", cluster_args.map_out, "Cluster map output path")->required();
    cluster->add_option("-t,--trace", cluster_args.trace_out, "Merge trace JSON output path");
    cluster->add_flag("--lowercase", cluster_args.lowercase, "Fold words to lowercase");
    cluster->add_flag("--strict-improvement", cluster_args.strict,
                      "Only commit merges that strictly increase accuracy");
    cluster->add_option("--max-merges", cluster_args.max_merges, "Stop after N merges (0 = off)");
    cluster->add_option("--threads", cluster_args.threads, "Parallel candidate evaluations");

    TagArgs tag_args;
    auto* tag = app.add_subcommand("tag", "Tag text, restoring original tags");
    tag->add_option("input", tag_args.input, "Sentences to tag (- for stdin)")->required();
    tag->add_option("--model", tag_args.model, "Model file from train")->required();
    tag->add_option("--lexicon", tag_args.lexicon, "Tagged corpus the lexicon is built from")
        ->required();
    tag->add_option("--clusters", tag_args.clusters, "Cluster map (omit for plain tagging)");
    tag->add_option("-o,--out", tag_args.out, "Tagged output path (default stdout)");
    tag->add_flag("--lowercase", tag_args.lowercase, "Fold words to lowercase");
    tag->add_flag("--show-clusters", tag_args.show_clusters, "Append the cluster of each tag");
    tag->add_flag("-v,--verbose", tag_args.verbose, "Mark unknown-word guesses with #guess");
    tag->add_option("--beam", tag_args.beam, "Beam width (0 = exact)");
    tag->add_option("--threads", tag_args.threads, "Decoder threads");

    EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval", "Score a tagged file against gold annotations");
    eval->add_option("--gold", eval_args.gold, "Gold corpus")->required();
    eval->add_option("--pred", eval_args.pred, "Predicted corpus")->required();
    eval->add_option("--lexicon", eval_args.lexicon, "Corpus defining known words")->required();
    eval->add_option("-o,--out", eval_args.out, "Report JSON path (default stdout)");
    eval->add_flag("--lowercase", eval_args.lowercase, "Fold words to lowercase");

    ExperimentArgs experiment_args;
    auto* experiment = app.add_subcommand("experiment", "Run configured experiment rows");
    experiment->add_option("config", experiment_args.config, "INI-style experiment config")
        ->required();
    experiment->add_option("-d,--out-dir", experiment_args.out_dir,
                           "Directory for per-experiment outputs (default .)");

    GenArgs gen_args;
    auto* gen = app.add_subcommand("gen-synthetic", "Emit a planted-redundancy corpus");
    gen->add_option("-o,--out", gen_args.out, "Output path (default stdout)");
    gen->add_option("--tags", gen_args.tags, "Tagset size");
    gen->add_option("--pairs", gen_args.pairs, "Planted redundant pairs");
    gen->add_option("--vocab", gen_args.vocab, "Vocabulary size");
    gen->add_option("--sentences", gen_args.sentences, "Sentence count");
    gen->add_option("--min-len", gen_args.min_len, "Minimum sentence length");
    gen->add_option("--max-len", gen_args.max_len, "Maximum sentence length");
    gen->add_option("--ambiguous", gen_args.ambiguous, "Fraction of words with a second tag");
    gen->add_option("--seed", gen_args.seed, "Generator seed");

    std::vector<std::string> args = argv;
    std::reverse(args.begin(), args.end());  // CLI11 parses right-to-left
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (split->parsed()) return cmd_split(split_args);
        if (train->parsed()) return cmd_train(train_args);
        if (cluster->parsed()) return cmd_cluster(cluster_args);
        if (tag->parsed()) return cmd_tag(tag_args);
        if (eval->parsed()) return cmd_eval(eval_args);
        if (experiment->parsed()) return cmd_experiment(experiment_args);
        if (gen->parsed()) return cmd_gen_synthetic(gen_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace clustag
