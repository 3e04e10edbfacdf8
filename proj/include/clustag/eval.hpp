#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "clustag/clustering.hpp"
#include "clustag/corpus.hpp"
#include "clustag/lexicon.hpp"
#include "clustag/tagger.hpp"

namespace clustag {

// Token-level scores. The headline metric covers known words only; the
// all-token figure includes unknown-word guesses and is not comparable to it.
struct EvalReport {
    std::size_t total_tokens = 0;
    std::size_t known_tokens = 0;
    std::size_t unknown_tokens = 0;
    std::size_t known_correct = 0;
    std::size_t all_correct = 0;
    double known_accuracy = 0.0;
    double unknown_rate = 0.0;
    double all_accuracy = 0.0;
    std::map<std::pair<TagId, TagId>, std::size_t> confusion;  // known tokens, (gold, predicted)
    std::size_t fallback_sentences = 0;
};

// Compares predictions with gold original tags; a token is known iff the
// lexicon has seen its word. Throws on alignment mismatch and when the gold
// part contains no known tokens.
EvalReport accuracy(const Corpus& gold, std::span<const TagSequence> predicted,
                    const Lexicon& lexicon);

struct McNemarResult {
    std::size_t only_first_correct = 0;
    std::size_t only_second_correct = 0;
    double statistic = 0.0;  // continuity-corrected chi-square, 1 dof
    double p_value = 1.0;
};

// Paired test on per-token correctness flags from two runs over the same
// gold tokens.
McNemarResult mcnemar(std::span<const std::uint8_t> first_correct,
                      std::span<const std::uint8_t> second_correct);
McNemarResult mcnemar_known(const Corpus& gold, std::span<const TagSequence> first,
                            std::span<const TagSequence> second, const Lexicon& lexicon);

// One experiment row: which split parts (letters A/B/C) play which role.
// Baseline rows leave cluster_parts empty (the spare part is typically folded
// into train_parts); clustered rows train on train_parts, cluster on
// cluster_parts and always emit restored original tags.
struct ExperimentSpec {
    std::string name;
    std::string train_parts;    // e.g. "AB"
    std::string cluster_parts;  // empty = baseline
    std::string test_parts;     // e.g. "C"
    ClusterConfig clustering;
};

struct ExperimentSetup {
    std::string corpus_path;
    SplitSpec split;
    std::uint64_t seed = 0;
    bool lowercase = false;
    int threads = 1;
    std::vector<ExperimentSpec> experiments;
};

// INI-style config: global "key = value" lines, then one [section] per
// experiment. See the README for the key inventory.
ExperimentSetup parse_experiment_config(std::istream& in);

struct ExperimentResult {
    std::string name;
    std::string mode;  // "baseline" or "clustered"
    std::string test_parts;
    std::string lexicon_parts;  // sorted train+cluster letters
    EvalReport report;
    std::optional<ClusterTrace> trace;
    std::size_t tagset_size_before = 0;
    std::size_t tagset_size_after = 0;
    std::vector<TagSequence> predictions;
    std::vector<std::uint8_t> known_correct_flags;  // per known token, test order
};

// Runs one experiment over already-resolved parts. cluster_part may be null
// (baseline). The lexicon is built from train + cluster parts.
ExperimentResult run_experiment(const Corpus& train, const Corpus* cluster_part,
                                const Corpus& test, bool lowercase,
                                const ClusterConfig& config, const std::string& name);

// Splits the corpus and runs every configured experiment.
std::vector<ExperimentResult> run_experiments(const ExperimentSetup& setup,
                                              const Corpus& corpus);

std::string report_to_json(const EvalReport& report, const Tagset& tags);
std::string trace_to_json(const ClusterTrace& trace);

// Per-run metrics plus McNemar comparisons between runs sharing a test part
// and a lexicon (e.g. a baseline row against its clustered counterpart).
std::string experiments_summary_json(const std::vector<ExperimentResult>& results);

}  // namespace clustag
