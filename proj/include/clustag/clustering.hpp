#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "clustag/corpus.hpp"
#include "clustag/lexicon.hpp"
#include "clustag/model.hpp"
#include "clustag/tagset.hpp"

namespace clustag {

struct MergeStep {
    std::string left;    // display names of the two merged clusters
    std::string right;
    std::string result;  // display name of the union
    double accuracy_before = 0.0;
    double accuracy_after = 0.0;
    std::size_t tagset_size_after = 0;
};

struct ClusterTrace {
    double initial_accuracy = 0.0;
    double final_accuracy = 0.0;
    std::vector<MergeStep> steps;
    ClusterTagset final_clustering;
};

struct ClusterConfig {
    bool strict_improvement = false;  // require accuracy_after > accuracy_before
    std::size_t max_merges = 0;       // 0 = unbounded
    int threads = 1;
};

// All unordered pairs of current clusters whose member union is admissible,
// as index pairs sorted by the pair of display names.
std::vector<std::pair<std::uint32_t, std::uint32_t>> candidate_pairs(
    const ClusterTagset& clustering, const Lexicon& lexicon);

// Known-word accuracy on the clustering part when tagging with the given
// (post-merge) tagset: projects the original-tagset counts onto it,
// re-estimates interpolation weights, decodes with restoration and compares
// against the gold original tags.
double evaluate_candidate(const NgramCounts& tag_counts, const ClusterTagset& merged,
                          const Corpus& clustering_part, const Lexicon& lexicon,
                          int threads = 1);

// Greedy best-first loop: starting from the identity clustering, repeatedly
// commits the admissible pair merge with the highest clustering-part
// accuracy; stops when every candidate strictly decreases accuracy (or, with
// strict_improvement, fails to increase it), when no admissible candidates
// remain, or at max_merges. Deterministic regardless of thread count.
ClusterTrace greedy_cluster(const NgramCounts& tag_counts, const Corpus& clustering_part,
                            const Lexicon& lexicon, const ClusterConfig& config);

}  // namespace clustag
