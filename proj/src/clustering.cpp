#include "clustag/clustering.hpp"

#include <algorithm>
#include <thread>

#include "clustag/errors.hpp"
#include "clustag/tagger.hpp"

namespace clustag {

namespace {

double known_accuracy_fraction(const Corpus& gold, const std::vector<TagSequence>& predicted,
                               const Lexicon& lexicon) {
    std::size_t known = 0, correct = 0;
    for (std::size_t i = 0; i < gold.sentences.size(); ++i) {
        const auto& tokens = gold.sentences[i].tokens;
        for (std::size_t k = 0; k < tokens.size(); ++k) {
            if (!lexicon.is_known(tokens[k].word)) continue;
            ++known;
            if (predicted[i].ids[k] == tokens[k].tag) ++correct;
        }
    }
    if (known == 0) throw Error("no known tokens in the clustering part");
    return static_cast<double>(correct) / static_cast<double>(known);
}

}  // namespace

std::vector<std::pair<std::uint32_t, std::uint32_t>> candidate_pairs(
    const ClusterTagset& clustering, const Lexicon& lexicon) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    const std::uint32_t n = static_cast<std::uint32_t>(clustering.size());
    for (std::uint32_t a = 0; a < n; ++a) {
        for (std::uint32_t b = a + 1; b < n; ++b) {
            bool ok = true;
            for (TagId ta : clustering.cluster(a).members) {
                for (TagId tb : clustering.cluster(b).members) {
                    if (lexicon.conflict(ta, tb)) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) break;
            }
            if (ok) pairs.emplace_back(a, b);
        }
    }
    std::sort(pairs.begin(), pairs.end(), [&](const auto& x, const auto& y) {
        const std::string& xa = clustering.cluster(x.first).display_name;
        const std::string& xb = clustering.cluster(x.second).display_name;
        const std::string& ya = clustering.cluster(y.first).display_name;
        const std::string& yb = clustering.cluster(y.second).display_name;
        const auto& xk = std::minmax(xa, xb);
        const auto& yk = std::minmax(ya, yb);
        if (xk.first != yk.first) return xk.first < yk.first;
        return xk.second < yk.second;
    });
    return pairs;
}

double evaluate_candidate(const NgramCounts& tag_counts, const ClusterTagset& merged,
                          const Corpus& clustering_part, const Lexicon& lexicon, int threads) {
    TrigramModel model = TrigramModel::build(project_counts(tag_counts, merged));
    std::vector<TagSequence> predicted =
        tag_corpus(clustering_part, model, merged, lexicon, threads);
    return known_accuracy_fraction(clustering_part, predicted, lexicon);
}

ClusterTrace greedy_cluster(const NgramCounts& tag_counts, const Corpus& clustering_part,
                            const Lexicon& lexicon, const ClusterConfig& config) {
    if (clustering_part.sentences.empty()) throw Error("clustering part is empty");

    ClusterTagset current = identity_clustering(lexicon.tagset_ptr());
    double current_accuracy =
        evaluate_candidate(tag_counts, current, clustering_part, lexicon, config.threads);

    ClusterTrace trace{current_accuracy, current_accuracy, {}, current};
    while (config.max_merges == 0 || trace.steps.size() < config.max_merges) {
        auto pairs = candidate_pairs(current, lexicon);
        if (pairs.empty()) break;

        // Candidate accuracies are independent; the commit decision below is
        // a pure reduction over (accuracy, candidate order), so the outcome
        // does not depend on evaluation order or thread count.
        std::vector<double> scores(pairs.size());
        auto eval_range = [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                ClusterTagset merged_set = merge(current, pairs[i].first, pairs[i].second, lexicon);
                scores[i] =
                    evaluate_candidate(tag_counts, merged_set, clustering_part, lexicon, 1);
            }
        };
        if (config.threads <= 1 || pairs.size() < 2) {
            eval_range(0, pairs.size());
        } else {
            const std::size_t workers =
                std::min<std::size_t>(static_cast<std::size_t>(config.threads), pairs.size());
            std::vector<std::thread> pool;
            pool.reserve(workers);
            for (std::size_t w = 0; w < workers; ++w) {
                pool.emplace_back(eval_range, pairs.size() * w / workers,
                                  pairs.size() * (w + 1) / workers);
            }
            for (auto& t : pool) t.join();
        }

        std::size_t best = 0;
        for (std::size_t i = 1; i < pairs.size(); ++i) {
            if (scores[i] > scores[best]) best = i;  // ties keep the name-smaller pair
        }

        bool accept = config.strict_improvement ? scores[best] > current_accuracy
                                                : scores[best] >= current_accuracy;
        if (!accept) break;

        MergeStep step;
        const Cluster& left = current.cluster(pairs[best].first);
        const Cluster& right = current.cluster(pairs[best].second);
        step.left = std::min(left.display_name, right.display_name);
        step.right = std::max(left.display_name, right.display_name);
        step.accuracy_before = current_accuracy;
        step.accuracy_after = scores[best];
        current = merge(current, pairs[best].first, pairs[best].second, lexicon);
        step.result = current.cluster(std::min(pairs[best].first, pairs[best].second)).display_name;
        step.tagset_size_after = current.size();
        trace.steps.push_back(std::move(step));
        current_accuracy = scores[best];
    }

    trace.final_accuracy = current_accuracy;
    trace.final_clustering = current;
    return trace;
}

}  // namespace clustag
