#include "clustag/eval.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <set>

#include <json.hpp>

#include "clustag/errors.hpp"

namespace clustag {

EvalReport accuracy(const Corpus& gold, std::span<const TagSequence> predicted,
                    const Lexicon& lexicon) {
    if (gold.sentences.size() != predicted.size())
        throw Error("prediction/gold sentence count mismatch");

    EvalReport report;
    for (std::size_t i = 0; i < gold.sentences.size(); ++i) {
        const auto& tokens = gold.sentences[i].tokens;
        if (tokens.size() != predicted[i].ids.size())
            throw Error("prediction/gold token count mismatch in sentence " + std::to_string(i));
        if (predicted[i].fallback) ++report.fallback_sentences;
        for (std::size_t k = 0; k < tokens.size(); ++k) {
            ++report.total_tokens;
            bool correct = predicted[i].ids[k] == tokens[k].tag;
            if (correct) ++report.all_correct;
            if (lexicon.is_known(tokens[k].word)) {
                ++report.known_tokens;
                if (correct) ++report.known_correct;
                ++report.confusion[{tokens[k].tag, predicted[i].ids[k]}];
            } else {
                ++report.unknown_tokens;
            }
        }
    }
    if (report.known_tokens == 0) throw Error("no known tokens");
    report.known_accuracy =
        static_cast<double>(report.known_correct) / static_cast<double>(report.known_tokens);
    report.unknown_rate =
        static_cast<double>(report.unknown_tokens) / static_cast<double>(report.total_tokens);
    report.all_accuracy =
        static_cast<double>(report.all_correct) / static_cast<double>(report.total_tokens);
    return report;
}

McNemarResult mcnemar(std::span<const std::uint8_t> first_correct,
                      std::span<const std::uint8_t> second_correct) {
    if (first_correct.size() != second_correct.size())
        throw Error("McNemar inputs are not aligned");
    McNemarResult r;
    for (std::size_t i = 0; i < first_correct.size(); ++i) {
        if (first_correct[i] && !second_correct[i]) ++r.only_first_correct;
        if (!first_correct[i] && second_correct[i]) ++r.only_second_correct;
    }
    const double b = static_cast<double>(r.only_first_correct);
    const double c = static_cast<double>(r.only_second_correct);
    if (b + c == 0.0) {
        r.statistic = 0.0;
        r.p_value = 1.0;
        return r;
    }
    const double diff = std::abs(b - c) - 1.0;
    r.statistic = diff > 0.0 ? diff * diff / (b + c) : 0.0;
    // Chi-square survival with one degree of freedom.
    r.p_value = std::erfc(std::sqrt(r.statistic / 2.0));
    return r;
}

namespace {

std::vector<std::uint8_t> known_flags(const Corpus& gold, std::span<const TagSequence> predicted,
                                      const Lexicon& lexicon) {
    std::vector<std::uint8_t> flags;
    for (std::size_t i = 0; i < gold.sentences.size(); ++i) {
        const auto& tokens = gold.sentences[i].tokens;
        for (std::size_t k = 0; k < tokens.size(); ++k) {
            if (!lexicon.is_known(tokens[k].word)) continue;
            flags.push_back(predicted[i].ids[k] == tokens[k].tag ? 1 : 0);
        }
    }
    return flags;
}

}  // namespace

McNemarResult mcnemar_known(const Corpus& gold, std::span<const TagSequence> first,
                            std::span<const TagSequence> second, const Lexicon& lexicon) {
    return mcnemar(known_flags(gold, first, lexicon), known_flags(gold, second, lexicon));
}

namespace {

bool parse_bool(std::string_view value, std::size_t lineno) {
    if (value == "true" || value == "yes" || value == "1") return true;
    if (value == "false" || value == "no" || value == "0") return false;
    throw ParseError(lineno, "expected a boolean, got \"" + std::string(value) + "\"");
}

std::string normalize_parts(std::string_view value, std::size_t lineno) {
    std::string letters;
    for (char c : value) {
        if (c == ',' || c == ' ') continue;
        if (c < 'A' || c > 'C') throw ParseError(lineno, "split parts are named A, B and C");
        letters.push_back(c);
    }
    std::sort(letters.begin(), letters.end());
    if (std::adjacent_find(letters.begin(), letters.end()) != letters.end())
        throw ParseError(lineno, "a part letter is repeated");
    return letters;
}

SplitFractions parse_fractions(std::string_view value, std::size_t lineno) {
    auto parts = split_on(value, ',');
    if (parts.size() != 3) throw ParseError(lineno, "split needs three fractions");
    SplitFractions out;
    double* slots[3] = {&out.training, &out.clustering, &out.testing};
    for (int i = 0; i < 3; ++i) {
        try {
            *slots[i] = std::stod(std::string(trim(parts[i])));
        } catch (const std::exception&) {
            throw ParseError(lineno, "bad split fraction");
        }
    }
    return out;
}

SplitRanges parse_ranges(std::string_view value, std::size_t lineno) {
    auto parts = split_on(value, ',');
    if (parts.size() != 3) throw ParseError(lineno, "split-ranges needs three begin:end ranges");
    SplitRanges out;
    SplitRanges::Range* slots[3] = {&out.training, &out.clustering, &out.testing};
    for (int i = 0; i < 3; ++i) {
        auto bounds = split_on(trim(parts[i]), ':');
        if (bounds.size() != 2) throw ParseError(lineno, "range must be begin:end");
        try {
            slots[i]->begin = std::stoull(std::string(trim(bounds[0])));
            slots[i]->end = std::stoull(std::string(trim(bounds[1])));
        } catch (const std::exception&) {
            throw ParseError(lineno, "bad range bound");
        }
    }
    return out;
}

}  // namespace

ExperimentSetup parse_experiment_config(std::istream& in) {
    ExperimentSetup setup;
    ExperimentSpec* current = nullptr;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view body = trim(line);
        if (body.empty() || body.front() == '#' || body.front() == ';') continue;
        if (body.front() == '[') {
            if (body.back() != ']') throw ParseError(lineno, "unterminated section header");
            std::string name(trim(body.substr(1, body.size() - 2)));
            if (name.empty()) throw ParseError(lineno, "empty section name");
            setup.experiments.push_back(ExperimentSpec{name, "", "", "", {}});
            current = &setup.experiments.back();
            continue;
        }
        std::size_t eq = body.find('=');
        if (eq == std::string_view::npos) throw ParseError(lineno, "expected key = value");
        std::string key(trim(body.substr(0, eq)));
        std::string value(trim(body.substr(eq + 1)));
        if (current == nullptr) {
            if (key == "corpus") {
                setup.corpus_path = value;
            } else if (key == "split") {
                setup.split.parts = parse_fractions(value, lineno);
            } else if (key == "split-ranges") {
                setup.split.parts = parse_ranges(value, lineno);
            } else if (key == "split-mode") {
                if (value == "contiguous") {
                    setup.split.mode = SplitMode::contiguous;
                } else if (value == "shuffled") {
                    setup.split.mode = SplitMode::shuffled;
                } else {
                    throw ParseError(lineno, "split-mode is contiguous or shuffled");
                }
            } else if (key == "seed") {
                try {
                    setup.seed = std::stoull(value);
                } catch (const std::exception&) {
                    throw ParseError(lineno, "bad seed");
                }
            } else if (key == "lowercase") {
                setup.lowercase = parse_bool(value, lineno);
            } else if (key == "threads") {
                try {
                    setup.threads = std::stoi(value);
                } catch (const std::exception&) {
                    throw ParseError(lineno, "bad thread count");
                }
            } else {
                throw ParseError(lineno, "unknown key \"" + key + "\"");
            }
            continue;
        }
        if (key == "train") {
            current->train_parts = normalize_parts(value, lineno);
        } else if (key == "cluster") {
            current->cluster_parts = normalize_parts(value, lineno);
        } else if (key == "test") {
            current->test_parts = normalize_parts(value, lineno);
        } else if (key == "strict-improvement") {
            current->clustering.strict_improvement = parse_bool(value, lineno);
        } else if (key == "max-merges") {
            try {
                current->clustering.max_merges = std::stoull(value);
            } catch (const std::exception&) {
                throw ParseError(lineno, "bad merge limit");
            }
        } else {
            throw ParseError(lineno, "unknown key \"" + key + "\"");
        }
    }
    if (setup.experiments.empty()) throw ConfigError("config defines no experiments");
    for (const ExperimentSpec& spec : setup.experiments) {
        if (spec.train_parts.empty())
            throw ConfigError("experiment " + spec.name + " assigns no train part");
        if (spec.test_parts.empty())
            throw ConfigError("experiment " + spec.name + " assigns no test part");
        std::string used = spec.train_parts + spec.cluster_parts + spec.test_parts;
        std::sort(used.begin(), used.end());
        if (std::adjacent_find(used.begin(), used.end()) != used.end())
            throw ConfigError("experiment " + spec.name + " uses a part in two roles");
    }
    return setup;
}

namespace {

Corpus resolve_parts(const CorpusSplit& split, const std::string& letters,
                     const std::shared_ptr<const Tagset>& tags) {
    Corpus out;
    out.tagset = tags;
    for (char c : letters) {
        const Corpus* part = c == 'A'   ? &split.training
                             : c == 'B' ? &split.clustering
                                        : &split.testing;
        out.sentences.insert(out.sentences.end(), part->sentences.begin(),
                             part->sentences.end());
    }
    return out;
}

}  // namespace

ExperimentResult run_experiment(const Corpus& train, const Corpus* cluster_part,
                                const Corpus& test, bool lowercase,
                                const ClusterConfig& config, const std::string& name) {
    ExperimentResult result;
    result.name = name;
    result.tagset_size_before = train.tagset->size();

    Lexicon lexicon = cluster_part != nullptr
                          ? Lexicon::build(concat(train, *cluster_part), lowercase)
                          : Lexicon::build(train, lowercase);

    if (cluster_part == nullptr) {
        result.mode = "baseline";
        result.tagset_size_after = result.tagset_size_before;
        TrigramModel model = TrigramModel::build(count_ngrams(train, nullptr, lowercase));
        ClusterTagset identity = identity_clustering(train.tagset);
        result.predictions = tag_corpus(test, model, identity, lexicon, config.threads);
    } else {
        result.mode = "clustered";
        NgramCounts tag_counts = count_ngrams(train, nullptr, lowercase);
        ClusterTrace trace = greedy_cluster(tag_counts, *cluster_part, lexicon, config);
        result.tagset_size_after = trace.final_clustering.size();
        TrigramModel reduced =
            TrigramModel::build(project_counts(tag_counts, trace.final_clustering));
        result.predictions =
            tag_corpus(test, reduced, trace.final_clustering, lexicon, config.threads);
        result.trace = std::move(trace);
    }

    result.report = accuracy(test, result.predictions, lexicon);
    result.known_correct_flags = known_flags(test, result.predictions, lexicon);
    return result;
}

std::vector<ExperimentResult> run_experiments(const ExperimentSetup& setup,
                                              const Corpus& corpus) {
    CorpusSplit split = split_corpus(corpus, setup.split, setup.seed);
    std::vector<ExperimentResult> results;
    results.reserve(setup.experiments.size());
    for (const ExperimentSpec& spec : setup.experiments) {
        Corpus train = resolve_parts(split, spec.train_parts, corpus.tagset);
        Corpus test = resolve_parts(split, spec.test_parts, corpus.tagset);
        ClusterConfig config = spec.clustering;
        if (config.threads <= 1) config.threads = setup.threads;
        ExperimentResult result;
        if (spec.cluster_parts.empty()) {
            result = run_experiment(train, nullptr, test, setup.lowercase, config, spec.name);
        } else {
            Corpus cluster_part = resolve_parts(split, spec.cluster_parts, corpus.tagset);
            result =
                run_experiment(train, &cluster_part, test, setup.lowercase, config, spec.name);
        }
        result.test_parts = spec.test_parts;
        std::string lex = spec.train_parts + spec.cluster_parts;
        std::sort(lex.begin(), lex.end());
        result.lexicon_parts = lex;
        results.push_back(std::move(result));
    }
    return results;
}

namespace {

nlohmann::ordered_json report_json_obj(const EvalReport& report, const Tagset& tags) {
    nlohmann::ordered_json j;
    j["total_tokens"] = report.total_tokens;
    j["known_tokens"] = report.known_tokens;
    j["unknown_tokens"] = report.unknown_tokens;
    j["known_correct"] = report.known_correct;
    j["known_accuracy"] = report.known_accuracy;
    j["unknown_rate"] = report.unknown_rate;
    j["all_tokens_accuracy"] = report.all_accuracy;
    j["all_tokens_accuracy_note"] =
        "includes unknown-word guesses; not comparable to known_accuracy";
    j["fallback_sentences"] = report.fallback_sentences;
    nlohmann::ordered_json confusion = nlohmann::ordered_json::array();
    for (const auto& [pair, count] : report.confusion) {
        nlohmann::ordered_json cell;
        cell["gold"] = tags.name(pair.first);
        cell["predicted"] = tags.name(pair.second);
        cell["count"] = count;
        confusion.push_back(std::move(cell));
    }
    j["confusion"] = std::move(confusion);
    return j;
}

}  // namespace

std::string report_to_json(const EvalReport& report, const Tagset& tags) {
    return report_json_obj(report, tags).dump(2) + "\n";
}

std::string trace_to_json(const ClusterTrace& trace) {
    nlohmann::ordered_json j;
    j["initial_accuracy"] = trace.initial_accuracy;
    j["final_accuracy"] = trace.final_accuracy;
    nlohmann::ordered_json steps = nlohmann::ordered_json::array();
    for (const MergeStep& step : trace.steps) {
        nlohmann::ordered_json s;
        s["merged"] = {step.left, step.right};
        s["result"] = step.result;
        s["accuracy_before"] = step.accuracy_before;
        s["accuracy_after"] = step.accuracy_after;
        s["tagset_size_after"] = step.tagset_size_after;
        steps.push_back(std::move(s));
    }
    j["steps"] = std::move(steps);
    return j.dump(2) + "\n";
}

std::string experiments_summary_json(const std::vector<ExperimentResult>& results) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json runs = nlohmann::ordered_json::array();
    for (const ExperimentResult& r : results) {
        nlohmann::ordered_json run;
        run["name"] = r.name;
        run["mode"] = r.mode;
        run["known_accuracy"] = r.report.known_accuracy;
        run["known_tokens"] = r.report.known_tokens;
        run["unknown_rate"] = r.report.unknown_rate;
        run["tagset_size_before"] = r.tagset_size_before;
        run["tagset_size_after"] = r.tagset_size_after;
        run["tagset_reduction"] = r.tagset_size_before - r.tagset_size_after;
        if (r.trace) run["merges"] = r.trace->steps.size();
        runs.push_back(std::move(run));
    }
    j["experiments"] = std::move(runs);

    // Paired comparisons are meaningful when two runs score the same test
    // tokens under the same lexicon. The test itself is a harness addition,
    // not part of the tagging pipeline.
    nlohmann::ordered_json comparisons = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < results.size(); ++i) {
        for (std::size_t k = i + 1; k < results.size(); ++k) {
            const ExperimentResult& a = results[i];
            const ExperimentResult& b = results[k];
            if (a.test_parts != b.test_parts || a.lexicon_parts != b.lexicon_parts) continue;
            if (a.known_correct_flags.size() != b.known_correct_flags.size()) continue;
            McNemarResult m = mcnemar(a.known_correct_flags, b.known_correct_flags);
            nlohmann::ordered_json cmp;
            cmp["first"] = a.name;
            cmp["second"] = b.name;
            cmp["only_first_correct"] = m.only_first_correct;
            cmp["only_second_correct"] = m.only_second_correct;
            cmp["mcnemar_statistic"] = m.statistic;
            cmp["mcnemar_p_value"] = m.p_value;
            comparisons.push_back(std::move(cmp));
        }
    }
    j["mcnemar_comparisons"] = std::move(comparisons);
    return j.dump(2) + "\n";
}

}  // namespace clustag
