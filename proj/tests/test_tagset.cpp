#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "clustag/corpus.hpp"
#include "clustag/errors.hpp"
#include "clustag/lexicon.hpp"
#include "clustag/tagset.hpp"
#include "oracles.hpp"

using namespace clustag;

namespace {

Corpus parse_str(const std::string& text) {
    std::istringstream in(text);
    return parse_corpus(in);
}

// cliff is both NP and NN; easier is JJR only; tallest is JJT only.
const char* kLobishCorpus =
    "the\tAT\nwise\tJJ\nCliff\tNP\n\n"
    "a\tAT\nsheer\tJJ\ncliff\tNN\n\n"
    "Cliff\tNN\n\n"
    "easier\tJJR\n\ntallest\tJJT\n\n";

struct Fixture {
    Corpus corpus = parse_str(kLobishCorpus);
    Lexicon lexicon = Lexicon::build(corpus, true);  // lowercase: Cliff == cliff
    TagId at, jj, np, nn, jjr, jjt;

    Fixture() {
        at = *corpus.tagset->find("AT");
        jj = *corpus.tagset->find("JJ");
        np = *corpus.tagset->find("NP");
        nn = *corpus.tagset->find("NN");
        jjr = *corpus.tagset->find("JJR");
        jjt = *corpus.tagset->find("JJT");
    }
};

}  // namespace

TEST_CASE("identity clustering makes one singleton per tag") {
    auto tags = std::make_shared<Tagset>();
    tags->intern("AT");
    tags->intern("NN");
    tags->intern("JJ");
    ClusterTagset identity = identity_clustering(tags);
    REQUIRE(identity.size() == 3);
    CHECK(identity.cluster(0).display_name == "AT");
    CHECK(identity.cluster(1).display_name == "NN");
    CHECK(identity.cluster(2).display_name == "JJ");
    CHECK(identity.is_identity());
}

TEST_CASE("identity clustering of an empty tagset is empty") {
    ClusterTagset identity = identity_clustering(std::make_shared<Tagset>());
    CHECK(identity.size() == 0);
}

TEST_CASE("identity clustering scales to a Susanne-sized tagset") {
    auto tags = std::make_shared<Tagset>();
    for (int i = 0; i < 424; ++i) tags->intern("G" + std::to_string(i));
    ClusterTagset identity = identity_clustering(tags);
    CHECK(identity.size() == 424);
    for (TagId t = 0; t < 424; ++t) CHECK(identity.cluster_of(t) == t);
}

TEST_CASE("admissibility follows the shared-word relation") {
    Fixture f;
    SUBCASE("comparative and superlative share no word") {
        TagId cand[] = {f.jjr, f.jjt};
        CHECK(cluster_admissible(cand, f.lexicon));
    }
    SUBCASE("cliff blocks NP with NN") {
        TagId cand[] = {f.np, f.nn};
        CHECK_FALSE(cluster_admissible(cand, f.lexicon));
    }
    SUBCASE("singletons are always admissible") {
        for (TagId t = 0; t < f.corpus.tagset->size(); ++t) {
            TagId cand[] = {t};
            CHECK(cluster_admissible(cand, f.lexicon));
        }
    }
}

TEST_CASE("admissibility is monotone decreasing under union") {
    auto corpus = oracles::random_corpus({.num_tags = 8, .vocab = 25, .sentences = 40, .seed = 3});
    Lexicon lexicon = Lexicon::build(corpus, false);
    Rng rng(11);
    for (int round = 0; round < 200; ++round) {
        std::vector<TagId> base;
        for (TagId t = 0; t < corpus.tagset->size(); ++t) {
            if (rng.unit() < 0.4) base.push_back(t);
        }
        if (base.size() < 2) continue;
        if (cluster_admissible(base, lexicon)) continue;
        std::vector<TagId> super = base;
        for (TagId t = 0; t < corpus.tagset->size(); ++t) {
            if (std::find(super.begin(), super.end(), t) == super.end() && rng.unit() < 0.5)
                super.push_back(t);
        }
        CHECK_FALSE(cluster_admissible(super, lexicon));
    }
}

TEST_CASE("merge unites two clusters and leaves the rest alone") {
    Fixture f;
    ClusterTagset identity = identity_clustering(f.corpus.tagset);
    std::uint32_t a = identity.cluster_of(f.jjr);
    std::uint32_t b = identity.cluster_of(f.jjt);
    ClusterTagset merged = merge(identity, a, b, f.lexicon);

    CHECK(merged.size() == identity.size() - 1);
    const Cluster& joined = merged.cluster(merged.cluster_of(f.jjr));
    CHECK(joined.display_name == "{JJR,JJT}");
    CHECK(joined.contains(f.jjt));
    // The input is untouched and every other cluster is carried over.
    CHECK(identity.size() == f.corpus.tagset->size());
    for (TagId t = 0; t < f.corpus.tagset->size(); ++t) {
        if (t == f.jjr || t == f.jjt) continue;
        CHECK(merged.cluster(merged.cluster_of(t)).members ==
              identity.cluster(identity.cluster_of(t)).members);
    }
}

TEST_CASE("merge rejects self-merges and inadmissible unions") {
    Fixture f;
    ClusterTagset identity = identity_clustering(f.corpus.tagset);
    CHECK_THROWS_AS(merge(identity, 1, 1, f.lexicon), Error);

    std::uint32_t a = identity.cluster_of(f.np);
    std::uint32_t b = identity.cluster_of(f.nn);
    CHECK_THROWS_AS(merge(identity, a, b, f.lexicon), ConstraintError);
    try {
        merge(identity, a, b, f.lexicon);
    } catch (const ConstraintError& e) {
        CHECK(std::string(e.what()).find("cliff") != std::string::npos);  // witness word
    }
}

TEST_CASE("clusters grow transitively across merges") {
    Fixture f;
    ClusterTagset identity = identity_clustering(f.corpus.tagset);
    ClusterTagset two = merge(identity, identity.cluster_of(f.jjr), identity.cluster_of(f.jjt),
                              f.lexicon);
    std::uint32_t pair_index = two.cluster_of(f.jjr);
    std::uint32_t at_index = two.cluster_of(f.at);
    ClusterTagset three = merge(two, pair_index, at_index, f.lexicon);
    const Cluster& grown = three.cluster(three.cluster_of(f.at));
    CHECK(grown.members.size() == 3);
    CHECK(grown.display_name == "{AT,JJR,JJT}");
}

TEST_CASE("every operation preserves the partition property") {
    auto corpus = oracles::random_corpus({.num_tags = 10, .vocab = 60, .sentences = 60, .seed = 5});
    Lexicon lexicon = Lexicon::build(corpus, false);
    ClusterTagset current = identity_clustering(corpus.tagset);
    Rng rng(17);
    for (int round = 0; round < 30 && current.size() > 1; ++round) {
        std::uint32_t a = static_cast<std::uint32_t>(rng.below(current.size()));
        std::uint32_t b = static_cast<std::uint32_t>(rng.below(current.size()));
        if (a == b) continue;
        std::vector<TagId> united = current.cluster(a).members;
        united.insert(united.end(), current.cluster(b).members.begin(),
                      current.cluster(b).members.end());
        if (!cluster_admissible(united, lexicon)) continue;
        current = merge(current, a, b, lexicon);
        // Partition: each tag in exactly one cluster (the constructor throws
        // otherwise); double-check via the reverse map.
        std::vector<int> seen(corpus.tagset->size(), 0);
        for (const Cluster& c : current.clusters()) {
            for (TagId t : c.members) ++seen[t];
        }
        CHECK(std::all_of(seen.begin(), seen.end(), [](int n) { return n == 1; }));
    }
}

TEST_CASE("restore_original recovers the unique member tag") {
    Fixture f;
    SUBCASE("easier in {JJR,JJT} must be JJR") {
        Cluster pair = make_cluster({f.jjr, f.jjt}, *f.corpus.tagset);
        CHECK(restore_original("easier", pair, f.lexicon) == f.jjr);
    }
    SUBCASE("singleton clusters restore trivially") {
        Cluster single = make_cluster({f.nn}, *f.corpus.tagset);
        CHECK(restore_original("cliff", single, f.lexicon) == f.nn);
    }
    SUBCASE("an inadmissible cluster is reported, not guessed") {
        Cluster bad = make_cluster({f.np, f.nn}, *f.corpus.tagset);
        CHECK_THROWS_AS(restore_original("cliff", bad, f.lexicon), ConstraintError);
    }
    SUBCASE("unknown words cannot be restored") {
        Cluster pair = make_cluster({f.jjr, f.jjt}, *f.corpus.tagset);
        CHECK_THROWS_AS(restore_original("unseen", pair, f.lexicon), UnknownWordError);
    }
    SUBCASE("a cluster without any of the word's tags is an inconsistency") {
        Cluster pair = make_cluster({f.jjr, f.jjt}, *f.corpus.tagset);
        CHECK_THROWS_AS(restore_original("cliff", pair, f.lexicon), InconsistencyError);
    }
}

TEST_CASE("restoration is lossless for every admissible clustering") {
    auto corpus = oracles::random_corpus({.num_tags = 12, .vocab = 80, .sentences = 80, .seed = 23});
    Lexicon lexicon = Lexicon::build(corpus, false);
    Rng rng(29);
    for (int round = 0; round < 10; ++round) {
        // Random admissible clustering via random greedy merges.
        ClusterTagset clustering = identity_clustering(corpus.tagset);
        for (int tries = 0; tries < 40 && clustering.size() > 2; ++tries) {
            std::uint32_t a = static_cast<std::uint32_t>(rng.below(clustering.size()));
            std::uint32_t b = static_cast<std::uint32_t>(rng.below(clustering.size()));
            if (a == b) continue;
            std::vector<TagId> united = clustering.cluster(a).members;
            united.insert(united.end(), clustering.cluster(b).members.begin(),
                          clustering.cluster(b).members.end());
            if (!cluster_admissible(united, lexicon)) continue;
            clustering = merge(clustering, a, b, lexicon);
        }
        for (WordId w = 0; w < lexicon.vocab().size(); ++w) {
            for (const TagCount& tc : lexicon.tags_of(w)) {
                const Cluster& c = clustering.cluster(clustering.cluster_of(tc.tag));
                CHECK(restore_original(lexicon.vocab().name(w), c, lexicon) == tc.tag);
            }
        }
    }
}

TEST_CASE("cluster maps round-trip through the file format") {
    Fixture f;
    ClusterTagset identity = identity_clustering(f.corpus.tagset);
    ClusterTagset merged = merge(identity, identity.cluster_of(f.jjr),
                                 identity.cluster_of(f.jjt), f.lexicon);
    std::ostringstream out;
    save_cluster_map(merged, out);

    std::istringstream in(out.str());
    ClusterTagset loaded = load_cluster_map(in, f.corpus.tagset, f.lexicon);
    CHECK(loaded.size() == merged.size());
    CHECK(loaded.cluster(loaded.cluster_of(f.jjr)).display_name == "{JJR,JJT}");

    std::ostringstream again;
    save_cluster_map(loaded, again);
    CHECK(again.str() == out.str());
}

TEST_CASE("cluster map loading validates the file") {
    Fixture f;
    auto load = [&](const std::string& text) {
        std::istringstream in(text);
        return load_cluster_map(in, f.corpus.tagset, f.lexicon);
    };
    CHECK_THROWS_AS(load("AT\nJJ\nNN\nNP\nJJR\n"), Error);          // JJT missing
    CHECK_THROWS_AS(load("AT\nJJ\nNN\nNP\nJJR\nJJT\nAT\n"), Error);  // AT twice
    CHECK_THROWS_AS(load("AT\nJJ\nNN\nNP\nJJR,BOGUS\nJJT\n"), ParseError);
    CHECK_THROWS_AS(load("AT\nJJ\nNN,NP\nJJR\nJJT\n"), ConstraintError);  // cliff conflict
    // Comments and blank lines are fine.
    ClusterTagset ok = load("# comment\nAT\nJJ\n\nNN\nNP\nJJR,JJT\n");
    CHECK(ok.size() == 5);
}
