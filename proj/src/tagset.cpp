#include "clustag/tagset.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <utility>

#include "clustag/errors.hpp"
#include "clustag/lexicon.hpp"

namespace clustag {

bool Cluster::contains(TagId t) const {
    return std::find(members.begin(), members.end(), t) != members.end();
}

Cluster make_cluster(std::vector<TagId> members, const Tagset& tags) {
    if (members.empty()) throw Error("cluster must be non-empty");
    std::sort(members.begin(), members.end(),
              [&](TagId a, TagId b) { return tags.name(a) < tags.name(b); });
    members.erase(std::unique(members.begin(), members.end()), members.end());
    Cluster c;
    if (members.size() == 1) {
        c.display_name = tags.name(members.front());
    } else {
        c.display_name = "{";
        for (std::size_t i = 0; i < members.size(); ++i) {
            if (i > 0) c.display_name += ',';
            c.display_name += tags.name(members[i]);
        }
        c.display_name += '}';
    }
    c.members = std::move(members);
    return c;
}

ClusterTagset::ClusterTagset(std::shared_ptr<const Tagset> tags, std::vector<Cluster> clusters)
    : tags_(std::move(tags)), clusters_(std::move(clusters)) {
    tag_to_cluster_.assign(tags_->size(), UINT32_MAX);
    for (std::uint32_t i = 0; i < clusters_.size(); ++i) {
        for (TagId t : clusters_[i].members) {
            if (t >= tags_->size()) throw Error("cluster member outside tagset");
            if (tag_to_cluster_[t] != UINT32_MAX)
                throw Error("tag " + tags_->name(t) + " appears in more than one cluster");
            tag_to_cluster_[t] = i;
        }
    }
    for (TagId t = 0; t < tags_->size(); ++t) {
        if (tag_to_cluster_[t] == UINT32_MAX)
            throw Error("tag " + tags_->name(t) + " missing from clustering");
    }
}

bool ClusterTagset::is_identity() const { return clusters_.size() == tags_->size(); }

std::vector<std::string> ClusterTagset::display_names() const {
    std::vector<std::string> names;
    names.reserve(clusters_.size());
    for (const Cluster& c : clusters_) names.push_back(c.display_name);
    return names;
}

bool ClusterTagset::operator==(const ClusterTagset& other) const {
    if (!(*tags_ == *other.tags_)) return false;
    if (clusters_.size() != other.clusters_.size()) return false;
    for (std::size_t i = 0; i < clusters_.size(); ++i) {
        if (clusters_[i].members != other.clusters_[i].members) return false;
    }
    return true;
}

ClusterTagset identity_clustering(std::shared_ptr<const Tagset> tags) {
    std::vector<Cluster> clusters;
    clusters.reserve(tags->size());
    for (TagId t = 0; t < tags->size(); ++t) clusters.push_back(make_cluster({t}, *tags));
    return ClusterTagset(std::move(tags), std::move(clusters));
}

bool cluster_admissible(std::span<const TagId> candidate, const Lexicon& lexicon) {
    for (std::size_t i = 0; i < candidate.size(); ++i) {
        for (std::size_t j = i + 1; j < candidate.size(); ++j) {
            if (lexicon.conflict(candidate[i], candidate[j])) return false;
        }
    }
    return true;
}

namespace {

// A word carrying two tags of the union, if any.
std::string find_witness(const std::vector<TagId>& members, const Lexicon& lexicon) {
    for (WordId w = 0; w < lexicon.vocab().size(); ++w) {
        int hits = 0;
        for (const TagCount& tc : lexicon.tags_of(w)) {
            if (std::find(members.begin(), members.end(), tc.tag) != members.end()) ++hits;
        }
        if (hits >= 2) return lexicon.vocab().name(w);
    }
    return "?";
}

}  // namespace

ClusterTagset merge(const ClusterTagset& clustering, std::uint32_t a, std::uint32_t b,
                    const Lexicon& lexicon) {
    if (a == b) throw Error("cannot merge a cluster with itself");
    if (a >= clustering.size() || b >= clustering.size()) throw Error("cluster index out of range");

    std::vector<TagId> united = clustering.cluster(a).members;
    const auto& other = clustering.cluster(b).members;
    united.insert(united.end(), other.begin(), other.end());
    if (!cluster_admissible(united, lexicon)) {
        throw ConstraintError("inadmissible merge of " + clustering.cluster(a).display_name +
                              " and " + clustering.cluster(b).display_name + ": word \"" +
                              find_witness(united, lexicon) + "\" carries two of its tags");
    }

    std::uint32_t keep = std::min(a, b);
    std::uint32_t drop = std::max(a, b);
    std::vector<Cluster> clusters = clustering.clusters();
    clusters[keep] = make_cluster(std::move(united), clustering.tagset());
    clusters.erase(clusters.begin() + drop);
    return ClusterTagset(clustering.tagset_ptr(), std::move(clusters));
}

TagId restore_original(std::string_view word, const Cluster& cluster, const Lexicon& lexicon) {
    auto wid = lexicon.word_id(word);
    if (!wid) throw UnknownWordError("word \"" + std::string(word) + "\" not in lexicon");
    TagId found = kNoTag;
    for (const TagCount& tc : lexicon.tags_of(*wid)) {
        if (!cluster.contains(tc.tag)) continue;
        if (found != kNoTag) {
            throw ConstraintError("word \"" + std::string(word) + "\" carries both " +
                                  lexicon.tagset().name(found) + " and " +
                                  lexicon.tagset().name(tc.tag) + " of cluster " +
                                  cluster.display_name);
        }
        found = tc.tag;
    }
    if (found == kNoTag) {
        throw InconsistencyError("word \"" + std::string(word) + "\" has no tag in cluster " +
                                 cluster.display_name);
    }
    return found;
}

void save_cluster_map(const ClusterTagset& clustering, std::ostream& out) {
    std::vector<std::string> lines;
    lines.reserve(clustering.size());
    for (const Cluster& c : clustering.clusters()) {
        std::string line;
        for (std::size_t i = 0; i < c.members.size(); ++i) {
            if (i > 0) line += ',';
            line += clustering.tagset().name(c.members[i]);
        }
        lines.push_back(std::move(line));
    }
    std::sort(lines.begin(), lines.end());
    for (const std::string& line : lines) out << line << '\n';
}

ClusterTagset load_cluster_map(std::istream& in, std::shared_ptr<const Tagset> tags,
                               const Lexicon& lexicon) {
    std::vector<Cluster> clusters;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        std::vector<TagId> members;
        for (std::string_view name : split_on(body, ',')) {
            name = trim(name);
            if (name.empty()) throw ParseError(lineno, "empty tag name in cluster");
            auto t = tags->find(name);
            if (!t) throw ParseError(lineno, "unknown tag \"" + std::string(name) + "\"");
            members.push_back(*t);
        }
        if (!cluster_admissible(members, lexicon)) {
            throw ConstraintError("line " + std::to_string(lineno) + ": cluster {" +
                                  std::string(body) + "} is inadmissible: word \"" +
                                  find_witness(members, lexicon) + "\" carries two of its tags");
        }
        clusters.push_back(make_cluster(std::move(members), *tags));
    }
    if (clusters.empty()) throw Error("cluster map is empty");
    // The constructor enforces the exactly-once partition property.
    return ClusterTagset(std::move(tags), std::move(clusters));
}

}  // namespace clustag
