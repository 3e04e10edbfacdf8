#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clustag/util.hpp"

namespace clustag {

class Lexicon;

using TagId = std::uint32_t;
inline constexpr TagId kNoTag = std::numeric_limits<TagId>::max();

// The original tag inventory. Ids are dense and follow interning order.
class Tagset {
public:
    TagId intern(std::string_view name) { return names_.intern(name); }
    std::optional<TagId> find(std::string_view name) const { return names_.find(name); }
    const std::string& name(TagId t) const { return names_.name(t); }
    std::size_t size() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_.names(); }
    bool operator==(const Tagset& other) const { return names_ == other.names_; }

private:
    StringInterner<TagId> names_;
};

// A set of original tags acting as a single label in the reduced tagset.
// Members are kept sorted by tag name; the display name is "{A,B,...}" for
// multi-tag clusters and the bare tag name for singletons.
struct Cluster {
    std::vector<TagId> members;
    std::string display_name;

    bool contains(TagId t) const;
};

Cluster make_cluster(std::vector<TagId> members, const Tagset& tags);

// A partition of the original tagset into admissible clusters.
class ClusterTagset {
public:
    // Validates that the clusters partition the tagset exactly.
    ClusterTagset(std::shared_ptr<const Tagset> tags, std::vector<Cluster> clusters);

    std::size_t size() const { return clusters_.size(); }
    const std::vector<Cluster>& clusters() const { return clusters_; }
    const Cluster& cluster(std::uint32_t index) const { return clusters_[index]; }
    std::uint32_t cluster_of(TagId t) const { return tag_to_cluster_[t]; }

    const Tagset& tagset() const { return *tags_; }
    const std::shared_ptr<const Tagset>& tagset_ptr() const { return tags_; }

    bool is_identity() const;
    std::vector<std::string> display_names() const;

    bool operator==(const ClusterTagset& other) const;

private:
    std::shared_ptr<const Tagset> tags_;
    std::vector<Cluster> clusters_;
    std::vector<std::uint32_t> tag_to_cluster_;
};

// One singleton cluster per tag, in tag-id order.
ClusterTagset identity_clustering(std::shared_ptr<const Tagset> tags);

// True iff no lexicon word carries two distinct tags of the candidate set.
bool cluster_admissible(std::span<const TagId> candidate, const Lexicon& lexicon);

// Replaces clusters a and b with their union (placed at min(a,b); all other
// clusters keep their positions). Throws ConstraintError naming a witness
// word if the union is inadmissible, Error if a == b.
ClusterTagset merge(const ClusterTagset& clustering, std::uint32_t a, std::uint32_t b,
                    const Lexicon& lexicon);

// The unique original tag t with word ∈ t and t ∈ cluster. Throws
// UnknownWordError / InconsistencyError / ConstraintError for the
// zero-knowledge, zero-candidate and multi-candidate cases.
TagId restore_original(std::string_view word, const Cluster& cluster, const Lexicon& lexicon);

// Cluster-map file: one cluster per line, member names joined by "," in
// sorted order, '#' comments allowed, every tag exactly once.
void save_cluster_map(const ClusterTagset& clustering, std::ostream& out);
ClusterTagset load_cluster_map(std::istream& in, std::shared_ptr<const Tagset> tags,
                               const Lexicon& lexicon);

}  // namespace clustag
