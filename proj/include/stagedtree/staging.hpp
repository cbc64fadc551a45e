#ifndef STAGEDTREE_STAGING_HPP
#define STAGEDTREE_STAGING_HPP

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "stagedtree/event_tree.hpp"

namespace stagedtree {

/// Stage partition of one depth. Stage ids are contiguous from 0 and
/// canonical: numbered by the first vertex (in index order) that uses them.
struct DepthStaging {
    std::vector<std::size_t> stage_of;
    std::size_t num_stages = 0;
    /// Stage holding the vertices never reached by training data, if any.
    std::optional<std::size_t> unobserved;

    bool is_unobserved(std::size_t stage) const { return unobserved && *unobserved == stage; }
    std::size_t num_observed_stages() const { return num_stages - (unobserved ? 1 : 0); }
    /// Vertices of each stage, in vertex order.
    std::vector<std::vector<std::size_t>> members() const;

    friend bool operator==(const DepthStaging&, const DepthStaging&) = default;
};

/// A vertex of the event tree addressed by (depth, vertex index).
using VertexRef = std::pair<std::size_t, std::size_t>;

/// Partition of all internal vertices into stages. Stages never span depths,
/// so the partition is stored per depth.
class Staging {
public:
    Staging() = default;

    /// Takes arbitrary integer labels per depth and canonicalizes them.
    /// `unobserved_labels[d]`, when set, names the label of the unobserved
    /// stage at depth d (it may be absent from the labels, in which case the
    /// depth has no unobserved stage).
    static Staging from_labels(const EventTree& tree, const std::vector<std::vector<std::size_t>>& labels,
                               const std::vector<std::optional<std::size_t>>& unobserved_labels = {});

    /// Builds a staging from explicit stages given as vertex lists (the
    /// colouring view). Vertices not listed become singleton stages. Throws
    /// ValidationError if a stage mixes depths or a vertex is listed twice.
    static Staging from_stages(const EventTree& tree, const std::vector<std::vector<VertexRef>>& stages);

    static Staging full(const EventTree& tree);
    static Staging independent(const EventTree& tree);

    std::size_t num_depths() const { return depths_.size(); }
    const DepthStaging& depth(std::size_t d) const { return depths_.at(d); }
    const std::vector<DepthStaging>& depths() const { return depths_; }
    std::size_t stage(std::size_t depth, std::size_t vertex) const { return depths_.at(depth).stage_of.at(vertex); }
    std::size_t total_stages() const;

    /// Returns a copy where depth `d` is replaced and recanonicalized.
    Staging with_depth(std::size_t d, const std::vector<std::size_t>& labels,
                       std::optional<std::size_t> unobserved_label = std::nullopt) const;

    /// Throws ValidationError unless the shape matches the tree.
    void check_against(const EventTree& tree) const;

    friend bool operator==(const Staging&, const Staging&) = default;

private:
    std::vector<DepthStaging> depths_;
};

/// Renumbers labels by first occurrence. Returns the canonical staging of the
/// depth; the unobserved label, if present among labels, is mapped as well.
DepthStaging canonicalize(const std::vector<std::size_t>& labels, std::optional<std::size_t> unobserved_label);

} // namespace stagedtree

#endif
