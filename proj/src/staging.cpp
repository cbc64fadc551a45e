#include "stagedtree/staging.hpp"

#include <map>
#include <string>

#include "stagedtree/error.hpp"

namespace stagedtree {

std::vector<std::vector<std::size_t>> DepthStaging::members() const {
    std::vector<std::vector<std::size_t>> out(num_stages);
    for (std::size_t v = 0; v < stage_of.size(); ++v) out[stage_of[v]].push_back(v);
    return out;
}

DepthStaging canonicalize(const std::vector<std::size_t>& labels, std::optional<std::size_t> unobserved_label) {
    DepthStaging depth;
    depth.stage_of.resize(labels.size());
    std::map<std::size_t, std::size_t> renumber;
    for (std::size_t v = 0; v < labels.size(); ++v) {
        auto [it, inserted] = renumber.try_emplace(labels[v], renumber.size());
        depth.stage_of[v] = it->second;
    }
    depth.num_stages = renumber.size();
    if (unobserved_label) {
        if (auto it = renumber.find(*unobserved_label); it != renumber.end()) depth.unobserved = it->second;
    }
    return depth;
}

Staging Staging::from_labels(const EventTree& tree, const std::vector<std::vector<std::size_t>>& labels,
                             const std::vector<std::optional<std::size_t>>& unobserved_labels) {
    if (labels.size() != tree.num_depths()) {
        throw ValidationError("staging has " + std::to_string(labels.size()) + " depths, tree has " +
                              std::to_string(tree.num_depths()));
    }
    if (!unobserved_labels.empty() && unobserved_labels.size() != labels.size()) {
        throw ValidationError("unobserved stage list does not match the number of depths");
    }
    Staging staging;
    staging.depths_.reserve(labels.size());
    for (std::size_t d = 0; d < labels.size(); ++d) {
        if (labels[d].size() != tree.vertex_count(d)) {
            throw ValidationError("depth " + std::to_string(d) + " has " + std::to_string(labels[d].size()) +
                                  " stage labels, expected " + std::to_string(tree.vertex_count(d)));
        }
        staging.depths_.push_back(
            canonicalize(labels[d], unobserved_labels.empty() ? std::nullopt : unobserved_labels[d]));
    }
    return staging;
}

Staging Staging::from_stages(const EventTree& tree, const std::vector<std::vector<VertexRef>>& stages) {
    constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
    std::vector<std::vector<std::size_t>> labels(tree.num_depths());
    for (std::size_t d = 0; d < tree.num_depths(); ++d) labels[d].assign(tree.vertex_count(d), kUnset);

    std::size_t next = 0;
    for (const auto& stage : stages) {
        if (stage.empty()) continue;
        const std::size_t depth = stage.front().first;
        for (const auto& [d, v] : stage) {
            if (d != depth) {
                throw ValidationError("stage mixes vertices of depths " + std::to_string(depth) + " and " +
                                      std::to_string(d) + "; only vertices of one variable may share a stage");
            }
            if (d >= tree.num_depths() || v >= tree.vertex_count(d)) {
                throw ValidationError("vertex (" + std::to_string(d) + ", " + std::to_string(v) + ") not in tree");
            }
            if (labels[d][v] != kUnset) {
                throw ValidationError("vertex (" + std::to_string(d) + ", " + std::to_string(v) +
                                      ") listed in two stages");
            }
            labels[d][v] = next;
        }
        ++next;
    }
    for (auto& depth : labels) {
        for (auto& label : depth) {
            if (label == kUnset) label = next++;
        }
    }
    return from_labels(tree, labels);
}

Staging Staging::full(const EventTree& tree) {
    std::vector<std::vector<std::size_t>> labels(tree.num_depths());
    for (std::size_t d = 0; d < tree.num_depths(); ++d) {
        labels[d].resize(tree.vertex_count(d));
        for (std::size_t v = 0; v < labels[d].size(); ++v) labels[d][v] = v;
    }
    return from_labels(tree, labels);
}

Staging Staging::independent(const EventTree& tree) {
    std::vector<std::vector<std::size_t>> labels(tree.num_depths());
    for (std::size_t d = 0; d < tree.num_depths(); ++d) labels[d].assign(tree.vertex_count(d), 0);
    return from_labels(tree, labels);
}

std::size_t Staging::total_stages() const {
    std::size_t total = 0;
    for (const auto& depth : depths_) total += depth.num_stages;
    return total;
}

Staging Staging::with_depth(std::size_t d, const std::vector<std::size_t>& labels,
                            std::optional<std::size_t> unobserved_label) const {
    if (d >= depths_.size() || labels.size() != depths_[d].stage_of.size()) {
        throw ValidationError("replacement staging does not match depth " + std::to_string(d));
    }
    Staging out = *this;
    out.depths_[d] = canonicalize(labels, unobserved_label);
    return out;
}

void Staging::check_against(const EventTree& tree) const {
    if (depths_.size() != tree.num_depths()) {
        throw ValidationError("staging depth count does not match the tree");
    }
    for (std::size_t d = 0; d < depths_.size(); ++d) {
        const auto& depth = depths_[d];
        if (depth.stage_of.size() != tree.vertex_count(d)) {
            throw ValidationError("staging of depth " + std::to_string(d) + " has the wrong vertex count");
        }
        if (depth != canonicalize(depth.stage_of, depth.unobserved)) {
            throw ValidationError("staging of depth " + std::to_string(d) + " is not canonical");
        }
    }
}

} // namespace stagedtree
