#include "stagedtree/event_tree.hpp"

#include <limits>
#include <set>

#include "stagedtree/error.hpp"

namespace stagedtree {

VariableSpec::VariableSpec(std::string name, std::vector<std::string> levels)
    : name_(std::move(name)), levels_(std::move(levels)) {
    if (name_.empty()) throw ValidationError("variable with an empty name");
    if (levels_.empty()) throw ValidationError("variable '" + name_ + "' has no levels");
    std::set<std::string> seen;
    for (const auto& level : levels_) {
        if (!seen.insert(level).second) {
            throw ValidationError("variable '" + name_ + "' has duplicate level '" + level + "'");
        }
    }
}

std::optional<std::size_t> VariableSpec::find_level(const std::string& label) const {
    for (std::size_t i = 0; i < levels_.size(); ++i) {
        if (levels_[i] == label) return i;
    }
    return std::nullopt;
}

std::size_t VariableSpec::level_index(const std::string& label) const {
    if (auto index = find_level(label)) return *index;
    throw ValidationError("unknown level '" + label + "' for variable '" + name_ + "'");
}

EventTree build_event_tree(VariableSpec class_var, std::vector<VariableSpec> feature_vars) {
    EventTree tree;
    tree.variables_.reserve(feature_vars.size() + 1);
    tree.variables_.push_back(std::move(class_var));
    for (auto& var : feature_vars) tree.variables_.push_back(std::move(var));

    std::set<std::string> names;
    for (const auto& var : tree.variables_) {
        if (!names.insert(var.name()).second) {
            throw ValidationError("duplicate variable name '" + var.name() + "'");
        }
        if (var.cardinality() < 2) {
            throw ValidationError("variable '" + var.name() + "' needs at least 2 levels");
        }
    }

    constexpr std::size_t kMaxIndex = std::size_t{1} << 62;
    std::size_t count = 1;
    tree.vertex_counts_.reserve(tree.variables_.size());
    for (const auto& var : tree.variables_) {
        tree.vertex_counts_.push_back(count);
        if (count > kMaxIndex / var.cardinality()) {
            throw ValidationError("event tree too large to index");
        }
        count *= var.cardinality();
    }
    tree.leaf_count_ = count;
    return tree;
}

std::size_t EventTree::internal_vertex_count() const {
    std::size_t total = 0;
    for (auto count : vertex_counts_) total += count;
    return total;
}

std::vector<std::size_t> EventTree::prefix(std::size_t depth, std::size_t vertex) const {
    std::vector<std::size_t> levels(depth);
    for (std::size_t d = depth; d-- > 0;) {
        levels[d] = vertex % cardinality(d);
        vertex /= cardinality(d);
    }
    return levels;
}

std::size_t EventTree::vertex_of(const Outcome& outcome, std::size_t depth) const {
    std::size_t vertex = 0;
    for (std::size_t d = 0; d < depth; ++d) vertex = vertex * cardinality(d) + outcome[d];
    return vertex;
}

std::size_t EventTree::leaf_index(const Outcome& outcome) const {
    check_outcome(outcome);
    return vertex_of(outcome, num_depths());
}

Outcome EventTree::outcome_of_leaf(std::size_t leaf) const {
    if (leaf >= leaf_count_) throw ValidationError("leaf index out of range");
    return prefix(num_depths(), leaf);
}

std::optional<std::size_t> EventTree::depth_of(const std::string& name) const {
    for (std::size_t d = 0; d < variables_.size(); ++d) {
        if (variables_[d].name() == name) return d;
    }
    return std::nullopt;
}

void EventTree::check_outcome(const Outcome& outcome) const {
    if (outcome.size() != num_depths()) {
        throw ValidationError("outcome has " + std::to_string(outcome.size()) + " entries, tree has " +
                              std::to_string(num_depths()) + " variables");
    }
    for (std::size_t d = 0; d < outcome.size(); ++d) {
        if (outcome[d] >= cardinality(d)) {
            throw ValidationError("level " + std::to_string(outcome[d]) + " out of range for variable '" +
                                  variables_[d].name() + "'");
        }
    }
}

} // namespace stagedtree
