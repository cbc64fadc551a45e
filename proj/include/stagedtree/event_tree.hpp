#ifndef STAGEDTREE_EVENT_TREE_HPP
#define STAGEDTREE_EVENT_TREE_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace stagedtree {

/// A named categorical variable with an ordered, duplicate-free level set.
class VariableSpec {
public:
    VariableSpec() = default;
    VariableSpec(std::string name, std::vector<std::string> levels);

    const std::string& name() const { return name_; }
    const std::vector<std::string>& levels() const { return levels_; }
    std::size_t cardinality() const { return levels_.size(); }
    const std::string& level(std::size_t index) const { return levels_.at(index); }

    std::optional<std::size_t> find_level(const std::string& label) const;
    /// Throws ValidationError when the label is unknown.
    std::size_t level_index(const std::string& label) const;

    friend bool operator==(const VariableSpec&, const VariableSpec&) = default;

private:
    std::string name_;
    std::vector<std::string> levels_;
};

/// A full assignment: one level index per depth (class first, then features
/// in tree order).
using Outcome = std::vector<std::size_t>;

/// The (C, X)-compatible event tree: the class variable branches at the root,
/// feature d branches at depth d. Internal vertices at depth d are the level
/// prefixes of variables 0..d-1, addressed by a mixed-radix integer whose most
/// significant digit is the class level. The child of vertex v along level l
/// of variable d is v * |X_d| + l, so leaves are numbered the same way.
class EventTree {
public:
    EventTree() = default;

    /// Variables at depths 0..p; depth 0 is the class.
    const std::vector<VariableSpec>& variables() const { return variables_; }
    const VariableSpec& variable(std::size_t depth) const { return variables_.at(depth); }
    const VariableSpec& class_variable() const { return variables_.front(); }
    std::size_t num_features() const { return variables_.size() - 1; }
    /// Number of internal depths, p + 1.
    std::size_t num_depths() const { return variables_.size(); }
    std::size_t cardinality(std::size_t depth) const { return variables_.at(depth).cardinality(); }

    /// Internal vertex count at depth d: product of cardinalities of variables 0..d-1.
    std::size_t vertex_count(std::size_t depth) const { return vertex_counts_.at(depth); }
    std::size_t leaf_count() const { return leaf_count_; }
    std::size_t internal_vertex_count() const;

    std::size_t child(std::size_t depth, std::size_t vertex, std::size_t level) const {
        return vertex * cardinality(depth) + level;
    }

    /// Level indices of variables 0..d-1 along the path to vertex.
    std::vector<std::size_t> prefix(std::size_t depth, std::size_t vertex) const;
    /// Vertex at depth d reached by the first d entries of outcome.
    std::size_t vertex_of(const Outcome& outcome, std::size_t depth) const;

    std::size_t leaf_index(const Outcome& outcome) const;
    Outcome outcome_of_leaf(std::size_t leaf) const;

    /// Depth of the named variable, if present.
    std::optional<std::size_t> depth_of(const std::string& name) const;

    /// Throws ValidationError when the outcome is malformed.
    void check_outcome(const Outcome& outcome) const;

    friend bool operator==(const EventTree& a, const EventTree& b) { return a.variables_ == b.variables_; }

private:
    friend EventTree build_event_tree(VariableSpec, std::vector<VariableSpec>);

    std::vector<VariableSpec> variables_;
    std::vector<std::size_t> vertex_counts_;
    std::size_t leaf_count_ = 0;
};

/// Builds the event tree for the class and features in the given order.
/// Throws ValidationError on duplicate names or a cardinality below 2.
EventTree build_event_tree(VariableSpec class_var, std::vector<VariableSpec> feature_vars);

} // namespace stagedtree

#endif
