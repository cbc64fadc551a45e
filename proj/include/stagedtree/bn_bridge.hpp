#ifndef STAGEDTREE_BN_BRIDGE_HPP
#define STAGEDTREE_BN_BRIDGE_HPP

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stagedtree/event_tree.hpp"
#include "stagedtree/model.hpp"
#include "stagedtree/staging.hpp"

namespace stagedtree {

/// A Bayesian network over an ordered variable list (class first). Parents of
/// a variable are indices of earlier variables, kept sorted. A CPT is stored
/// row-major: one row per parent configuration, with the configuration
/// encoded mixed-radix over the parents in order (first parent most
/// significant), matching the event tree's vertex indexing.
class DagSpec {
public:
    DagSpec() = default;
    /// Throws ValidationError when a parent does not precede its child or CPT
    /// shapes are wrong. CPT rows must sum to 1 within 1e-9.
    DagSpec(std::vector<VariableSpec> variables, std::vector<std::vector<std::size_t>> parents,
            std::optional<std::vector<std::vector<double>>> cpts = std::nullopt);

    const std::vector<VariableSpec>& variables() const { return variables_; }
    const std::vector<std::vector<std::size_t>>& parents() const { return parents_; }
    const std::vector<std::size_t>& parents(std::size_t var) const { return parents_.at(var); }
    bool has_cpts() const { return cpts_.has_value(); }
    const std::vector<std::vector<double>>& cpts() const;

    /// Number of parent configurations of the variable.
    std::size_t parent_configurations(std::size_t var) const;
    /// Index of the parent configuration read off a (possibly partial) outcome.
    std::size_t parent_configuration(std::size_t var, const Outcome& outcome) const;
    double cpt(std::size_t var, std::size_t configuration, std::size_t level) const;

    /// Naive Bayes over a class and features: every feature's parent is the class.
    static DagSpec naive_bayes(const VariableSpec& class_var, const std::vector<VariableSpec>& features);

private:
    std::vector<VariableSpec> variables_;
    std::vector<std::vector<std::size_t>> parents_;
    std::optional<std::vector<std::vector<double>>> cpts_;
};

/// Stages of T_G: two depth-d vertices share a stage iff their prefixes agree
/// on the parents of variable d. Throws ValidationError if the DAG order does
/// not match the tree.
Staging staging_from_dag(const DagSpec& dag, const EventTree& tree);

/// T_G with florets copied from the CPTs.
StagedTreeModel model_from_dag(const DagSpec& dag, const EventTree& tree);

/// Product over variables of P(x_k | x_parents). Throws ValidationError
/// without CPTs or for an invalid outcome.
double bn_joint_oracle(const DagSpec& dag, const Outcome& outcome);

/// Text format, one variable per line in order:
///   name | levels: a,b | parents: p,q | cpt: 0.2,0.8,...
/// `levels` may be omitted when `known` supplies the variable; `cpt` is
/// optional. Blank lines and lines starting with '#' are ignored.
DagSpec parse_dag(const std::string& text, const std::vector<VariableSpec>& known = {});
DagSpec read_dag(const std::filesystem::path& path, const std::vector<VariableSpec>& known = {});
std::string format_dag(const DagSpec& dag);

} // namespace stagedtree

#endif
