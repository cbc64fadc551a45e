#ifndef STAGEDTREE_INDEPENDENCE_HPP
#define STAGEDTREE_INDEPENDENCE_HPP

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "stagedtree/model.hpp"

namespace stagedtree {

enum class CIKind { Marginal, ContextConditional, FullConditional };

const char* to_string(CIKind kind);

/// `subject` is independent of `independent_of` given the variables in
/// `given`, within the context fixing the listed variables to the listed
/// levels. Context variables always precede the subject in the tree order.
struct CIStatement {
    CIKind kind = CIKind::Marginal;
    std::string subject;
    std::vector<std::string> independent_of;
    std::vector<std::string> given;
    std::vector<std::pair<std::string, std::string>> context;

    /// e.g. "Survived _||_ Class | Age, Sex = Male"
    std::string to_string() const;

    friend bool operator==(const CIStatement&, const CIStatement&) = default;
};

/// One statement (C, X_1..X_{k-1}) _||_ X_k per feature depth whose vertices
/// all share a single stage.
std::vector<CIStatement> read_marginal_independencies(const StagedTreeModel& model);

/// Statements C _||_ X_k | ... read from the staging by matching vertices that
/// differ only in the class level. If every feature prefix at depth k has all
/// its class-vertices in one stage, a full-conditional statement is emitted.
/// Otherwise the minimal partial contexts (subsets of preceding features fixed
/// to levels) on which the matching holds are emitted as context-specific
/// statements, with the remaining preceding features as the conditioning set.
std::vector<CIStatement> read_class_conditional_independencies(const StagedTreeModel& model);

} // namespace stagedtree

#endif
