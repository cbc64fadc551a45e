#include "stagedtree/independence.hpp"

#include <bit>
#include <cstdint>

namespace stagedtree {
namespace {

// Above this many (subset, prefix) visits only fully specified contexts are
// searched at a depth.
constexpr std::size_t kContextSearchBudget = 4'000'000;

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += items[i];
    }
    return out;
}

} // namespace

const char* to_string(CIKind kind) {
    switch (kind) {
    case CIKind::Marginal: return "marginal";
    case CIKind::ContextConditional: return "context";
    case CIKind::FullConditional: return "conditional";
    }
    return "?";
}

std::string CIStatement::to_string() const {
    std::string out = subject + " _||_ " + join(independent_of);
    std::vector<std::string> conditions = given;
    for (const auto& [var, level] : context) conditions.push_back(var + " = " + level);
    if (!conditions.empty()) out += " | " + join(conditions);
    return out;
}

std::vector<CIStatement> read_marginal_independencies(const StagedTreeModel& model) {
    const auto& tree = model.tree();
    std::vector<CIStatement> out;
    for (std::size_t k = 1; k < tree.num_depths(); ++k) {
        if (model.staging().depth(k).num_stages != 1) continue;
        CIStatement st;
        st.kind = CIKind::Marginal;
        st.subject = tree.variable(k).name();
        for (std::size_t j = 0; j < k; ++j) st.independent_of.push_back(tree.variable(j).name());
        out.push_back(std::move(st));
    }
    return out;
}

std::vector<CIStatement> read_class_conditional_independencies(const StagedTreeModel& model) {
    const auto& tree = model.tree();
    const std::string class_name = tree.class_variable().name();
    const std::size_t n_class = tree.cardinality(0);
    std::vector<CIStatement> out;

    for (std::size_t k = 1; k < tree.num_depths(); ++k) {
        const auto& depth = model.staging().depth(k);
        const std::size_t n_prefix = tree.vertex_count(k) / n_class;

        // matched[f]: every class branch of feature prefix f sits in one stage.
        std::vector<bool> matched(n_prefix, true);
        bool all_matched = true;
        for (std::size_t f = 0; f < n_prefix; ++f) {
            const std::size_t first = depth.stage_of[f];
            for (std::size_t c = 1; c < n_class; ++c) {
                if (depth.stage_of[c * n_prefix + f] != first) {
                    matched[f] = false;
                    all_matched = false;
                    break;
                }
            }
        }

        auto make = [&](CIKind kind) {
            CIStatement st;
            st.kind = kind;
            st.subject = tree.variable(k).name();
            st.independent_of = {class_name};
            return st;
        };

        if (all_matched) {
            auto st = make(CIKind::FullConditional);
            for (std::size_t j = 1; j < k; ++j) st.given.push_back(tree.variable(j).name());
            out.push_back(std::move(st));
            continue;
        }
        const std::size_t n_features = k - 1;
        if (n_features == 0) continue;

        // Digits of every feature prefix, depth 1 first.
        std::vector<std::vector<std::size_t>> digits(n_prefix);
        for (std::size_t f = 0; f < n_prefix; ++f) {
            auto full = tree.prefix(k, f);  // class digit is 0 for f < n_prefix
            digits[f].assign(full.begin() + 1, full.end());
        }

        const std::uint64_t n_masks = std::uint64_t{1} << n_features;
        const bool exhaustive = n_features < 40 && n_masks * n_prefix <= kContextSearchBudget;
        const std::uint64_t all_mask = n_masks - 1;

        // holds[mask][assignment]
        std::vector<std::vector<bool>> holds(exhaustive ? n_masks : 0);
        auto assignment_index = [&](std::uint64_t mask, const std::vector<std::size_t>& digit) {
            std::size_t index = 0;
            for (std::size_t j = 0; j < n_features; ++j) {
                if (mask >> j & 1) index = index * tree.cardinality(j + 1) + digit[j];
            }
            return index;
        };
        auto assignment_count = [&](std::uint64_t mask) {
            std::size_t count = 1;
            for (std::size_t j = 0; j < n_features; ++j) {
                if (mask >> j & 1) count *= tree.cardinality(j + 1);
            }
            return count;
        };

        auto emit = [&](std::uint64_t mask, const std::vector<std::size_t>& digit) {
            auto st = make(CIKind::ContextConditional);
            for (std::size_t j = 0; j < n_features; ++j) {
                const auto& var = tree.variable(j + 1);
                if (mask >> j & 1) {
                    st.context.emplace_back(var.name(), var.level(digit[j]));
                } else {
                    st.given.push_back(var.name());
                }
            }
            out.push_back(std::move(st));
        };

        if (!exhaustive) {
            for (std::size_t f = 0; f < n_prefix; ++f) {
                if (matched[f]) emit(all_mask, digits[f]);
            }
            continue;
        }

        // Masks in order of popcount, then value; minimality needs every
        // one-smaller subset evaluated first.
        std::vector<std::uint64_t> masks;
        for (int bits = 1; bits <= static_cast<int>(n_features); ++bits) {
            for (std::uint64_t mask = 1; mask < n_masks; ++mask) {
                if (std::popcount(mask) == bits) masks.push_back(mask);
            }
        }
        for (std::uint64_t mask : masks) {
            auto& table = holds[mask];
            table.assign(assignment_count(mask), true);
            for (std::size_t f = 0; f < n_prefix; ++f) {
                if (!matched[f]) table[assignment_index(mask, digits[f])] = false;
            }
            // One representative prefix per assignment, in index order.
            std::vector<bool> done(table.size(), false);
            for (std::size_t f = 0; f < n_prefix; ++f) {
                const std::size_t a = assignment_index(mask, digits[f]);
                if (done[a]) continue;
                done[a] = true;
                if (!table[a]) continue;
                bool minimal = true;
                for (std::size_t j = 0; j < n_features && minimal; ++j) {
                    if (!(mask >> j & 1)) continue;
                    const std::uint64_t smaller = mask & ~(std::uint64_t{1} << j);
                    if (smaller == 0) continue;  // the empty context failed already
                    if (holds[smaller][assignment_index(smaller, digits[f])]) minimal = false;
                }
                if (minimal) emit(mask, digits[f]);
            }
        }
    }
    return out;
}

} // namespace stagedtree
