#ifndef STAGEDTREE_CLASSIFY_HPP
#define STAGEDTREE_CLASSIFY_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "stagedtree/dataset.hpp"
#include "stagedtree/model.hpp"

namespace stagedtree {

struct Prediction {
    std::size_t predicted = 0;
    std::vector<double> posterior;
    /// Set when p(c, x) vanished for every class and the class marginal was used.
    bool fallback = false;
};

/// p(c | x) from path products; `features` holds one level per feature depth.
/// Throws ValidationError on a wrong length or an out-of-range level.
std::vector<double> posterior(const StagedTreeModel& model, const std::vector<std::size_t>& features);

/// Argmax of the posterior, lowest class index on exact ties.
Prediction predict(const StagedTreeModel& model, const std::vector<std::size_t>& features);

struct MetricsReport {
    /// Proportions; rows are true classes, columns predicted classes.
    std::vector<std::vector<double>> confusion;
    double accuracy = 0.0;
    /// Mean recall over the classes present in the test data.
    double balanced_accuracy = 0.0;
    std::optional<double> auc;
    std::size_t n_test = 0;
    std::size_t n_fallback = 0;
};

/// Mann-Whitney AUC with midranks for ties. `positive[i]` marks positives.
/// Returns nullopt when one of the two groups is empty.
std::optional<double> auc_midrank(const std::vector<double>& scores, const std::vector<bool>& positive);

/// Metrics on a test set. AUC is computed for binary classes with the
/// positive class defaulting to level index 1. Throws ValidationError for an
/// empty test set or when a positive class is given for a non-binary class.
MetricsReport evaluate(const StagedTreeModel& model, const CategoricalDataset& test,
                       std::optional<std::size_t> positive_class = std::nullopt);

} // namespace stagedtree

#endif
