#include "stagedtree/classify.hpp"

#include <algorithm>
#include <numeric>

#include "stagedtree/error.hpp"

namespace stagedtree {
namespace {

// p(c, x) for every class c, plus whether all of them vanished.
std::pair<std::vector<double>, bool> class_joint(const StagedTreeModel& model,
                                                 const std::vector<std::size_t>& features) {
    const auto& tree = model.tree();
    if (features.size() != tree.num_features()) {
        throw ValidationError("expected " + std::to_string(tree.num_features()) + " feature levels, got " +
                              std::to_string(features.size()));
    }
    for (std::size_t j = 0; j < features.size(); ++j) {
        if (features[j] >= tree.cardinality(j + 1)) {
            throw ValidationError("level " + std::to_string(features[j]) + " out of range for feature '" +
                                  tree.variable(j + 1).name() + "'");
        }
    }
    const std::size_t n_classes = tree.cardinality(0);
    std::vector<double> joint(n_classes);
    double total = 0.0;
    for (std::size_t c = 0; c < n_classes; ++c) {
        double p = model.vertex_floret(0, 0)[c];
        std::size_t v = c;
        for (std::size_t j = 0; j < features.size() && p > 0.0; ++j) {
            p *= model.vertex_floret(j + 1, v)[features[j]];
            v = tree.child(j + 1, v, features[j]);
        }
        joint[c] = p;
        total += p;
    }
    if (total > 0.0) {
        for (auto& p : joint) p /= total;
        return {joint, false};
    }
    return {model.vertex_floret(0, 0), true};
}

} // namespace

std::vector<double> posterior(const StagedTreeModel& model, const std::vector<std::size_t>& features) {
    return class_joint(model, features).first;
}

Prediction predict(const StagedTreeModel& model, const std::vector<std::size_t>& features) {
    auto [post, fallback] = class_joint(model, features);
    Prediction out;
    out.predicted = static_cast<std::size_t>(std::max_element(post.begin(), post.end()) - post.begin());
    out.posterior = std::move(post);
    out.fallback = fallback;
    return out;
}

std::optional<double> auc_midrank(const std::vector<double>& scores, const std::vector<bool>& positive) {
    if (scores.size() != positive.size()) throw ValidationError("AUC needs one label per score");
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    double rank_sum = 0.0;
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
        for (std::size_t k = i; k < j; ++k) {
            if (positive[order[k]]) {
                rank_sum += midrank;
                ++n_pos;
            }
        }
        i = j;
    }
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) return std::nullopt;
    const double np = static_cast<double>(n_pos);
    return (rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

MetricsReport evaluate(const StagedTreeModel& model, const CategoricalDataset& test,
                       std::optional<std::size_t> positive_class) {
    if (test.empty()) throw ValidationError("cannot evaluate on an empty test set");
    const std::size_t n_classes = model.tree().cardinality(0);
    if (positive_class && n_classes != 2) throw ValidationError("a positive class only applies to binary classes");
    if (positive_class && *positive_class >= n_classes) throw ValidationError("positive class out of range");

    const RecordMapper mapper(model.tree(), test);
    MetricsReport report;
    report.n_test = test.size();
    std::vector<std::vector<std::size_t>> counts(n_classes, std::vector<std::size_t>(n_classes, 0));
    std::vector<double> scores;
    std::vector<bool> positive;
    const std::size_t pos = positive_class.value_or(1);
    for (const auto& record : test.records()) {
        const Outcome outcome = mapper.outcome(record);
        const std::vector<std::size_t> features(outcome.begin() + 1, outcome.end());
        const Prediction prediction = predict(model, features);
        ++counts[outcome[0]][prediction.predicted];
        if (prediction.fallback) ++report.n_fallback;
        if (n_classes == 2) {
            scores.push_back(prediction.posterior[pos]);
            positive.push_back(outcome[0] == pos);
        }
    }
    const double n = static_cast<double>(test.size());
    report.confusion.assign(n_classes, std::vector<double>(n_classes, 0.0));
    double correct = 0.0, recall_sum = 0.0;
    std::size_t present = 0;
    for (std::size_t t = 0; t < n_classes; ++t) {
        std::size_t row_total = 0;
        for (std::size_t p = 0; p < n_classes; ++p) {
            report.confusion[t][p] = static_cast<double>(counts[t][p]) / n;
            row_total += counts[t][p];
        }
        correct += static_cast<double>(counts[t][t]);
        if (row_total > 0) {
            recall_sum += static_cast<double>(counts[t][t]) / static_cast<double>(row_total);
            ++present;
        }
    }
    report.accuracy = correct / n;
    report.balanced_accuracy = recall_sum / static_cast<double>(present);
    if (n_classes == 2) report.auc = auc_midrank(scores, positive);
    return report;
}

} // namespace stagedtree
