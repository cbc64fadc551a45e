#ifndef STAGEDTREE_EXPERIMENT_HPP
#define STAGEDTREE_EXPERIMENT_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stagedtree/classify.hpp"
#include "stagedtree/dataset.hpp"
#include "stagedtree/learning.hpp"

namespace stagedtree {

enum class OrderMode { Cmi, File, AsIs };

OrderMode parse_order_mode(const std::string& name);

/// A learner as named on the command line: one of the staged tree algorithms,
/// optionally with a parameter ("bj:0.2"), or "naive_bayes" for the naive BNC
/// converted to its staged tree.
struct AlgorithmChoice {
    std::string label;
    bool naive_bayes = false;
    LearnConfig config;
};

AlgorithmChoice parse_algorithm_choice(const std::string& text);

struct TrainOptions {
    OrderMode order = OrderMode::Cmi;
    /// Used with OrderMode::File.
    std::vector<std::string> explicit_order;
    double smoothing = 0.0;
    double kl_epsilon = kDefaultKlEpsilon;
    std::size_t restarts = 10;
    std::uint64_t seed = 0;
    std::optional<std::size_t> max_search_depth;
    /// Search depth caps of the benchmark protocol: 5 for hc_full, 7 for bhc
    /// and hc_indep. An explicit max_search_depth wins.
    bool protocol_depth_caps = false;
};

struct TrainedModel {
    StagedTreeModel model;
    SearchTrace trace;
    std::vector<std::string> order;
    std::string label;
};

/// Orders the features, tabulates the data and fits the chosen learner.
TrainedModel train_classifier(const CategoricalDataset& train, const AlgorithmChoice& algorithm,
                              const TrainOptions& options);

/// |C| - 1 + sum_j |C| (|X_j| - 1).
std::size_t naive_bayes_parameter_count(const EventTree& tree);

struct ExperimentSpec {
    std::string name = "experiment";
    std::vector<std::string> algorithms;
    std::size_t replications = 10;
    double train_fraction = 0.8;
    std::uint64_t master_seed = 0;
    TrainOptions options;
    std::optional<std::size_t> positive_class;
};

struct FitRow {
    std::string algorithm;
    std::size_t replication = 0;
    std::uint64_t split_seed = 0;
    std::optional<MetricsReport> metrics;
    std::size_t free_parameters = 0;
    std::size_t naive_bayes_parameters = 0;
    double train_score = 0.0;
    double fit_seconds = 0.0;
    std::string order;
    std::string error;
};

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;
};

struct AlgorithmSummary {
    std::string algorithm;
    std::size_t fits = 0;
    std::size_t failures = 0;
    MeanSd accuracy;
    MeanSd balanced_accuracy;
    std::optional<MeanSd> auc;
    MeanSd free_parameters;
    MeanSd fit_seconds;
};

struct ExperimentReport {
    std::string name;
    std::vector<FitRow> rows;
    std::vector<AlgorithmSummary> summaries;
    bool has_failures() const;
};

MeanSd mean_sd(const std::vector<double>& values);

/// Seed of replication `r`: a hash of the master seed and r, shared by every
/// algorithm so comparisons are paired on the same splits.
std::uint64_t replication_seed(std::uint64_t master_seed, std::size_t replication);

/// Replicated train/test evaluation of every algorithm. A failing fit is
/// recorded in its row and the run continues.
ExperimentReport run_experiment(const CategoricalDataset& data, const ExperimentSpec& spec);

/// Per-fit rows as CSV. Wall times are included only on request, which keeps
/// the default output a pure function of the inputs.
std::string report_csv(const ExperimentReport& report, bool with_timings = false);
/// Summary table (mean and sd per metric, plus timings) for humans.
std::string report_table(const ExperimentReport& report);

struct XorExperimentSpec {
    std::size_t n_features = 10;
    std::size_t n_train = 200;
    std::size_t n_test = 10000;
    std::size_t n_seeds = 10;
    std::uint64_t master_seed = 0;
    std::vector<std::string> algorithms{"naive_hc", "naive_km", "naive_bayes"};
    TrainOptions options;
};

struct XorResult {
    std::string algorithm;
    /// Mean confusion proportions over seeds (rows: truth -1, +1).
    std::vector<std::vector<double>> confusion;
    std::vector<double> accuracies;
    double mean_accuracy = 0.0;
};

std::vector<XorResult> run_xor_experiment(const XorExperimentSpec& spec);
std::string xor_table(const std::vector<XorResult>& results);

} // namespace stagedtree

#endif
