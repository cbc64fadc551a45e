#include "stagedtree/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "stagedtree/bn_bridge.hpp"
#include "stagedtree/error.hpp"
#include "stagedtree/generators.hpp"
#include "stagedtree/ordering.hpp"
#include "stagedtree/rng.hpp"
#include "stagedtree/tree_counts.hpp"

namespace stagedtree {
namespace {

std::string fmt(double x, const char* spec = "%.10g") {
    char buf[48];
    std::snprintf(buf, sizeof buf, spec, x);
    return buf;
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
    return out;
}

std::vector<std::string> resolve_order(const CategoricalDataset& train, const TrainOptions& options) {
    switch (options.order) {
    case OrderMode::Cmi: return cmi_order(train, options.smoothing).order;
    case OrderMode::AsIs: return train.feature_names();
    case OrderMode::File: {
        auto expected = train.feature_names();
        auto given = options.explicit_order;
        std::sort(expected.begin(), expected.end());
        std::sort(given.begin(), given.end());
        if (expected != given) {
            throw ValidationError("the feature order must list every feature exactly once (got: " +
                                  join(options.explicit_order, ", ") + ")");
        }
        return options.explicit_order;
    }
    }
    return train.feature_names();
}

std::optional<std::size_t> protocol_cap(Algorithm algorithm) {
    switch (algorithm) {
    case Algorithm::HcFull: return 5;
    case Algorithm::Bhc:
    case Algorithm::HcIndep: return 7;
    default: return std::nullopt;
    }
}

} // namespace

OrderMode parse_order_mode(const std::string& name) {
    if (name == "cmi") return OrderMode::Cmi;
    if (name == "file") return OrderMode::File;
    if (name == "asis") return OrderMode::AsIs;
    throw ValidationError("unknown order mode '" + name + "' (expected cmi, file or asis)");
}

AlgorithmChoice parse_algorithm_choice(const std::string& text) {
    AlgorithmChoice choice;
    choice.label = text;
    if (text == "naive_bayes") {
        choice.naive_bayes = true;
        return choice;
    }
    const auto colon = text.find(':');
    choice.config.algorithm = parse_algorithm(text.substr(0, colon));
    if (colon != std::string::npos) {
        if (choice.config.algorithm != Algorithm::Bj) {
            throw ValidationError("only bj takes a parameter (bj:<kl threshold>), got '" + text + "'");
        }
        const std::string value = text.substr(colon + 1);
        try {
            std::size_t used = 0;
            choice.config.kl_threshold = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument(value);
        } catch (const std::logic_error&) {
            throw ValidationError("bad kl threshold '" + value + "'");
        }
    }
    choice.config.validate();
    return choice;
}

std::size_t naive_bayes_parameter_count(const EventTree& tree) {
    const std::size_t c = tree.cardinality(0);
    std::size_t count = c - 1;
    for (std::size_t d = 1; d < tree.num_depths(); ++d) count += c * (tree.cardinality(d) - 1);
    return count;
}

TrainedModel train_classifier(const CategoricalDataset& train, const AlgorithmChoice& algorithm,
                              const TrainOptions& options) {
    TrainedModel out;
    out.label = algorithm.label;
    out.order = resolve_order(train, options);
    const EventTree tree = tree_for(train, out.order);
    const TreeCounts counts = tree_counts(train, tree);

    if (algorithm.naive_bayes) {
        const std::vector<VariableSpec> features(tree.variables().begin() + 1, tree.variables().end());
        const DagSpec dag = DagSpec::naive_bayes(tree.class_variable(), features);
        // Left unmarked: every stage pools a whole class, so unseen prefixes
        // still get class-conditional florets.
        out.model = fit_model(tree, staging_from_dag(dag, tree), counts, options.smoothing);
        out.trace.initial_score = out.trace.final_score = bic_score(out.model, counts).score;
        return out;
    }

    LearnConfig config = algorithm.config;
    config.smoothing = options.smoothing;
    config.kl_epsilon = options.kl_epsilon;
    config.kmeans_restarts = options.restarts;
    config.seed = options.seed;
    config.max_search_depth = options.max_search_depth;
    if (!config.max_search_depth && options.protocol_depth_caps) config.max_search_depth = protocol_cap(config.algorithm);
    LearnResult result = learn(tree, counts, config);
    out.model = std::move(result.model);
    out.trace = std::move(result.trace);
    return out;
}

bool ExperimentReport::has_failures() const {
    return std::any_of(rows.begin(), rows.end(), [](const FitRow& row) { return !row.error.empty(); });
}

MeanSd mean_sd(const std::vector<double>& values) {
    MeanSd out;
    if (values.empty()) return out;
    double sum = 0.0;
    for (double v : values) sum += v;
    out.mean = sum / static_cast<double>(values.size());
    if (values.size() < 2) return out;
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    return out;
}

std::uint64_t replication_seed(std::uint64_t master_seed, std::size_t replication) {
    return mix_seed(master_seed, replication);
}

ExperimentReport run_experiment(const CategoricalDataset& data, const ExperimentSpec& spec) {
    if (spec.algorithms.empty()) throw ValidationError("no algorithms requested");
    if (spec.replications == 0) throw ValidationError("at least one replication is required");
    std::vector<AlgorithmChoice> choices;
    for (const auto& name : spec.algorithms) choices.push_back(parse_algorithm_choice(name));

    ExperimentReport report;
    report.name = spec.name;
    for (std::size_t r = 0; r < spec.replications; ++r) {
        const std::uint64_t seed = replication_seed(spec.master_seed, r);
        const auto [train, test] = split(data, spec.train_fraction, seed);
        for (const auto& choice : choices) {
            FitRow row;
            row.algorithm = choice.label;
            row.replication = r;
            row.split_seed = seed;
            TrainOptions options = spec.options;
            options.seed = seed;
            const auto started = std::chrono::steady_clock::now();
            try {
                const TrainedModel trained = train_classifier(train, choice, options);
                row.fit_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
                row.order = join(trained.order, ";");
                row.free_parameters = free_parameter_count(trained.model);
                row.naive_bayes_parameters = naive_bayes_parameter_count(trained.model.tree());
                row.train_score = trained.trace.final_score;
                row.metrics = evaluate(trained.model, test, spec.positive_class);
            } catch (const std::exception& e) {
                row.error = e.what();
                row.metrics.reset();
            }
            report.rows.push_back(std::move(row));
        }
    }

    for (const auto& choice : choices) {
        AlgorithmSummary summary;
        summary.algorithm = choice.label;
        std::vector<double> acc, bal, auc, params, secs;
        bool all_auc = true;
        for (const auto& row : report.rows) {
            if (row.algorithm != choice.label) continue;
            ++summary.fits;
            if (!row.error.empty()) {
                ++summary.failures;
                continue;
            }
            acc.push_back(row.metrics->accuracy);
            bal.push_back(row.metrics->balanced_accuracy);
            if (row.metrics->auc) {
                auc.push_back(*row.metrics->auc);
            } else {
                all_auc = false;
            }
            params.push_back(static_cast<double>(row.free_parameters));
            secs.push_back(row.fit_seconds);
        }
        summary.accuracy = mean_sd(acc);
        summary.balanced_accuracy = mean_sd(bal);
        if (all_auc && !auc.empty()) summary.auc = mean_sd(auc);
        summary.free_parameters = mean_sd(params);
        summary.fit_seconds = mean_sd(secs);
        report.summaries.push_back(summary);
    }
    return report;
}

std::string report_csv(const ExperimentReport& report, bool with_timings) {
    std::ostringstream out;
    out << "algorithm,replication,split_seed,accuracy,balanced_accuracy,auc,free_parameters,"
           "naive_bayes_parameters,train_score,order,error";
    if (with_timings) out << ",fit_seconds";
    out << '\n';
    for (const auto& row : report.rows) {
        out << csv_escape(row.algorithm) << ',' << row.replication << ',' << row.split_seed << ',';
        if (row.metrics) {
            out << fmt(row.metrics->accuracy) << ',' << fmt(row.metrics->balanced_accuracy) << ','
                << (row.metrics->auc ? fmt(*row.metrics->auc) : "") << ',' << row.free_parameters << ','
                << row.naive_bayes_parameters << ',' << fmt(row.train_score);
        } else {
            out << ",,,,,";
        }
        out << ',' << csv_escape(row.order) << ',' << csv_escape(row.error);
        if (with_timings) out << ',' << fmt(row.fit_seconds, "%.6f");
        out << '\n';
    }
    return out.str();
}

std::string report_table(const ExperimentReport& report) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%-14s %5s %5s  %-17s  %-17s  %-17s  %-13s  %s\n", "algorithm", "fits", "fail",
                  "accuracy", "balanced_acc", "auc", "params", "seconds");
    out << "# " << report.name << '\n' << line;
    auto pm = [](const MeanSd& m, const char* spec) { return fmt(m.mean, spec) + " +- " + fmt(m.sd, spec); };
    for (const auto& s : report.summaries) {
        std::snprintf(line, sizeof line, "%-14s %5zu %5zu  %-17s  %-17s  %-17s  %-13s  %s\n", s.algorithm.c_str(),
                      s.fits, s.failures, pm(s.accuracy, "%.4f").c_str(), pm(s.balanced_accuracy, "%.4f").c_str(),
                      s.auc ? pm(*s.auc, "%.4f").c_str() : "n/a", pm(s.free_parameters, "%.1f").c_str(),
                      fmt(s.fit_seconds.mean, "%.3f").c_str());
        out << line;
    }
    for (const auto& row : report.rows) {
        if (!row.error.empty()) {
            out << "failed: " << row.algorithm << " replication " << row.replication << ": " << row.error << '\n';
        }
    }
    return out.str();
}

std::vector<XorResult> run_xor_experiment(const XorExperimentSpec& spec) {
    if (spec.n_seeds == 0) throw ValidationError("at least one seed is required");
    std::vector<AlgorithmChoice> choices;
    for (const auto& name : spec.algorithms) choices.push_back(parse_algorithm_choice(name));
    std::vector<XorResult> results(choices.size());
    for (std::size_t a = 0; a < choices.size(); ++a) {
        results[a].algorithm = choices[a].label;
        results[a].confusion.assign(2, std::vector<double>(2, 0.0));
    }
    for (std::size_t s = 0; s < spec.n_seeds; ++s) {
        const std::uint64_t seed = replication_seed(spec.master_seed, s);
        const auto train = generate_parity(spec.n_features, spec.n_train, mix_seed(seed, 0));
        const auto test = generate_parity(spec.n_features, spec.n_test, mix_seed(seed, 1));
        for (std::size_t a = 0; a < choices.size(); ++a) {
            TrainOptions options = spec.options;
            options.seed = seed;
            const TrainedModel trained = train_classifier(train, choices[a], options);
            const MetricsReport metrics = evaluate(trained.model, test);
            results[a].accuracies.push_back(metrics.accuracy);
            for (std::size_t t = 0; t < 2; ++t) {
                for (std::size_t p = 0; p < 2; ++p) {
                    results[a].confusion[t][p] += metrics.confusion[t][p] / static_cast<double>(spec.n_seeds);
                }
            }
        }
    }
    for (auto& result : results) result.mean_accuracy = mean_sd(result.accuracies).mean;
    return results;
}

std::string xor_table(const std::vector<XorResult>& results) {
    std::ostringstream out;
    char line[160];
    for (const auto& r : results) {
        const MeanSd acc = mean_sd(r.accuracies);
        std::snprintf(line, sizeof line, "%s: mean accuracy %.4f (sd %.4f over %zu seeds)\n", r.algorithm.c_str(),
                      acc.mean, acc.sd, r.accuracies.size());
        out << line;
        out << "  predicted \\ truth      -1       +1\n";
        for (std::size_t p = 0; p < 2; ++p) {
            std::snprintf(line, sizeof line, "  %-18s %7.4f  %7.4f\n", p == 0 ? "-1" : "+1", r.confusion[0][p],
                          r.confusion[1][p]);
            out << line;
        }
    }
    return out.str();
}

} // namespace stagedtree
