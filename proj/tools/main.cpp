// Command-line front end: training, prediction, evaluation, independence
// read-out and the benchmark runners.
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "stagedtree/bn_bridge.hpp"
#include "stagedtree/classify.hpp"
#include "stagedtree/error.hpp"
#include "stagedtree/experiment.hpp"
#include "stagedtree/independence.hpp"
#include "stagedtree/ordering.hpp"
#include "stagedtree/serialization.hpp"
#include "stagedtree/titanic.hpp"
#include "stagedtree/tree_counts.hpp"

namespace st = stagedtree;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitPartial = 3;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("STAGEDTREE_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw st::ValidationError(std::string("STAGEDTREE_SEED is not an unsigned integer: ") + env);
        }
    }
    return 0;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw st::ValidationError("cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw st::ValidationError("cannot write " + path);
    out << text;
}

// Feature names one per line, or comma separated.
std::vector<std::string> read_order_file(const std::string& path) {
    std::vector<std::string> names;
    std::istringstream in(read_text(path));
    std::string line;
    while (std::getline(in, line)) {
        for (auto& field : st::split_csv_line(line)) {
            const auto first = field.find_first_not_of(" \t\r");
            if (first == std::string::npos) continue;
            names.push_back(field.substr(first, field.find_last_not_of(" \t\r") - first + 1));
        }
    }
    return names;
}

struct DataArgs {
    std::string path;
    std::string class_column;
    std::string levels;
    bool titanic = false;

    st::CategoricalDataset load() const {
        if (titanic) return st::titanic_dataset();
        if (path.empty()) throw st::ValidationError("--data is required (or --titanic)");
        if (class_column.empty()) throw st::ValidationError("--class is required with --data");
        return st::load_csv(path, class_column, levels.empty() ? st::LevelOrder{} : st::read_level_order(levels));
    }
};

void add_data_options(CLI::App* cmd, DataArgs& data, bool allow_titanic) {
    cmd->add_option("--data", data.path, "CSV file with a header row");
    cmd->add_option("--class", data.class_column, "Name of the class column");
    cmd->add_option("--levels", data.levels, "Level order sidecar (name,level1,level2,... per line)");
    if (allow_titanic) cmd->add_flag("--titanic", data.titanic, "Use the embedded Titanic data");
}

struct FitArgs {
    std::string order = "cmi";
    std::string order_file;
    double smoothing = 0.0;
    double kl_eps = st::kDefaultKlEpsilon;
    std::optional<double> kl_threshold;
    std::optional<std::size_t> max_search_depth;
    std::uint64_t seed = 0;
    std::size_t restarts = 10;

    st::TrainOptions options() const {
        st::TrainOptions out;
        out.order = st::parse_order_mode(order);
        if (out.order == st::OrderMode::File) {
            if (order_file.empty()) throw st::ValidationError("--order file needs --order-file");
            out.explicit_order = read_order_file(order_file);
        }
        out.smoothing = smoothing;
        out.kl_epsilon = kl_eps;
        out.restarts = restarts;
        out.seed = seed;
        out.max_search_depth = max_search_depth;
        return out;
    }

    st::AlgorithmChoice choice(const std::string& name) const {
        st::AlgorithmChoice c = st::parse_algorithm_choice(name);
        if (kl_threshold && name == "bj") c.config.kl_threshold = *kl_threshold;
        c.config.validate();
        return c;
    }
};

void add_fit_options(CLI::App* cmd, FitArgs& fit) {
    cmd->add_option("--order", fit.order, "Feature order: cmi, file or asis")->capture_default_str();
    cmd->add_option("--order-file", fit.order_file, "Feature names for --order file");
    cmd->add_option("--smoothing", fit.smoothing, "Pseudo-count added to every floret cell")->capture_default_str();
    cmd->add_option("--kl-eps", fit.kl_eps, "Probability floor inside KL divergences")->capture_default_str();
    cmd->add_option("--kl-threshold", fit.kl_threshold, "Backward joining threshold (bj)");
    cmd->add_option("--max-search-depth", fit.max_search_depth, "Leave deeper depths at their starting staging");
    cmd->add_option("--seed", fit.seed, "Seed (default: $STAGEDTREE_SEED or 0)")->capture_default_str();
    cmd->add_option("--restarts", fit.restarts, "k-means restarts")->capture_default_str();
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string hex(std::uint64_t value) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

// Provenance flags keep every digit.
std::string exact(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string ci_report(const st::StagedTreeModel& model) {
    std::ostringstream out;
    out << "order:";
    for (const auto& var : model.tree().variables()) out << ' ' << var.name();
    out << '\n';
    for (const auto& s : st::read_marginal_independencies(model)) out << st::to_string(s.kind) << ": " << s.to_string() << '\n';
    for (const auto& s : st::read_class_conditional_independencies(model)) {
        out << st::to_string(s.kind) << ": " << s.to_string() << '\n';
    }
    return out.str();
}

// Rows of a CSV for prediction; the class column may be absent.
struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

RawTable read_raw_csv(const std::string& path) {
    std::istringstream in(read_text(path));
    RawTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (first) {
            if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
            table.header = st::split_csv_line(line);
            first = false;
            continue;
        }
        if (line.empty()) continue;
        auto fields = st::split_csv_line(line);
        if (fields.size() != table.header.size()) {
            throw st::ValidationError("row " + std::to_string(table.rows.size() + 2) + " has " +
                                      std::to_string(fields.size()) + " fields, header has " +
                                      std::to_string(table.header.size()));
        }
        table.rows.push_back(std::move(fields));
    }
    if (table.header.empty()) throw st::ValidationError(path + " is empty");
    return table;
}

int run_predict(const std::string& model_path, const std::string& data_path, const std::string& out_path) {
    const auto file = st::read_model(model_path);
    const auto& model = file.model;
    const auto& tree = model.tree();
    const RawTable table = read_raw_csv(data_path);
    std::vector<std::size_t> columns;
    for (std::size_t d = 1; d < tree.num_depths(); ++d) {
        const auto& name = tree.variable(d).name();
        auto it = std::find(table.header.begin(), table.header.end(), name);
        if (it == table.header.end()) throw st::ValidationError("input lacks feature column '" + name + "'");
        columns.push_back(static_cast<std::size_t>(it - table.header.begin()));
    }
    std::ostringstream out;
    for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << st::csv_escape(table.header[i]);
    out << ",predicted";
    for (const auto& level : tree.class_variable().levels()) out << ',' << st::csv_escape("p_" + level);
    out << '\n';
    std::size_t fallbacks = 0;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        std::vector<std::size_t> features;
        for (std::size_t j = 0; j < columns.size(); ++j) {
            const auto& var = tree.variable(j + 1);
            const auto level = var.find_level(row[columns[j]]);
            if (!level) {
                throw st::ValidationError("row " + std::to_string(r + 2) + ": level '" + row[columns[j]] +
                                          "' unknown for '" + var.name() + "'");
            }
            features.push_back(*level);
        }
        const auto prediction = st::predict(model, features);
        if (prediction.fallback) {
            ++fallbacks;
            std::cerr << "row " << r + 2 << ": no class reaches this feature combination; using the class marginal\n";
        }
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << st::csv_escape(row[i]);
        out << ',' << st::csv_escape(tree.class_variable().level(prediction.predicted));
        for (double p : prediction.posterior) out << ',' << fmt(p);
        out << '\n';
    }
    write_text(out_path, out.str());
    if (fallbacks) std::cerr << fallbacks << " of " << table.rows.size() << " rows used the class marginal\n";
    return 0;
}

std::string metrics_text(const st::MetricsReport& m, const st::VariableSpec& class_var) {
    std::ostringstream out;
    out << "n_test: " << m.n_test << '\n'
        << "accuracy: " << fmt(m.accuracy) << '\n'
        << "balanced_accuracy: " << fmt(m.balanced_accuracy) << '\n'
        << "auc: " << (m.auc ? fmt(*m.auc) : std::string("n/a")) << '\n'
        << "fallbacks: " << m.n_fallback << '\n'
        << "confusion (rows truth, columns predicted):\n";
    for (std::size_t t = 0; t < m.confusion.size(); ++t) {
        out << "  " << class_var.level(t);
        for (double p : m.confusion[t]) out << ' ' << fmt(p);
        out << '\n';
    }
    return out.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Staged tree classifiers over categorical data"};
    app.require_subcommand(1);

    std::uint64_t env_seed = 0;
    try {
        env_seed = default_seed();
    } catch (const st::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }

    DataArgs data;
    FitArgs fit;
    fit.seed = env_seed;
    std::string algorithm = "fbhc";
    std::string model_path, out_path, algorithms_text, dag_path;
    std::optional<std::string> positive;
    bool show_trace = false, timings = false, protocol_caps = false;
    std::size_t replications = 10, n_features = 10, n_train = 200, n_test = 10000, n_seeds = 10;
    double fraction = 0.8;

    auto* train = app.add_subcommand("train", "Learn a staged tree classifier and save it as JSON");
    add_data_options(train, data, true);
    add_fit_options(train, fit);
    train->add_option("--algorithm", algorithm,
                      "full, indep, hc_indep, hc_full, bhc, fbhc, bj, naive_hc, naive_km or naive_bayes")
        ->capture_default_str();
    train->add_option("--out", model_path, "Model file to write")->required();
    train->add_flag("--trace", show_trace, "Print the search trace");

    auto* predict = app.add_subcommand("predict", "Write class predictions and posteriors as CSV");
    predict->add_option("--model", model_path)->required();
    predict->add_option("--data", data.path)->required();
    predict->add_option("--out", out_path, "Output CSV (default: stdout)");

    auto* evaluate = app.add_subcommand("evaluate", "Accuracy, balanced accuracy and AUC on labelled data");
    evaluate->add_option("--model", model_path)->required();
    add_data_options(evaluate, data, true);
    evaluate->add_option("--positive", positive, "Positive class level for AUC (default: second level)");

    auto* show_ci = app.add_subcommand("show-ci", "List the independence statements a model encodes");
    show_ci->add_option("--model", model_path)->required();

    auto* xor_cmd = app.add_subcommand("xor-experiment", "Naive staged trees against naive Bayes on parity data");
    xor_cmd->add_option("--features", n_features)->capture_default_str();
    xor_cmd->add_option("--train", n_train)->capture_default_str();
    xor_cmd->add_option("--test", n_test)->capture_default_str();
    xor_cmd->add_option("--seeds", n_seeds)->capture_default_str();
    xor_cmd->add_option("--algorithms", algorithms_text, "Comma separated (default naive_hc,naive_km,naive_bayes)");
    add_fit_options(xor_cmd, fit);

    auto* order_cmd = app.add_subcommand("order", "Greedy conditional mutual information feature order");
    add_data_options(order_cmd, data, true);
    order_cmd->add_option("--smoothing", fit.smoothing)->capture_default_str();

    auto* bench = app.add_subcommand("benchmark", "Replicated train/test comparison of learners");
    add_data_options(bench, data, true);
    add_fit_options(bench, fit);
    bench->add_option("--algorithms", algorithms_text, "Comma separated, e.g. bj:0.01,hc_full,naive_km")->required();
    bench->add_option("--replications", replications)->capture_default_str();
    bench->add_option("--fraction", fraction, "Training fraction")->capture_default_str();
    bench->add_option("--positive", positive, "Positive class level for AUC");
    bench->add_option("--csv", out_path, "Per-fit CSV report (default: stdout)");
    bench->add_flag("--timings", timings, "Add wall times to the CSV");
    bench->add_flag("--protocol-caps", protocol_caps, "Cap search depth at 5 (hc_full) and 7 (bhc, hc_indep)");

    auto* convert = app.add_subcommand("convert-dag", "Staged tree of a Bayesian network");
    convert->add_option("--dag", dag_path, "DAG description file")->required();
    add_data_options(convert, data, false);
    convert->add_option("--smoothing", fit.smoothing)->capture_default_str();
    convert->add_option("--out", model_path, "Model file to write")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (train->parsed()) {
            const auto dataset = data.load();
            const auto choice = fit.choice(algorithm);
            const auto trained = st::train_classifier(dataset, choice, fit.options());
            st::Provenance prov;
            prov.algorithm = choice.label;
            prov.seed = fit.seed;
            prov.data_digest = hex(dataset.digest());
            prov.flags = {{"order", fit.order},
                          {"smoothing", exact(fit.smoothing)},
                          {"kl_eps", exact(fit.kl_eps)},
                          {"restarts", std::to_string(fit.restarts)}};
            if (!choice.naive_bayes && choice.config.algorithm == st::Algorithm::Bj) {
                prov.flags["kl_threshold"] = exact(choice.config.kl_threshold);
            }
            if (fit.max_search_depth) prov.flags["max_search_depth"] = std::to_string(*fit.max_search_depth);
            st::write_model(model_path, {trained.model, prov});
            std::cout << "order:";
            for (const auto& name : trained.order) std::cout << ' ' << name;
            std::cout << "\nstages: " << trained.model.staging().total_stages()
                      << "\nfree parameters: " << st::free_parameter_count(trained.model)
                      << "\nBIC: " << trained.trace.final_score << '\n';
            for (const auto& note : trained.trace.notes) std::cout << "note: " << note << '\n';
            if (show_trace) {
                for (const auto& step : trained.trace.steps) {
                    std::cout << step.move << "  " << step.score_before << " -> " << step.score_after;
                    if (step.divergence) std::cout << "  (kl " << *step.divergence << ")";
                    std::cout << '\n';
                }
            }
            return 0;
        }
        if (predict->parsed()) return run_predict(model_path, data.path, out_path);
        if (evaluate->parsed()) {
            const auto model = st::read_model(model_path).model;
            const auto& class_var = model.tree().class_variable();
            if (!data.titanic && data.class_column.empty()) data.class_column = class_var.name();
            const auto dataset = data.load();
            std::optional<std::size_t> pos;
            if (positive) pos = class_var.level_index(*positive);
            std::cout << metrics_text(st::evaluate(model, dataset, pos), class_var);
            return 0;
        }
        if (show_ci->parsed()) {
            std::cout << ci_report(st::read_model(model_path).model);
            return 0;
        }
        if (xor_cmd->parsed()) {
            st::XorExperimentSpec spec;
            spec.n_features = n_features;
            spec.n_train = n_train;
            spec.n_test = n_test;
            spec.n_seeds = n_seeds;
            spec.master_seed = fit.seed;
            if (!algorithms_text.empty()) spec.algorithms = split_list(algorithms_text);
            spec.options = fit.options();
            std::cout << st::xor_table(st::run_xor_experiment(spec));
            return 0;
        }
        if (order_cmd->parsed()) {
            const auto result = st::cmi_order(data.load(), fit.smoothing);
            for (std::size_t i = 0; i < result.order.size(); ++i) {
                std::cout << i + 1 << ' ' << result.order[i] << ' ' << fmt(result.scores[i]) << '\n';
            }
            return 0;
        }
        if (bench->parsed()) {
            const auto dataset = data.load();
            st::ExperimentSpec spec;
            spec.name = data.titanic ? "titanic" : data.path;
            for (const auto& name : split_list(algorithms_text)) spec.algorithms.push_back(fit.choice(name).label);
            spec.replications = replications;
            spec.train_fraction = fraction;
            spec.master_seed = fit.seed;
            spec.options = fit.options();
            spec.options.protocol_depth_caps = protocol_caps;
            if (positive) spec.positive_class = dataset.class_variable().level_index(*positive);
            const auto report = st::run_experiment(dataset, spec);
            std::cout << st::report_table(report);
            if (!out_path.empty()) {
                write_text(out_path, st::report_csv(report, timings));
            } else {
                std::cout << '\n' << st::report_csv(report, timings);
            }
            return report.has_failures() ? kExitPartial : 0;
        }
        if (convert->parsed()) {
            std::vector<st::VariableSpec> known;
            std::optional<st::CategoricalDataset> dataset;
            if (!data.path.empty()) {
                dataset = data.load();
                known = dataset->variables();
            }
            const auto dag = st::parse_dag(read_text(dag_path), known);
            const std::vector<st::VariableSpec> features(dag.variables().begin() + 1, dag.variables().end());
            const auto tree = st::build_event_tree(dag.variables().front(), features);
            st::StagedTreeModel model;
            st::Provenance prov;
            prov.algorithm = "dag";
            if (dag.has_cpts()) {
                model = st::model_from_dag(dag, tree);
            } else {
                if (!dataset) throw st::ValidationError("the DAG has no CPTs; pass --data and --class to fit them");
                model = st::fit_model(tree, st::staging_from_dag(dag, tree), st::tree_counts(*dataset, tree),
                                      fit.smoothing);
                prov.data_digest = hex(dataset->digest());
                prov.flags["smoothing"] = exact(fit.smoothing);
            }
            st::write_model(model_path, {model, prov});
            std::cout << "stages: " << model.staging().total_stages()
                      << "\nfree parameters: " << st::free_parameter_count(model) << '\n';
            return 0;
        }
    } catch (const st::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
