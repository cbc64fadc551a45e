#include "stagedtree/bn_bridge.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "stagedtree/error.hpp"

namespace stagedtree {
namespace {

constexpr double kCptRowTolerance = 1e-9;

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s, char sep) {
    std::vector<std::string> out;
    if (trim(s).empty()) return out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    return out;
}

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace

DagSpec::DagSpec(std::vector<VariableSpec> variables, std::vector<std::vector<std::size_t>> parents,
                 std::optional<std::vector<std::vector<double>>> cpts)
    : variables_(std::move(variables)), parents_(std::move(parents)), cpts_(std::move(cpts)) {
    if (variables_.empty()) throw ValidationError("a DAG needs at least one variable");
    if (parents_.size() != variables_.size()) throw ValidationError("one parent list per variable is required");
    for (std::size_t i = 0; i < variables_.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (variables_[j].name() == variables_[i].name()) {
                throw ValidationError("variable '" + variables_[i].name() + "' appears twice in the DAG");
            }
        }
        auto& ps = parents_[i];
        std::sort(ps.begin(), ps.end());
        if (std::adjacent_find(ps.begin(), ps.end()) != ps.end()) {
            throw ValidationError("variable '" + variables_[i].name() + "' lists a parent twice");
        }
        if (!ps.empty() && ps.back() >= i) {
            throw ValidationError("parent of '" + variables_[i].name() + "' does not precede it in the order");
        }
    }
    if (!cpts_) return;
    if (cpts_->size() != variables_.size()) throw ValidationError("one CPT per variable is required");
    for (std::size_t i = 0; i < variables_.size(); ++i) {
        const std::size_t card = variables_[i].cardinality();
        const auto& table = (*cpts_)[i];
        if (table.size() != parent_configurations(i) * card) {
            throw ValidationError("CPT of '" + variables_[i].name() + "' has " + std::to_string(table.size()) +
                                  " entries, expected " + std::to_string(parent_configurations(i) * card));
        }
        for (std::size_t row = 0; row < parent_configurations(i); ++row) {
            double sum = 0.0;
            for (std::size_t l = 0; l < card; ++l) {
                const double p = table[row * card + l];
                if (!(p >= 0.0 && p <= 1.0)) {
                    throw ValidationError("CPT of '" + variables_[i].name() + "' has an entry outside [0, 1]");
                }
                sum += p;
            }
            if (std::abs(sum - 1.0) > kCptRowTolerance) {
                throw ValidationError("CPT row " + std::to_string(row) + " of '" + variables_[i].name() +
                                      "' sums to " + format_double(sum));
            }
        }
    }
}

const std::vector<std::vector<double>>& DagSpec::cpts() const {
    if (!cpts_) throw ValidationError("the DAG has no conditional probability tables");
    return *cpts_;
}

std::size_t DagSpec::parent_configurations(std::size_t var) const {
    std::size_t n = 1;
    for (auto p : parents_.at(var)) n *= variables_[p].cardinality();
    return n;
}

std::size_t DagSpec::parent_configuration(std::size_t var, const Outcome& outcome) const {
    std::size_t cfg = 0;
    for (auto p : parents_.at(var)) {
        if (p >= outcome.size()) throw ValidationError("outcome too short for the parents of a variable");
        cfg = cfg * variables_[p].cardinality() + outcome[p];
    }
    return cfg;
}

double DagSpec::cpt(std::size_t var, std::size_t configuration, std::size_t level) const {
    return cpts().at(var).at(configuration * variables_.at(var).cardinality() + level);
}

DagSpec DagSpec::naive_bayes(const VariableSpec& class_var, const std::vector<VariableSpec>& features) {
    std::vector<VariableSpec> variables{class_var};
    variables.insert(variables.end(), features.begin(), features.end());
    std::vector<std::vector<std::size_t>> parents(variables.size(), std::vector<std::size_t>{0});
    parents[0].clear();
    return DagSpec(std::move(variables), std::move(parents));
}

Staging staging_from_dag(const DagSpec& dag, const EventTree& tree) {
    if (dag.variables() != tree.variables()) {
        throw ValidationError("DAG variables and levels must match the event tree order exactly");
    }
    std::vector<std::vector<std::size_t>> labels(tree.num_depths());
    for (std::size_t d = 0; d < tree.num_depths(); ++d) {
        labels[d].resize(tree.vertex_count(d));
        for (std::size_t v = 0; v < labels[d].size(); ++v) {
            labels[d][v] = dag.parent_configuration(d, tree.prefix(d, v));
        }
    }
    return Staging::from_labels(tree, labels);
}

StagedTreeModel model_from_dag(const DagSpec& dag, const EventTree& tree) {
    Staging staging = staging_from_dag(dag, tree);
    Florets florets(tree.num_depths());
    for (std::size_t d = 0; d < tree.num_depths(); ++d) {
        const std::size_t card = tree.cardinality(d);
        const auto& ds = staging.depth(d);
        florets[d].assign(ds.num_stages, {});
        for (std::size_t v = 0; v < ds.stage_of.size(); ++v) {
            auto& floret = florets[d][ds.stage_of[v]];
            if (!floret.empty()) continue;
            const std::size_t cfg = dag.parent_configuration(d, tree.prefix(d, v));
            floret.resize(card);
            double sum = 0.0;
            for (std::size_t l = 0; l < card; ++l) sum += floret[l] = dag.cpt(d, cfg, l);
            // CPT rows are only checked to 1e-9; florets need tighter sums.
            for (auto& p : floret) p /= sum;
        }
    }
    return StagedTreeModel(tree, std::move(staging), std::move(florets));
}

double bn_joint_oracle(const DagSpec& dag, const Outcome& outcome) {
    if (outcome.size() != dag.variables().size()) throw ValidationError("outcome length does not match the DAG");
    double p = 1.0;
    for (std::size_t k = 0; k < outcome.size(); ++k) {
        if (outcome[k] >= dag.variables()[k].cardinality()) throw ValidationError("outcome level out of range");
        p *= dag.cpt(k, dag.parent_configuration(k, outcome), outcome[k]);
    }
    return p;
}

DagSpec parse_dag(const std::string& text, const std::vector<VariableSpec>& known) {
    std::vector<VariableSpec> variables;
    std::vector<std::vector<std::size_t>> parents;
    std::vector<std::vector<double>> cpts;
    std::size_t with_cpt = 0;
    std::map<std::string, std::size_t> index;

    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        auto fail = [&](const std::string& what) {
            throw FormatError("DAG line " + std::to_string(line_no) + ": " + what);
        };
        const auto segments = split_list(stripped, '|');
        const std::string name = segments.front();
        if (name.empty()) fail("missing variable name");
        if (index.count(name)) fail("variable '" + name + "' defined twice");

        std::optional<std::vector<std::string>> levels;
        std::vector<std::size_t> ps;
        std::optional<std::vector<double>> cpt;
        for (std::size_t i = 1; i < segments.size(); ++i) {
            const auto colon = segments[i].find(':');
            if (colon == std::string::npos) fail("segment '" + segments[i] + "' lacks a 'key:'");
            const std::string key = trim(segments[i].substr(0, colon));
            const std::string value = segments[i].substr(colon + 1);
            if (key == "levels") {
                levels = split_list(value, ',');
            } else if (key == "parents") {
                for (const auto& p : split_list(value, ',')) {
                    auto it = index.find(p);
                    if (it == index.end()) fail("parent '" + p + "' of '" + name + "' is not defined above it");
                    ps.push_back(it->second);
                }
            } else if (key == "cpt") {
                cpt.emplace();
                for (const auto& x : split_list(value, ',')) {
                    try {
                        std::size_t used = 0;
                        cpt->push_back(std::stod(x, &used));
                        if (used != x.size()) throw std::invalid_argument(x);
                    } catch (const std::logic_error&) {
                        fail("CPT entry '" + x + "' is not a number");
                    }
                }
            } else {
                fail("unknown key '" + key + "'");
            }
        }
        if (!levels) {
            auto it = std::find_if(known.begin(), known.end(), [&](const auto& v) { return v.name() == name; });
            if (it == known.end()) fail("no levels given for '" + name + "'");
            levels = it->levels();
        }
        try {
            variables.emplace_back(name, *levels);
        } catch (const ValidationError& e) {
            fail(e.what());
        }
        index[name] = variables.size() - 1;
        parents.push_back(std::move(ps));
        if (cpt) ++with_cpt;
        cpts.push_back(cpt.value_or(std::vector<double>{}));
    }
    if (variables.empty()) throw FormatError("DAG text defines no variables");
    if (with_cpt != 0 && with_cpt != variables.size()) {
        throw FormatError("either every variable or none must carry a cpt");
    }
    try {
        return DagSpec(std::move(variables), std::move(parents),
                       with_cpt ? std::optional(std::move(cpts)) : std::nullopt);
    } catch (const FormatError&) {
        throw;
    } catch (const ValidationError& e) {
        throw FormatError(std::string("DAG: ") + e.what());
    }
}

DagSpec read_dag(const std::filesystem::path& path, const std::vector<VariableSpec>& known) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open DAG file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_dag(buffer.str(), known);
}

std::string format_dag(const DagSpec& dag) {
    std::ostringstream out;
    const auto& vars = dag.variables();
    for (std::size_t i = 0; i < vars.size(); ++i) {
        out << vars[i].name() << " | levels: ";
        for (std::size_t l = 0; l < vars[i].cardinality(); ++l) out << (l ? "," : "") << vars[i].level(l);
        out << " | parents: ";
        const auto& ps = dag.parents(i);
        for (std::size_t j = 0; j < ps.size(); ++j) out << (j ? "," : "") << vars[ps[j]].name();
        if (dag.has_cpts()) {
            out << " | cpt: ";
            const auto& table = dag.cpts()[i];
            for (std::size_t j = 0; j < table.size(); ++j) out << (j ? "," : "") << format_double(table[j]);
        }
        out << '\n';
    }
    return out.str();
}

} // namespace stagedtree
