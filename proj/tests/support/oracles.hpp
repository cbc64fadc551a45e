// Brute-force reference computations for the test suites. Everything here is
// written from the definitions, without calling the library routine under
// test, so agreement means two independent derivations match.
#ifndef STAGEDTREE_TESTS_ORACLES_HPP
#define STAGEDTREE_TESTS_ORACLES_HPP

#include <cmath>
#include <cstdint>
#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <vector>

#include "stagedtree/bn_bridge.hpp"
#include "stagedtree/dataset.hpp"
#include "stagedtree/model.hpp"

namespace oracle {

using Assignment = std::vector<std::size_t>;

// Every assignment of the given cardinalities, last position varying fastest.
inline std::vector<Assignment> all_assignments(const std::vector<std::size_t>& cards) {
    std::vector<Assignment> out;
    Assignment current(cards.size(), 0);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == cards.size()) {
            out.push_back(current);
            return;
        }
        for (std::size_t l = 0; l < cards[i]; ++l) {
            current[i] = l;
            rec(i + 1);
        }
    };
    rec(0);
    return out;
}

inline std::vector<std::size_t> cardinalities(const stagedtree::EventTree& tree) {
    std::vector<std::size_t> cards;
    for (const auto& v : tree.variables()) cards.push_back(v.cardinality());
    return cards;
}

// Vertex of a prefix, recomputed digit by digit from the definition.
inline std::size_t prefix_vertex(const std::vector<std::size_t>& cards, const Assignment& a, std::size_t depth) {
    std::size_t v = 0;
    for (std::size_t i = 0; i < depth; ++i) v = v * cards[i] + a[i];
    return v;
}

// Chain rule: product of the floret entries met along the path.
inline double chain_probability(const stagedtree::StagedTreeModel& model, const Assignment& a) {
    const auto cards = cardinalities(model.tree());
    double p = 1.0;
    for (std::size_t d = 0; d < cards.size(); ++d) {
        const std::size_t v = prefix_vertex(cards, a, d);
        p *= model.florets()[d][model.staging().depths()[d].stage_of[v]][a[d]];
    }
    return p;
}

inline std::map<Assignment, double> brute_joint(const stagedtree::StagedTreeModel& model) {
    std::map<Assignment, double> joint;
    for (const auto& a : all_assignments(cardinalities(model.tree()))) joint[a] = chain_probability(model, a);
    return joint;
}

// I(A; B) in nats from an explicit joint over assignments.
inline double mutual_information(const std::map<Assignment, double>& joint, const std::vector<std::size_t>& a_vars,
                                 const std::vector<std::size_t>& b_vars) {
    std::map<Assignment, double> pa, pb, pab;
    for (const auto& [x, p] : joint) {
        Assignment ka, kb;
        for (auto i : a_vars) ka.push_back(x[i]);
        for (auto i : b_vars) kb.push_back(x[i]);
        Assignment kab = ka;
        kab.insert(kab.end(), kb.begin(), kb.end());
        pa[ka] += p;
        pb[kb] += p;
        pab[kab] += p;
    }
    double mi = 0.0;
    for (const auto& [kab, p] : pab) {
        if (p <= 0.0) continue;
        const Assignment ka(kab.begin(), kab.begin() + static_cast<long>(a_vars.size()));
        const Assignment kb(kab.begin() + static_cast<long>(a_vars.size()), kab.end());
        mi += p * std::log(p / (pa[ka] * pb[kb]));
    }
    return mi;
}

// Plug-in I(X; C | G) from records, summing over observed cells only.
inline double plugin_cmi(const std::vector<Assignment>& records, std::size_t x, std::size_t c,
                         const std::vector<std::size_t>& given) {
    std::map<Assignment, double> n_g, n_gx, n_gc, n_gxc;
    for (const auto& r : records) {
        Assignment g;
        for (auto i : given) g.push_back(r[i]);
        auto gx = g, gc = g, gxc = g;
        gx.push_back(r[x]);
        gc.push_back(r[c]);
        gxc.push_back(r[x]);
        gxc.push_back(r[c]);
        n_g[g] += 1;
        n_gx[gx] += 1;
        n_gc[gc] += 1;
        n_gxc[gxc] += 1;
    }
    const double n = static_cast<double>(records.size());
    double cmi = 0.0;
    for (const auto& [gxc, count] : n_gxc) {
        Assignment g(gxc.begin(), gxc.end() - 2);
        auto gx = g, gc = g;
        gx.push_back(gxc[gxc.size() - 2]);
        gc.push_back(gxc.back());
        cmi += count / n * std::log(count * n_g[g] / (n_gx[gx] * n_gc[gc]));
    }
    return cmi;
}

// All set partitions of {0..n-1} as restricted growth strings.
inline std::vector<std::vector<std::size_t>> set_partitions(std::size_t n) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> current(n, 0);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t used) {
        if (i == n) {
            out.push_back(current);
            return;
        }
        for (std::size_t label = 0; label <= used && label < n; ++label) {
            current[i] = label;
            rec(i + 1, std::max(used, label + 1));
        }
    };
    if (n == 0) return {{}};
    rec(0, 0);
    return out;
}

inline std::vector<double> random_simplex(std::mt19937_64& gen, std::size_t k, double zero_chance = 0.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> p(k);
    double sum = 0.0;
    for (auto& x : p) {
        x = u(gen) < zero_chance ? 0.0 : u(gen) + 1e-3;
        sum += x;
    }
    if (sum == 0.0) {
        p[0] = 1.0;
        return p;
    }
    for (auto& x : p) x /= sum;
    // Absorb rounding in the largest entry so no entry can go negative.
    const std::size_t top = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        if (i != top) total += p[i];
    }
    p[top] = 1.0 - total;
    return p;
}

inline stagedtree::EventTree binary_tree(std::size_t n_vars, const std::string& class_name = "C") {
    std::vector<stagedtree::VariableSpec> features;
    for (std::size_t j = 1; j < n_vars; ++j) features.emplace_back("X" + std::to_string(j), std::vector<std::string>{"0", "1"});
    return stagedtree::build_event_tree(stagedtree::VariableSpec(class_name, {"0", "1"}), features);
}

inline stagedtree::EventTree tree_with_cards(const std::vector<std::size_t>& cards) {
    auto spec = [](const std::string& name, std::size_t k) {
        std::vector<std::string> levels;
        for (std::size_t l = 0; l < k; ++l) levels.push_back("l" + std::to_string(l));
        return stagedtree::VariableSpec(name, levels);
    };
    std::vector<stagedtree::VariableSpec> features;
    for (std::size_t j = 1; j < cards.size(); ++j) features.push_back(spec("X" + std::to_string(j), cards[j]));
    return stagedtree::build_event_tree(spec("C", cards[0]), features);
}

// Random staging (labels drawn from a few values per depth) with random florets.
inline stagedtree::StagedTreeModel random_model(const stagedtree::EventTree& tree, std::mt19937_64& gen,
                                                double zero_chance = 0.0) {
    std::vector<std::vector<std::size_t>> labels(tree.num_depths());
    for (std::size_t d = 0; d < tree.num_depths(); ++d) {
        const std::size_t k = 1 + gen() % tree.vertex_count(d);
        for (std::size_t v = 0; v < tree.vertex_count(d); ++v) labels[d].push_back(gen() % k);
    }
    const auto staging = stagedtree::Staging::from_labels(tree, labels);
    stagedtree::Florets florets(tree.num_depths());
    for (std::size_t d = 0; d < tree.num_depths(); ++d) {
        for (std::size_t s = 0; s < staging.depth(d).num_stages; ++s) {
            florets[d].push_back(random_simplex(gen, tree.cardinality(d), zero_chance));
        }
    }
    return stagedtree::StagedTreeModel(tree, staging, florets);
}

// Dataset over the tree's variables (class first) from explicit records.
inline stagedtree::CategoricalDataset dataset_for(const stagedtree::EventTree& tree,
                                                  std::vector<stagedtree::CategoricalDataset::Record> records) {
    return stagedtree::CategoricalDataset(tree.variables(), std::move(records), tree.class_variable().name());
}

// Log-likelihood summed record by record.
inline double record_log_likelihood(const stagedtree::StagedTreeModel& model,
                                    const std::vector<stagedtree::CategoricalDataset::Record>& records) {
    double ll = 0.0;
    for (const auto& r : records) ll += std::log(chain_probability(model, r));
    return ll;
}

// Stage labels of T_G computed straight from the parent sets: a vertex's label
// is the tuple of its parents' levels.
inline std::vector<std::vector<std::size_t>> dag_labels(const std::vector<std::size_t>& cards,
                                                        const std::vector<std::vector<std::size_t>>& parents) {
    std::vector<std::vector<std::size_t>> labels(cards.size());
    for (std::size_t d = 0; d < cards.size(); ++d) {
        const std::vector<std::size_t> prefix_cards(cards.begin(), cards.begin() + static_cast<long>(d));
        std::map<Assignment, std::size_t> ids;
        for (const auto& prefix : all_assignments(prefix_cards)) {
            Assignment key;
            for (auto p : parents[d]) key.push_back(prefix[p]);
            labels[d].push_back(ids.try_emplace(key, ids.size()).first->second);
        }
    }
    return labels;
}

// Best BIC over every staging that keeps unobserved vertices apart, found by
// enumerating all set partitions of the observed vertices of each depth.
// Counts are taken straight from the records; MLE florets, no smoothing.
inline double exhaustive_best_bic(const std::vector<std::size_t>& cards,
                                  const std::vector<stagedtree::CategoricalDataset::Record>& records) {
    const double n = static_cast<double>(records.size());
    double best_total = 0.0;
    for (std::size_t d = 0; d < cards.size(); ++d) {
        std::map<std::size_t, std::vector<double>> by_vertex;
        for (const auto& r : records) {
            auto& c = by_vertex[prefix_vertex(cards, r, d)];
            c.resize(cards[d], 0.0);
            c[r[d]] += 1.0;
        }
        std::vector<std::vector<double>> observed;
        for (auto& [v, c] : by_vertex) observed.push_back(c);
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& labels : set_partitions(observed.size())) {
            std::map<std::size_t, std::vector<double>> stages;
            for (std::size_t i = 0; i < labels.size(); ++i) {
                auto& s = stages[labels[i]];
                s.resize(cards[d], 0.0);
                for (std::size_t l = 0; l < cards[d]; ++l) s[l] += observed[i][l];
            }
            double ll = 0.0;
            for (const auto& [id, s] : stages) {
                double total = 0.0;
                for (double x : s) total += x;
                for (double x : s) {
                    if (x > 0.0) ll += x * std::log(x / total);
                }
            }
            const double score =
                ll - 0.5 * static_cast<double>(stages.size() * (cards[d] - 1)) * std::log(n);
            best = std::max(best, score);
        }
        best_total += best;
    }
    return best_total;
}

} // namespace oracle

#endif
