#include "stagedtree/learning.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "stagedtree/error.hpp"
#include "stagedtree/rng.hpp"

namespace stagedtree {
namespace {

// Smallest score gain accepted as an improvement; guards against accepting
// moves whose delta is pure rounding noise.
constexpr double kMinImprovement = 1e-9;

struct NameEntry {
    Algorithm algorithm;
    const char* name;
};

constexpr NameEntry kNames[] = {
    {Algorithm::Full, "full"},     {Algorithm::Indep, "indep"}, {Algorithm::HcIndep, "hc_indep"},
    {Algorithm::HcFull, "hc_full"}, {Algorithm::Bhc, "bhc"},     {Algorithm::Fbhc, "fbhc"},
    {Algorithm::Bj, "bj"},         {Algorithm::NaiveHc, "naive_hc"}, {Algorithm::NaiveKm, "naive_km"},
};

// Working copy of one depth during a search: labels plus per-stage sufficient
// statistics, recomputed whenever the depth changes.
struct DepthState {
    std::size_t depth = 0;
    std::size_t cardinality = 0;
    DepthStaging staging;
    std::vector<std::vector<double>> stage_counts;
    std::vector<std::size_t> stage_size;
    std::vector<double> stage_ll;
};

std::vector<double> vertex_counts(const TreeCounts& counts, std::size_t d, std::size_t v) {
    std::vector<double> out(counts.cardinality(d));
    for (std::size_t l = 0; l < out.size(); ++l) out[l] = static_cast<double>(counts.count(d, v, l));
    return out;
}

std::vector<double> added(std::vector<double> a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

std::vector<double> subtracted(std::vector<double> a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
}

void refresh(DepthState& state, const TreeCounts& counts, double smoothing) {
    const std::size_t n = state.staging.num_stages;
    state.stage_counts.assign(n, std::vector<double>(state.cardinality, 0.0));
    state.stage_size.assign(n, 0);
    for (std::size_t v = 0; v < state.staging.stage_of.size(); ++v) {
        const std::size_t s = state.staging.stage_of[v];
        ++state.stage_size[s];
        for (std::size_t l = 0; l < state.cardinality; ++l) {
            state.stage_counts[s][l] += static_cast<double>(counts.count(state.depth, v, l));
        }
    }
    state.stage_ll.resize(n);
    for (std::size_t s = 0; s < n; ++s) state.stage_ll[s] = stage_log_likelihood(state.stage_counts[s], smoothing);
}

DepthState make_state(const Staging& staging, const TreeCounts& counts, std::size_t d, double smoothing) {
    DepthState state;
    state.depth = d;
    state.cardinality = counts.cardinality(d);
    state.staging = staging.depth(d);
    refresh(state, counts, smoothing);
    return state;
}

void relabel(DepthState& state, const std::vector<std::size_t>& labels, const TreeCounts& counts, double smoothing) {
    state.staging = canonicalize(labels, state.staging.unobserved);
    refresh(state, counts, smoothing);
}

double penalty_per_stage(const DepthState& state, const TreeCounts& counts) {
    return 0.5 * static_cast<double>(state.cardinality - 1) * std::log(static_cast<double>(counts.n_records()));
}

double depth_score(const DepthState& state, const TreeCounts& counts) {
    double ll = 0.0;
    for (std::size_t s = 0; s < state.staging.num_stages; ++s) {
        if (!state.staging.is_unobserved(s)) ll += state.stage_ll[s];
    }
    return ll - static_cast<double>(state.staging.num_observed_stages()) * penalty_per_stage(state, counts);
}

double total_score(const std::vector<DepthState>& states, const TreeCounts& counts) {
    double score = 0.0;
    for (const auto& state : states) score += depth_score(state, counts);
    return score;
}

bool searchable(std::size_t d, std::optional<std::size_t> max_search_depth) {
    return !max_search_depth || d <= *max_search_depth;
}

Staging assemble(const EventTree& tree, const std::vector<DepthState>& states) {
    std::vector<std::vector<std::size_t>> labels;
    std::vector<std::optional<std::size_t>> unobserved;
    for (const auto& state : states) {
        labels.push_back(state.staging.stage_of);
        unobserved.push_back(state.staging.unobserved);
    }
    return Staging::from_labels(tree, labels, unobserved);
}

void require_records(const TreeCounts& counts) {
    if (counts.n_records() == 0) throw ValidationError("structure learning needs at least one training record");
}

std::vector<DepthState> prepare(const StagedTreeModel& start, const TreeCounts& counts, double smoothing,
                                Staging& staging) {
    require_records(counts);
    staging = mark_unobserved(start.staging(), counts);
    std::vector<DepthState> states;
    for (std::size_t d = 0; d < staging.num_depths(); ++d) states.push_back(make_state(staging, counts, d, smoothing));
    return states;
}

struct Move {
    double delta = -std::numeric_limits<double>::infinity();
    std::size_t depth = 0;
    std::size_t a = 0;  // vertex (free) or first stage (join)
    std::size_t b = 0;  // target stage, num_stages for a fresh stage
};

// Free move: vertex v leaves stage s for observed stage t, or for a fresh one.
double free_delta(const DepthState& state, const TreeCounts& counts, std::size_t v, std::size_t t, double smoothing) {
    const std::size_t s = state.staging.stage_of[v];
    const auto own = vertex_counts(counts, state.depth, v);
    const bool fresh = t == state.staging.num_stages;
    const bool empties = state.stage_size[s] == 1;
    double delta = stage_log_likelihood(subtracted(state.stage_counts[s], own), smoothing) - state.stage_ll[s];
    if (fresh) {
        delta += stage_log_likelihood(own, smoothing);
    } else {
        delta += stage_log_likelihood(added(state.stage_counts[t], own), smoothing) - state.stage_ll[t];
    }
    const double penalty = penalty_per_stage(state, counts);
    if (empties) delta += penalty;
    if (fresh) delta -= penalty;
    return delta;
}

double join_delta(const DepthState& state, const TreeCounts& counts, std::size_t s, std::size_t t, double smoothing) {
    return stage_log_likelihood(added(state.stage_counts[s], state.stage_counts[t]), smoothing) - state.stage_ll[s] -
           state.stage_ll[t] + penalty_per_stage(state, counts);
}

std::string describe_free(const DepthState& state, const Move& move) {
    std::ostringstream out;
    out << "depth " << move.depth << ": vertex " << move.a << " from stage " << state.staging.stage_of[move.a]
        << (move.b == state.staging.num_stages ? " to a new stage" : " to stage " + std::to_string(move.b));
    return out.str();
}

std::string describe_join(std::size_t depth, std::size_t s, std::size_t t) {
    return "depth " + std::to_string(depth) + ": join stages " + std::to_string(s) + " and " + std::to_string(t);
}

std::vector<double> stage_floret(const std::vector<double>& level_counts, double smoothing) {
    double total = 0.0;
    for (double v : level_counts) total += v;
    const double denom = total + smoothing * static_cast<double>(level_counts.size());
    std::vector<double> out(level_counts.size(), 1.0 / static_cast<double>(level_counts.size()));
    if (denom <= 0.0) return out;
    for (std::size_t l = 0; l < out.size(); ++l) out[l] = (level_counts[l] + smoothing) / denom;
    return out;
}

LearnResult finish(const EventTree& tree, const std::vector<DepthState>& states, const TreeCounts& counts,
                   double smoothing, SearchTrace trace) {
    // The final score is the running total, so a search without accepted
    // moves reports exactly its initial score.
    trace.final_score = trace.steps.empty() ? trace.initial_score : trace.steps.back().score_after;
    return {fit_model(tree, assemble(tree, states), counts, smoothing), std::move(trace)};
}

} // namespace

const char* to_string(Algorithm algorithm) {
    for (const auto& entry : kNames) {
        if (entry.algorithm == algorithm) return entry.name;
    }
    return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
    for (const auto& entry : kNames) {
        if (name == entry.name) return entry.algorithm;
    }
    throw ValidationError("unknown algorithm '" + name +
                          "' (expected full, indep, hc_indep, hc_full, bhc, fbhc, bj, naive_hc or naive_km)");
}

bool is_score_driven(Algorithm algorithm) {
    switch (algorithm) {
    case Algorithm::HcIndep:
    case Algorithm::HcFull:
    case Algorithm::Bhc:
    case Algorithm::Fbhc:
    case Algorithm::Bj: return true;
    default: return false;
    }
}

void LearnConfig::validate() const {
    if (algorithm == Algorithm::Bj && !(kl_threshold > 0.0)) {
        throw ValidationError("kl threshold must be > 0 for backward joining");
    }
    if (!(kl_epsilon > 0.0 && kl_epsilon < 1.0)) throw ValidationError("kl epsilon must lie in (0, 1)");
    if (max_search_depth && *max_search_depth < 1) throw ValidationError("max search depth must be >= 1");
    if (!std::isfinite(smoothing) || smoothing < 0.0) throw ValidationError("smoothing must be finite and >= 0");
    if (kmeans_restarts < 1) throw ValidationError("k-means needs at least one restart");
}

StagedTreeModel learn_baseline(const EventTree& tree, const TreeCounts& counts, BaselineMode mode, double smoothing) {
    const Staging start = mode == BaselineMode::Full ? Staging::full(tree) : Staging::independent(tree);
    return fit_model(tree, mark_unobserved(start, counts), counts, smoothing);
}

LearnResult hill_climb(const StagedTreeModel& start, const TreeCounts& counts, HillClimbDirection direction,
                       bool first_improvement, std::optional<std::size_t> max_search_depth, double smoothing) {
    Staging staging;
    auto states = prepare(start, counts, smoothing, staging);
    SearchTrace trace;
    trace.initial_score = total_score(states, counts);
    double score = trace.initial_score;

    for (;;) {
        Move best;
        bool found = false;
        for (auto& state : states) {
            if (found && first_improvement) break;
            if (!searchable(state.depth, max_search_depth)) continue;
            const auto& ds = state.staging;
            if (direction == HillClimbDirection::JoinOnly) {
                for (std::size_t s = 0; s < ds.num_stages && !(found && first_improvement); ++s) {
                    if (ds.is_unobserved(s)) continue;
                    for (std::size_t t = s + 1; t < ds.num_stages; ++t) {
                        if (ds.is_unobserved(t)) continue;
                        const double delta = join_delta(state, counts, s, t, smoothing);
                        if (delta > kMinImprovement && delta > best.delta) {
                            best = {delta, state.depth, s, t};
                            found = true;
                            if (first_improvement) break;
                        }
                    }
                }
            } else {
                for (std::size_t v = 0; v < ds.stage_of.size() && !(found && first_improvement); ++v) {
                    const std::size_t s = ds.stage_of[v];
                    if (ds.is_unobserved(s)) continue;
                    for (std::size_t t = 0; t <= ds.num_stages; ++t) {
                        if (t == s || (t < ds.num_stages && ds.is_unobserved(t))) continue;
                        if (t == ds.num_stages && state.stage_size[s] == 1) continue;
                        const double delta = free_delta(state, counts, v, t, smoothing);
                        if (delta > kMinImprovement && delta > best.delta) {
                            best = {delta, state.depth, v, t};
                            found = true;
                            if (first_improvement) break;
                        }
                    }
                }
            }
        }
        if (!found) break;

        auto& state = states[best.depth];
        std::vector<std::size_t> labels = state.staging.stage_of;
        std::string move;
        if (direction == HillClimbDirection::JoinOnly) {
            move = describe_join(best.depth, best.a, best.b);
            for (auto& label : labels) {
                if (label == best.b) label = best.a;
            }
        } else {
            move = describe_free(state, best);
            labels[best.a] = best.b;
        }
        relabel(state, labels, counts, smoothing);
        const double after = total_score(states, counts);
        trace.steps.push_back({move, score, after, std::nullopt});
        score = after;
    }
    return finish(start.tree(), states, counts, smoothing, std::move(trace));
}

LearnResult backward_join(const StagedTreeModel& start, const TreeCounts& counts, double threshold,
                          double smoothing, double kl_epsilon, std::optional<std::size_t> max_search_depth) {
    if (!(threshold > 0.0)) throw ValidationError("kl threshold must be > 0");
    Staging staging;
    auto states = prepare(start, counts, smoothing, staging);
    SearchTrace trace;
    trace.initial_score = total_score(states, counts);
    double score = trace.initial_score;

    for (auto& state : states) {
        if (!searchable(state.depth, max_search_depth)) continue;
        for (;;) {
            const auto& ds = state.staging;
            std::vector<std::vector<double>> florets(ds.num_stages);
            for (std::size_t s = 0; s < ds.num_stages; ++s) florets[s] = stage_floret(state.stage_counts[s], smoothing);
            double min_kl = std::numeric_limits<double>::infinity();
            std::size_t bs = 0, bt = 0;
            bool found = false;
            for (std::size_t s = 0; s < ds.num_stages; ++s) {
                if (ds.is_unobserved(s)) continue;
                for (std::size_t t = s + 1; t < ds.num_stages; ++t) {
                    if (ds.is_unobserved(t)) continue;
                    const double kl = symmetrized_kl(florets[s], florets[t], kl_epsilon);
                    if (!found || kl < min_kl) {
                        min_kl = kl;
                        bs = s;
                        bt = t;
                        found = true;
                    }
                }
            }
            if (!found || !(min_kl < threshold)) break;
            std::vector<std::size_t> labels = ds.stage_of;
            for (auto& label : labels) {
                if (label == bt) label = bs;
            }
            const std::string move = describe_join(state.depth, bs, bt);
            relabel(state, labels, counts, smoothing);
            const double after = total_score(states, counts);
            trace.steps.push_back({move, score, after, min_kl});
            score = after;
        }
    }
    return finish(start.tree(), states, counts, smoothing, std::move(trace));
}

LearnResult learn_naive(const EventTree& tree, const TreeCounts& counts, NaiveMethod method, double smoothing,
                        std::uint64_t seed, std::size_t restarts, Linkage linkage, Distance distance) {
    require_records(counts);
    const std::size_t n_classes = tree.cardinality(0);
    if (n_classes < 2) throw ValidationError("naive staged trees need at least two classes");

    const Staging base = mark_unobserved(Staging::full(tree), counts);
    std::vector<std::vector<std::size_t>> labels(tree.num_depths());
    std::vector<std::optional<std::size_t>> unobserved(tree.num_depths());
    SearchTrace trace;
    labels[0].assign(1, 0);

    for (std::size_t d = 1; d < tree.num_depths(); ++d) {
        const auto& ds = base.depth(d);
        const std::size_t n_vertices = tree.vertex_count(d);
        // Distinct florets of observed vertices, in first-occurrence order.
        std::map<std::vector<double>, std::size_t> distinct;
        std::vector<Point> points;
        std::vector<std::size_t> point_of(n_vertices, 0);
        for (std::size_t v = 0; v < n_vertices; ++v) {
            if (ds.is_unobserved(ds.stage_of[v])) continue;
            auto floret = stage_floret(vertex_counts(counts, d, v), smoothing);
            auto [it, inserted] = distinct.try_emplace(floret, points.size());
            if (inserted) points.push_back(std::move(floret));
            point_of[v] = it->second;
        }
        const std::size_t k = std::min(n_classes, points.size());
        if (points.size() < n_classes) {
            trace.notes.push_back("depth " + std::to_string(d) + ": " + std::to_string(points.size()) +
                                  " distinct observed florets, fewer than the " + std::to_string(n_classes) +
                                  " requested stages");
        }
        std::vector<std::size_t> cluster;
        if (!points.empty()) {
            cluster = method == NaiveMethod::HClust
                          ? hierarchical_clustering(points, k, linkage, distance)
                          : kmeans(points, k, mix_seed(seed, d), restarts).labels;
        }
        labels[d].resize(n_vertices);
        for (std::size_t v = 0; v < n_vertices; ++v) {
            labels[d][v] = ds.is_unobserved(ds.stage_of[v]) ? k : cluster[point_of[v]];
        }
        if (ds.unobserved) unobserved[d] = k;
    }

    LearnResult result{fit_model(tree, Staging::from_labels(tree, labels, unobserved), counts, smoothing),
                       std::move(trace)};
    result.trace.initial_score = result.trace.final_score = bic_score(result.model, counts).score;
    return result;
}

LearnResult learn(const EventTree& tree, const TreeCounts& counts, const LearnConfig& config) {
    config.validate();
    require_records(counts);
    const auto started = std::chrono::steady_clock::now();
    const double lambda = config.smoothing;
    auto baseline = [&](BaselineMode mode) { return learn_baseline(tree, counts, mode, lambda); };
    auto trivial = [&](StagedTreeModel model) {
        LearnResult result{std::move(model), {}};
        result.trace.initial_score = result.trace.final_score = bic_score(result.model, counts).score;
        return result;
    };

    LearnResult result;
    switch (config.algorithm) {
    case Algorithm::Full: result = trivial(baseline(BaselineMode::Full)); break;
    case Algorithm::Indep: result = trivial(baseline(BaselineMode::Indep)); break;
    case Algorithm::HcIndep:
        result = hill_climb(baseline(BaselineMode::Indep), counts, HillClimbDirection::Free, false,
                            config.max_search_depth, lambda);
        break;
    case Algorithm::HcFull:
        result = hill_climb(baseline(BaselineMode::Full), counts, HillClimbDirection::Free, false,
                            config.max_search_depth, lambda);
        break;
    case Algorithm::Bhc:
    case Algorithm::Fbhc:
        result = hill_climb(baseline(BaselineMode::Full), counts, HillClimbDirection::JoinOnly,
                            config.algorithm == Algorithm::Fbhc, config.max_search_depth, lambda);
        break;
    case Algorithm::Bj:
        result = backward_join(baseline(BaselineMode::Full), counts, config.kl_threshold, lambda, config.kl_epsilon,
                               config.max_search_depth);
        break;
    case Algorithm::NaiveHc:
    case Algorithm::NaiveKm:
        result = learn_naive(tree, counts,
                             config.algorithm == Algorithm::NaiveHc ? NaiveMethod::HClust : NaiveMethod::KMeans,
                             lambda, config.seed, config.kmeans_restarts, config.linkage, config.hclust_distance);
        break;
    }
    result.trace.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

} // namespace stagedtree
