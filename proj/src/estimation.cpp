#include "stagedtree/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "stagedtree/error.hpp"

namespace stagedtree {

double StageCounts::total(std::size_t depth, std::size_t stage) const {
    double sum = 0.0;
    for (double v : counts[depth][stage]) sum += v;
    return sum;
}

StageCounts stage_counts(const TreeCounts& counts, const Staging& staging) {
    if (counts.num_depths() != staging.num_depths()) {
        throw ValidationError("counts and staging describe different trees");
    }
    StageCounts out;
    out.counts.resize(staging.num_depths());
    for (std::size_t d = 0; d < staging.num_depths(); ++d) {
        const auto& depth = staging.depth(d);
        const std::size_t card = counts.cardinality(d);
        if (counts.vertex_count(d) != depth.stage_of.size()) {
            throw ValidationError("counts and staging disagree at depth " + std::to_string(d));
        }
        out.counts[d].assign(depth.num_stages, std::vector<double>(card, 0.0));
        for (std::size_t v = 0; v < depth.stage_of.size(); ++v) {
            auto& stage = out.counts[d][depth.stage_of[v]];
            for (std::size_t l = 0; l < card; ++l) stage[l] += static_cast<double>(counts.count(d, v, l));
        }
    }
    return out;
}

Staging mark_unobserved(const Staging& staging, const TreeCounts& counts) {
    if (counts.num_depths() != staging.num_depths()) {
        throw ValidationError("counts and staging describe different trees");
    }
    Staging out = staging;
    for (std::size_t d = 0; d < staging.num_depths(); ++d) {
        const auto& depth = staging.depth(d);
        const std::size_t unobserved_label = depth.num_stages;  // fresh label
        std::vector<std::size_t> labels = depth.stage_of;
        bool any = false;
        for (std::size_t v = 0; v < labels.size(); ++v) {
            if (counts.reach(d, v) == 0) {
                labels[v] = unobserved_label;
                any = true;
            }
        }
        out = out.with_depth(d, labels, any ? std::optional<std::size_t>(unobserved_label) : std::nullopt);
    }
    return out;
}

Florets fit_floret_probabilities(const StageCounts& counts, const Staging& staging, double smoothing) {
    if (!std::isfinite(smoothing) || smoothing < 0.0) throw ValidationError("smoothing must be finite and >= 0");
    Florets florets(counts.counts.size());
    for (std::size_t d = 0; d < counts.counts.size(); ++d) {
        const auto& depth = staging.depth(d);
        florets[d].resize(counts.counts[d].size());
        for (std::size_t s = 0; s < counts.counts[d].size(); ++s) {
            const auto& level_counts = counts.counts[d][s];
            const std::size_t card = level_counts.size();
            auto& floret = florets[d][s];
            floret.assign(card, 1.0 / static_cast<double>(card));
            if (depth.is_unobserved(s)) continue;
            double total = 0.0;
            for (double v : level_counts) total += v;
            const double denom = total + smoothing * static_cast<double>(card);
            if (denom <= 0.0) {
                throw std::logic_error("observed stage " + std::to_string(s) + " at depth " + std::to_string(d) +
                                       " has no counts; mark unobserved vertices before fitting");
            }
            for (std::size_t l = 0; l < card; ++l) floret[l] = (level_counts[l] + smoothing) / denom;
        }
    }
    return florets;
}

StagedTreeModel fit_model(const EventTree& tree, const Staging& staging, const TreeCounts& counts,
                          double smoothing) {
    return StagedTreeModel(tree, staging,
                           fit_floret_probabilities(stage_counts(counts, staging), staging, smoothing));
}

double depth_log_likelihood(const StagedTreeModel& model, const TreeCounts& counts, std::size_t d) {
    const std::size_t card = model.tree().cardinality(d);
    double ll = 0.0;
    for (std::size_t v = 0; v < model.tree().vertex_count(d); ++v) {
        const auto& floret = model.vertex_floret(d, v);
        for (std::size_t l = 0; l < card; ++l) {
            const auto n = counts.count(d, v, l);
            if (n == 0) continue;
            if (floret[l] <= 0.0) return kNegativeInfinity;
            ll += static_cast<double>(n) * std::log(floret[l]);
        }
    }
    return ll;
}

double log_likelihood(const StagedTreeModel& model, const TreeCounts& counts) {
    if (counts.num_depths() != model.tree().num_depths()) {
        throw ValidationError("counts and model describe different trees");
    }
    double ll = 0.0;
    for (std::size_t d = 0; d < model.tree().num_depths(); ++d) {
        const double part = depth_log_likelihood(model, counts, d);
        if (part == kNegativeInfinity) return kNegativeInfinity;
        ll += part;
    }
    return ll;
}

double stage_log_likelihood(const std::vector<double>& level_counts, double smoothing) {
    double total = 0.0;
    for (double v : level_counts) total += v;
    if (total <= 0.0) return 0.0;
    const double denom = total + smoothing * static_cast<double>(level_counts.size());
    double ll = 0.0;
    for (double n : level_counts) {
        if (n > 0.0) ll += n * std::log((n + smoothing) / denom);
    }
    return ll;
}

ScoreValue make_score(double log_likelihood, std::size_t n_params, std::uint64_t n_records) {
    if (n_records == 0) throw ValidationError("BIC needs at least one record");
    ScoreValue value;
    value.log_likelihood = log_likelihood;
    value.n_params = n_params;
    value.n_records = n_records;
    value.score = log_likelihood - 0.5 * static_cast<double>(n_params) * std::log(static_cast<double>(n_records));
    return value;
}

ScoreValue bic_score(const StagedTreeModel& model, const TreeCounts& counts) {
    return make_score(log_likelihood(model, counts), free_parameter_count(model), counts.n_records());
}

double depth_bic_score(const StagedTreeModel& model, const TreeCounts& counts, std::size_t depth) {
    if (counts.n_records() == 0) throw ValidationError("BIC needs at least one record");
    const double k = static_cast<double>(model.staging().depth(depth).num_observed_stages() *
                                         (model.tree().cardinality(depth) - 1));
    return depth_log_likelihood(model, counts, depth) -
           0.5 * k * std::log(static_cast<double>(counts.n_records()));
}

double symmetrized_kl(const std::vector<double>& p, const std::vector<double>& q, double epsilon) {
    if (p.size() != q.size()) throw ValidationError("KL divergence of vectors with different lengths");
    auto floor_normalize = [epsilon](const std::vector<double>& v) {
        std::vector<double> out(v.size());
        double sum = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            out[i] = std::max(v[i], epsilon);
            sum += out[i];
        }
        for (auto& x : out) x /= sum;
        return out;
    };
    const auto a = floor_normalize(p);
    const auto b = floor_normalize(q);
    double kl = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        // (a - b)(ln a - ln b) is KL(a||b) + KL(b||a) term by term; symmetric in a, b.
        kl += (a[i] - b[i]) * (std::log(a[i]) - std::log(b[i]));
    }
    return kl;
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw ValidationError("total variation of vectors with different lengths");
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
    return 0.5 * sum;
}

} // namespace stagedtree
