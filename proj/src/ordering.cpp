#include "stagedtree/ordering.hpp"

#include <algorithm>
#include <cmath>

#include "stagedtree/error.hpp"

namespace stagedtree {

double conditional_mutual_information(const CategoricalDataset& dataset, const std::string& x, const std::string& c,
                                      const std::vector<std::string>& given, double smoothing,
                                      std::size_t cell_cap) {
    if (!(smoothing >= 0.0) || !std::isfinite(smoothing)) throw ValidationError("smoothing must be finite and >= 0");
    if (std::find(given.begin(), given.end(), x) != given.end()) {
        throw ValidationError("'" + x + "' cannot be both the target and in the conditioning set");
    }
    const std::size_t x_col = dataset.column(x);
    const std::size_t c_col = dataset.column(c);
    const std::size_t nx = dataset.variables()[x_col].cardinality();
    const std::size_t nc = dataset.variables()[c_col].cardinality();

    std::vector<std::size_t> given_cols;
    std::size_t n_given = 1;
    for (const auto& name : given) {
        const std::size_t col = dataset.column(name);
        given_cols.push_back(col);
        const std::size_t card = dataset.variables()[col].cardinality();
        if (n_given > cell_cap / card) throw ValidationError("conditioning set too large for the CMI cell cap");
        n_given *= card;
    }
    if (n_given > cell_cap / (nx * nc)) throw ValidationError("conditioning set too large for the CMI cell cap");

    std::vector<double> joint(n_given * nx * nc, smoothing);
    for (const auto& record : dataset.records()) {
        std::size_t g = 0;
        for (std::size_t i = 0; i < given_cols.size(); ++i) {
            g = g * dataset.variables()[given_cols[i]].cardinality() + record[given_cols[i]];
        }
        joint[(g * nx + record[x_col]) * nc + record[c_col]] += 1.0;
    }

    double total = 0.0;
    for (double v : joint) total += v;
    if (total <= 0.0) return 0.0;

    // I = sum_g sum_{x,c} n(g,x,c)/N * ln( n(g,x,c) n(g) / (n(g,x) n(g,c)) )
    double info = 0.0;
    std::vector<double> by_x(nx), by_c(nc);
    for (std::size_t g = 0; g < n_given; ++g) {
        const double* cell = &joint[g * nx * nc];
        std::fill(by_x.begin(), by_x.end(), 0.0);
        std::fill(by_c.begin(), by_c.end(), 0.0);
        double n_g = 0.0;
        for (std::size_t i = 0; i < nx; ++i) {
            for (std::size_t j = 0; j < nc; ++j) {
                by_x[i] += cell[i * nc + j];
                by_c[j] += cell[i * nc + j];
                n_g += cell[i * nc + j];
            }
        }
        if (n_g <= 0.0) continue;
        for (std::size_t i = 0; i < nx; ++i) {
            for (std::size_t j = 0; j < nc; ++j) {
                const double n = cell[i * nc + j];
                if (n <= 0.0) continue;
                info += n * std::log(n * n_g / (by_x[i] * by_c[j]));
            }
        }
    }
    return info / total;
}

OrderingResult cmi_order(const CategoricalDataset& dataset, double smoothing, std::size_t cell_cap) {
    auto remaining = dataset.feature_names();
    if (remaining.empty()) throw ValidationError("dataset has no features to order");
    const std::string& class_name = dataset.class_column();
    OrderingResult result;
    while (!remaining.empty()) {
        std::size_t best = 0;
        double best_score = -1.0;
        for (std::size_t i = 0; i < remaining.size(); ++i) {
            const double score =
                conditional_mutual_information(dataset, remaining[i], class_name, result.order, smoothing, cell_cap);
            if (i == 0 || score > best_score + 1e-12) {
                best = i;
                best_score = score;
            }
        }
        result.order.push_back(remaining[best]);
        result.scores.push_back(best_score);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
    }
    return result;
}

} // namespace stagedtree
