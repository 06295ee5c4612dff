#pragma once

// Chained-equations imputation of missing payload cells.
//
// One deterministic chain: columns start at their observed mean (numeric) or
// mode (discrete), then each sweep re-imputes every incomplete column from
// all other columns, visiting columns in ascending missing-count order.
// Numeric columns use least-squares linear regression. Discrete columns take
// the mode of the observed values whose regression prediction falls in the
// same quantile bucket as the missing cell's prediction, so imputed codes are
// always codes seen in that column.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scada_ids/dataset.hpp"
#include "scada_ids/error.hpp"
#include "scada_ids/taxonomy.hpp"

namespace scada_ids {

enum class NumericModel : std::uint8_t { linear_regression };
enum class CategoricalModel : std::uint8_t { mode_conditional };
enum class InitialFill : std::uint8_t { column_mean_or_mode };

struct ImputationConfig {
    int chain_iterations = 10;
    // Recorded for reproducibility; the chain itself draws no random numbers.
    std::uint64_t seed = 0;
    NumericModel numeric_model = NumericModel::linear_regression;
    CategoricalModel categorical_model = CategoricalModel::mode_conditional;
    InitialFill initial_fill = InitialFill::column_mean_or_mode;
    std::size_t buckets = 10;
};

[[nodiscard]] inline MissingnessMask detect_missing(const Dataset& d) {
    MissingnessMask mask{std::vector<std::array<bool, kFeatureCount>>(d.size())};
    for (std::size_t r = 0; r < d.size(); ++r) {
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            mask.cells[r][i] = is_missing(d.records[r].features[i]);
        }
    }
    return mask;
}

namespace detail {

// Smallest most-frequent value.
inline double mode_of(const std::vector<double>& values) {
    std::map<double, std::size_t> freq;
    for (double v : values) {
        ++freq[v];
    }
    double best = 0.0;
    std::size_t best_n = 0;
    for (const auto& [v, n] : freq) {
        if (n > best_n) {
            best = v;
            best_n = n;
        }
    }
    return best;
}

struct ColumnRegression {
    double intercept = 0.0;
    std::vector<std::size_t> predictors;
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;
    Eigen::VectorXd coef;

    [[nodiscard]] double predict(const Eigen::MatrixXd& x, Eigen::Index row) const {
        double y = intercept;
        for (std::size_t k = 0; k < predictors.size(); ++k) {
            const auto kk = static_cast<Eigen::Index>(k);
            y += coef[kk] * (x(row, static_cast<Eigen::Index>(predictors[k])) - mean[kk]) / scale[kk];
        }
        return y;
    }
};

// Least squares of column `target` on every other column, over `rows`.
// Predictors are centred and scaled; constant predictors are dropped and
// collinear ones get the minimum-norm solution.
inline ColumnRegression fit_column(const Eigen::MatrixXd& x, std::size_t target, const std::vector<Eigen::Index>& rows) {
    ColumnRegression fit;
    const auto n = static_cast<double>(rows.size());
    const auto t = static_cast<Eigen::Index>(target);

    double y_mean = 0.0;
    for (auto r : rows) {
        y_mean += x(r, t);
    }
    y_mean /= n;
    fit.intercept = y_mean;

    std::vector<double> means;
    std::vector<double> scales;
    for (std::size_t k = 0; k < static_cast<std::size_t>(x.cols()); ++k) {
        if (k == target) {
            continue;
        }
        const auto kk = static_cast<Eigen::Index>(k);
        double m = 0.0;
        for (auto r : rows) {
            m += x(r, kk);
        }
        m /= n;
        double ss = 0.0;
        for (auto r : rows) {
            ss += (x(r, kk) - m) * (x(r, kk) - m);
        }
        const double sd = std::sqrt(ss / n);
        if (sd > 1e-12 * std::max(1.0, std::abs(m))) {
            fit.predictors.push_back(k);
            means.push_back(m);
            scales.push_back(sd);
        }
    }
    const auto p = static_cast<Eigen::Index>(fit.predictors.size());
    fit.mean = Eigen::Map<Eigen::VectorXd>(means.data(), p);
    fit.scale = Eigen::Map<Eigen::VectorXd>(scales.data(), p);
    if (p == 0) {
        fit.coef = Eigen::VectorXd::Zero(0);
        return fit;
    }

    Eigen::MatrixXd z(static_cast<Eigen::Index>(rows.size()), p);
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        const auto r = rows[static_cast<std::size_t>(i)];
        for (Eigen::Index k = 0; k < p; ++k) {
            z(i, k) = (x(r, static_cast<Eigen::Index>(fit.predictors[static_cast<std::size_t>(k)])) - fit.mean[k]) /
                      fit.scale[k];
        }
        y[i] = x(r, t) - y_mean;
    }
    const Eigen::MatrixXd gram = z.transpose() * z;
    const Eigen::VectorXd rhs = z.transpose() * y;
    fit.coef = gram.completeOrthogonalDecomposition().solve(rhs);
    return fit;
}

} // namespace detail

/// Fills every missing cell; observed cells are copied untouched.
[[nodiscard]] inline Dataset mice_impute(const Dataset& d, const ImputationConfig& cfg = {}) {
    if (cfg.chain_iterations < 1) {
        throw ImputationError("chain_iterations must be at least 1");
    }
    if (cfg.buckets < 1) {
        throw ImputationError("bucket count must be at least 1");
    }
    const auto mask = detect_missing(d);
    Dataset out = d;
    if (!mask.any()) {
        return out;
    }

    const auto n = static_cast<Eigen::Index>(d.size());
    const auto f = static_cast<Eigen::Index>(kFeatureCount);
    Eigen::MatrixXd x(n, f);
    std::array<std::size_t, kFeatureCount> missing_count{};
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index i = 0; i < f; ++i) {
            x(r, i) = d.records[static_cast<std::size_t>(r)].features[static_cast<std::size_t>(i)];
            missing_count[static_cast<std::size_t>(i)] += mask.cells[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)];
        }
    }

    std::vector<std::size_t> order;
    std::array<std::vector<Eigen::Index>, kFeatureCount> observed;
    std::array<std::vector<Eigen::Index>, kFeatureCount> missing;
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        if (missing_count[i] == 0) {
            continue;
        }
        if (missing_count[i] == d.size()) {
            throw ImputationError("feature '" + std::string(d.schema[i].name) + "' has no observed values");
        }
        order.push_back(i);
        for (Eigen::Index r = 0; r < n; ++r) {
            (mask.cells[static_cast<std::size_t>(r)][i] ? missing[i] : observed[i]).push_back(r);
        }
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return missing_count[a] < missing_count[b]; });

    // Initial fill.
    for (std::size_t i : order) {
        const auto ii = static_cast<Eigen::Index>(i);
        std::vector<double> values;
        values.reserve(observed[i].size());
        for (auto r : observed[i]) {
            values.push_back(x(r, ii));
        }
        const double fill = d.schema[i].discrete
                                ? detail::mode_of(values)
                                : std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
        for (auto r : missing[i]) {
            x(r, ii) = fill;
        }
    }

    for (int sweep = 0; sweep < cfg.chain_iterations; ++sweep) {
        for (std::size_t i : order) {
            const auto ii = static_cast<Eigen::Index>(i);
            const auto fit = detail::fit_column(x, i, observed[i]);
            if (!d.schema[i].discrete) {
                for (auto r : missing[i]) {
                    x(r, ii) = fit.predict(x, r);
                }
                continue;
            }

            std::vector<std::pair<double, double>> scored; // (prediction, observed code)
            scored.reserve(observed[i].size());
            for (auto r : observed[i]) {
                scored.emplace_back(fit.predict(x, r), x(r, ii));
            }
            std::sort(scored.begin(), scored.end());
            const std::size_t buckets = std::min(cfg.buckets, scored.size());
            std::vector<double> upper(buckets);
            std::vector<double> bucket_mode(buckets);
            for (std::size_t b = 0; b < buckets; ++b) {
                const std::size_t lo = b * scored.size() / buckets;
                const std::size_t hi = (b + 1) * scored.size() / buckets;
                std::vector<double> codes;
                for (std::size_t k = lo; k < hi; ++k) {
                    codes.push_back(scored[k].second);
                }
                upper[b] = scored[hi - 1].first;
                bucket_mode[b] = detail::mode_of(codes);
            }
            for (auto r : missing[i]) {
                const double p = fit.predict(x, r);
                const auto it = std::lower_bound(upper.begin(), upper.end(), p);
                const auto b = it == upper.end() ? buckets - 1 : static_cast<std::size_t>(it - upper.begin());
                x(r, ii) = bucket_mode[b];
            }
        }
    }

    for (std::size_t i : order) {
        for (auto r : missing[i]) {
            out.records[static_cast<std::size_t>(r)].features[i] = x(r, static_cast<Eigen::Index>(i));
        }
    }
    out.provenance = Provenance::imputed;
    return out;
}

} // namespace scada_ids
