#pragma once

// Independent reference computations used only by tests. None of these call
// into the code paths they check.

#include <cstddef>
#include <cstdint>
#include <iterator>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "scada_ids/forest.hpp"

namespace oracle {

// Direct definition: 1 - sum over classes of (count / total)^2.
inline double gini_of(const std::map<scada_ids::Label, std::size_t>& counts) {
    double total = 0;
    for (const auto& [label, c] : counts) {
        total += static_cast<double>(c);
    }
    double s = 0;
    for (const auto& [label, c] : counts) {
        s += (static_cast<double>(c) / total) * (static_cast<double>(c) / total);
    }
    return 1.0 - s;
}

struct ExhaustiveSplit {
    std::size_t feature;
    double threshold;
    double impurity;
};

/// Weighted child Gini of splitting rows at x[feature] <= threshold.
inline double split_impurity(const scada_ids::Samples& s, std::span<const std::size_t> rows, std::size_t feature,
                             double threshold) {
    std::map<scada_ids::Label, std::size_t> left;
    std::map<scada_ids::Label, std::size_t> right;
    for (auto r : rows) {
        (s.at(r, feature) <= threshold ? left : right)[s.labels[r]]++;
    }
    std::size_t nl = 0;
    std::size_t nr = 0;
    for (const auto& [l, c] : left) {
        nl += c;
    }
    for (const auto& [l, c] : right) {
        nr += c;
    }
    const double n = static_cast<double>(nl + nr);
    return (nl ? static_cast<double>(nl) / n * gini_of(left) : 0.0) +
           (nr ? static_cast<double>(nr) / n * gini_of(right) : 0.0);
}

/// Tries every (feature, midpoint) pair.
inline std::optional<ExhaustiveSplit> exhaustive_split(const scada_ids::Samples& s, std::span<const std::size_t> rows,
                                                       std::span<const std::size_t> features) {
    std::map<scada_ids::Label, std::size_t> parent_counts;
    for (auto r : rows) {
        parent_counts[s.labels[r]]++;
    }
    const double parent = gini_of(parent_counts);
    std::optional<ExhaustiveSplit> best;
    for (auto f : features) {
        std::set<double> values;
        for (auto r : rows) {
            values.insert(s.at(r, f));
        }
        for (auto it = values.begin(); std::next(it) != values.end(); ++it) {
            const double t = (*it + *std::next(it)) / 2.0;
            const double imp = split_impurity(s, rows, f, t);
            if (!best || imp < best->impurity) {
                best = ExhaustiveSplit{f, t, imp};
            }
        }
    }
    if (!best || !(best->impurity < parent - 1e-12)) {
        return std::nullopt;
    }
    return best;
}

/// Per-cell tally of (truth, prediction) pairs.
inline std::vector<std::vector<std::uint64_t>> tally(std::span<const scada_ids::Label> truth,
                                                     std::span<const scada_ids::Label> predicted,
                                                     std::span<const scada_ids::Label> labels) {
    std::vector<std::vector<std::uint64_t>> out(labels.size(), std::vector<std::uint64_t>(labels.size(), 0));
    for (std::size_t t = 0; t < labels.size(); ++t) {
        for (std::size_t p = 0; p < labels.size(); ++p) {
            for (std::size_t i = 0; i < truth.size(); ++i) {
                if (truth[i] == labels[t] && predicted[i] == labels[p]) {
                    ++out[t][p];
                }
            }
        }
    }
    return out;
}

} // namespace oracle
