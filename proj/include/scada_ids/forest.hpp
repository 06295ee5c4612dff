#pragma once

// Gini decision trees and a bootstrap Random Forest with majority vote.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <exception>
#include <istream>
#include <mutex>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "scada_ids/error.hpp"
#include "scada_ids/label.hpp"
#include "scada_ids/rng.hpp"

namespace scada_ids {

/// Row-major feature matrix with one label per row.
struct Samples {
    std::size_t feature_count = 0;
    std::vector<double> values;
    std::vector<Label> labels;

    Samples() = default;
    explicit Samples(std::size_t features) : feature_count(features) {}

    [[nodiscard]] std::size_t size() const noexcept { return labels.size(); }
    [[nodiscard]] bool empty() const noexcept { return labels.empty(); }

    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return {values.data() + i * feature_count, feature_count};
    }
    [[nodiscard]] double at(std::size_t i, std::size_t f) const { return values[i * feature_count + f]; }

    void push_back(std::span<const double> x, Label y) {
        if (x.size() != feature_count) {
            throw TrainingError("row has " + std::to_string(x.size()) + " features, expected " +
                                std::to_string(feature_count));
        }
        values.insert(values.end(), x.begin(), x.end());
        labels.push_back(y);
    }
};

[[nodiscard]] inline int default_max_features(std::size_t feature_count) {
    return feature_count == 0 ? 1 : static_cast<int>(std::floor(std::log2(static_cast<double>(feature_count)))) + 1;
}

struct TrainConfig {
    int num_trees = 100;
    /// 0 selects floor(log2 F) + 1.
    int max_features = 0;
    int min_samples_leaf = 1;
    std::optional<int> max_depth;
    bool bootstrap = true;
    std::uint64_t seed = 1;
    /// Prediction chunk size. Has no effect on any prediction.
    int batch_size = 1000;
    /// Worker threads for training; 0 = hardware concurrency. Never serialized.
    unsigned threads = 0;

    [[nodiscard]] int resolved_max_features(std::size_t feature_count) const {
        return max_features > 0 ? max_features : std::min(default_max_features(feature_count), static_cast<int>(feature_count));
    }

    void validate(std::size_t feature_count) const {
        if (num_trees < 1) {
            throw TrainingError("num_trees must be at least 1");
        }
        if (max_features < 0 || static_cast<std::size_t>(resolved_max_features(feature_count)) > feature_count) {
            throw TrainingError("max_features must lie in 1.." + std::to_string(feature_count));
        }
        if (min_samples_leaf < 1) {
            throw TrainingError("min_samples_leaf must be at least 1");
        }
        if (max_depth && *max_depth < 1) {
            throw TrainingError("max_depth must be positive");
        }
        if (batch_size < 1) {
            throw TrainingError("batch_size must be positive");
        }
    }
};

/// Gini impurity 1 - sum(p_i^2) of a class-count vector.
template <typename Count>
[[nodiscard]] double gini(std::span<const Count> counts) {
    double total = 0.0;
    for (auto c : counts) {
        total += static_cast<double>(c);
    }
    if (total <= 0.0) {
        throw DomainError("gini of an all-zero count vector");
    }
    double sum_sq = 0.0;
    for (auto c : counts) {
        const double p = static_cast<double>(c) / total;
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

[[nodiscard]] inline double gini(const std::vector<std::size_t>& counts) {
    return gini(std::span<const std::size_t>(counts));
}

struct SplitChoice {
    std::size_t feature = 0;
    double threshold = 0.0;
    /// Count-weighted mean Gini of the two children.
    double impurity = 0.0;
};

struct DecisionTree {
    struct Node {
        // -1 marks a leaf.
        std::int32_t feature = -1;
        double threshold = 0.0;
        std::int32_t left = -1;
        std::int32_t right = -1;
        // Offset of this leaf's class counts in leaf_counts.
        std::uint32_t counts_offset = 0;
    };

    std::size_t class_count = 0;
    std::vector<Node> nodes;
    std::vector<std::uint32_t> leaf_counts;

    [[nodiscard]] bool is_leaf(std::size_t node) const { return nodes[node].feature < 0; }

    [[nodiscard]] std::span<const std::uint32_t> counts(std::size_t node) const {
        return {leaf_counts.data() + nodes[node].counts_offset, class_count};
    }

    [[nodiscard]] std::size_t leaf_for(std::span<const double> x) const {
        std::size_t n = 0;
        while (!is_leaf(n)) {
            const auto& node = nodes[n];
            n = static_cast<std::size_t>(x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left
                                                                                                     : node.right);
        }
        return n;
    }

    /// Majority class index of the leaf reached by x; ties go to the lowest index.
    [[nodiscard]] std::size_t vote(std::span<const double> x) const {
        const auto c = counts(leaf_for(x));
        return static_cast<std::size_t>(std::max_element(c.begin(), c.end()) - c.begin());
    }

    [[nodiscard]] std::size_t depth() const {
        std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 1}};
        std::size_t deepest = 0;
        while (!stack.empty()) {
            auto [n, d] = stack.back();
            stack.pop_back();
            deepest = std::max(deepest, d);
            if (!is_leaf(n)) {
                stack.emplace_back(static_cast<std::size_t>(nodes[n].left), d + 1);
                stack.emplace_back(static_cast<std::size_t>(nodes[n].right), d + 1);
            }
        }
        return deepest;
    }

    friend bool operator==(const DecisionTree& a, const DecisionTree& b) {
        if (a.class_count != b.class_count || a.nodes.size() != b.nodes.size() || a.leaf_counts != b.leaf_counts) {
            return false;
        }
        for (std::size_t i = 0; i < a.nodes.size(); ++i) {
            const auto& x = a.nodes[i];
            const auto& y = b.nodes[i];
            if (x.feature != y.feature || x.left != y.left || x.right != y.right || x.counts_offset != y.counts_offset ||
                (x.feature >= 0 && x.threshold != y.threshold)) {
                return false;
            }
        }
        return true;
    }
};

struct RandomForestModel {
    std::vector<DecisionTree> trees;
    /// Ascending; class index i of every tree is label_space[i].
    std::vector<Label> label_space;
    TrainConfig config;
    std::size_t feature_count = 0;
    std::string fingerprint;
};

namespace detail {

// Class index of each sample label within an ascending label space.
inline std::vector<std::uint32_t> encode_labels(const Samples& s, const std::vector<Label>& label_space) {
    std::vector<std::uint32_t> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto it = std::lower_bound(label_space.begin(), label_space.end(), s.labels[i]);
        if (it == label_space.end() || *it != s.labels[i]) {
            throw TrainingError("label " + std::to_string(s.labels[i]) + " is not in the label space");
        }
        out[i] = static_cast<std::uint32_t>(it - label_space.begin());
    }
    return out;
}

/// Split search over one node. Buffers are reused across nodes.
class SplitSearch {
public:
    SplitSearch(const Samples& samples, std::span<const std::uint32_t> classes, std::size_t class_count,
                std::size_t min_leaf)
        : samples_(samples), classes_(classes), k_(class_count), min_leaf_(min_leaf), left_(class_count),
          right_(class_count) {}

    // Best threshold on one feature over rows; updates `best` when strictly better.
    void scan(std::span<const std::size_t> rows, std::size_t feature, std::optional<SplitChoice>& best) {
        const std::size_t m = rows.size();
        sorted_.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            sorted_[i] = {samples_.at(rows[i], feature), classes_[rows[i]]};
        }
        std::sort(sorted_.begin(), sorted_.end());
        if (sorted_.front().first == sorted_.back().first) {
            return;
        }
        std::fill(left_.begin(), left_.end(), 0);
        std::fill(right_.begin(), right_.end(), 0);
        for (const auto& p : sorted_) {
            ++right_[p.second];
        }
        double sq_left = 0.0;
        double sq_right = 0.0;
        for (std::size_t c = 0; c < k_; ++c) {
            sq_right += static_cast<double>(right_[c]) * static_cast<double>(right_[c]);
        }
        const double total = static_cast<double>(m);
        for (std::size_t i = 0; i + 1 < m; ++i) {
            const auto c = sorted_[i].second;
            sq_left += 2.0 * static_cast<double>(left_[c]) + 1.0;
            sq_right -= 2.0 * static_cast<double>(right_[c]) - 1.0;
            ++left_[c];
            --right_[c];
            const double lo = sorted_[i].first;
            const double hi = sorted_[i + 1].first;
            const std::size_t nl = i + 1;
            const std::size_t nr = m - nl;
            if (lo == hi || nl < min_leaf_ || nr < min_leaf_) {
                continue;
            }
            const double dl = static_cast<double>(nl);
            const double dr = static_cast<double>(nr);
            const double impurity = ((dl - sq_left / dl) + (dr - sq_right / dr)) / total;
            if (!best || impurity < best->impurity) {
                double threshold = lo + (hi - lo) / 2.0;
                if (!(threshold < hi)) {
                    threshold = lo;
                }
                best = SplitChoice{feature, threshold, impurity};
            }
        }
    }

    [[nodiscard]] double node_gini(std::span<const std::size_t> rows) {
        std::fill(left_.begin(), left_.end(), 0);
        for (auto r : rows) {
            ++left_[classes_[r]];
        }
        return gini(std::span<const std::size_t>(left_));
    }

private:
    const Samples& samples_;
    std::span<const std::uint32_t> classes_;
    std::size_t k_;
    std::size_t min_leaf_;
    std::vector<std::pair<double, std::uint32_t>> sorted_;
    std::vector<std::size_t> left_;
    std::vector<std::size_t> right_;
};

// A split must lower impurity by more than rounding noise.
inline constexpr double kMinImpurityDecrease = 1e-12;

inline DecisionTree grow_tree(const Samples& samples, std::span<const std::uint32_t> classes, std::size_t class_count,
                              std::vector<std::size_t> rows, const TrainConfig& cfg, rng::Engine& engine) {
    DecisionTree tree;
    tree.class_count = class_count;
    const std::size_t f = samples.feature_count;
    const auto mtry = static_cast<std::size_t>(cfg.resolved_max_features(f));
    const auto min_leaf = static_cast<std::size_t>(cfg.min_samples_leaf);
    SplitSearch search(samples, classes, class_count, min_leaf);
    std::vector<std::size_t> features(f);
    std::vector<std::uint32_t> counts(class_count);

    struct Pending {
        std::size_t node;
        std::size_t begin;
        std::size_t end;
        int depth;
    };
    tree.nodes.emplace_back();
    std::vector<Pending> stack{{0, 0, rows.size(), 1}};

    auto make_leaf = [&](std::size_t node, std::span<const std::size_t> members) {
        std::fill(counts.begin(), counts.end(), 0U);
        for (auto r : members) {
            ++counts[classes[r]];
        }
        tree.nodes[node].feature = -1;
        tree.nodes[node].counts_offset = static_cast<std::uint32_t>(tree.leaf_counts.size());
        tree.leaf_counts.insert(tree.leaf_counts.end(), counts.begin(), counts.end());
    };

    while (!stack.empty()) {
        const Pending p = stack.back();
        stack.pop_back();
        const std::span<std::size_t> members(rows.data() + p.begin, p.end - p.begin);

        const double parent = search.node_gini(members);
        const bool depth_capped = cfg.max_depth && p.depth >= *cfg.max_depth;
        if (parent <= 0.0 || depth_capped || members.size() < 2 * min_leaf) {
            make_leaf(p.node, members);
            continue;
        }

        // Draw mtry features; if none of them splits, keep drawing from the rest.
        std::iota(features.begin(), features.end(), std::size_t{0});
        std::optional<SplitChoice> best;
        for (std::size_t drawn = 0; drawn < f; ++drawn) {
            const std::size_t pick = drawn + rng::index(engine, f - drawn);
            std::swap(features[drawn], features[pick]);
            search.scan(members, features[drawn], best);
            const bool useful = best && best->impurity < parent - kMinImpurityDecrease;
            if (drawn + 1 >= mtry && useful) {
                break;
            }
        }
        if (!best || !(best->impurity < parent - kMinImpurityDecrease)) {
            make_leaf(p.node, members);
            continue;
        }

        const auto mid = std::partition(members.begin(), members.end(), [&](std::size_t r) {
            return samples.at(r, best->feature) <= best->threshold;
        });
        const std::size_t split_at = p.begin + static_cast<std::size_t>(mid - members.begin());
        const auto left = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        auto& node = tree.nodes[p.node];
        node.feature = static_cast<std::int32_t>(best->feature);
        node.threshold = best->threshold;
        node.left = left;
        node.right = left + 1;
        stack.push_back({static_cast<std::size_t>(left + 1), split_at, p.end, p.depth + 1});
        stack.push_back({static_cast<std::size_t>(left), p.begin, split_at, p.depth + 1});
    }
    return tree;
}

inline std::string fingerprint_of(const Samples& s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    auto feed = [&h](std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xFFU;
            h *= 0x100000001B3ULL;
        }
    };
    feed(s.size());
    feed(s.feature_count);
    for (double v : s.values) {
        std::uint64_t bits = 0;
        std::memcpy(&bits, &v, sizeof bits);
        feed(bits);
    }
    for (Label y : s.labels) {
        feed(static_cast<std::uint64_t>(static_cast<std::int64_t>(y)));
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kHex[h & 0xFU];
        h >>= 4;
    }
    return out;
}

inline void check_input(const RandomForestModel& m, std::span<const double> x) {
    if (x.size() != m.feature_count) {
        throw PredictionError("input has " + std::to_string(x.size()) + " features, model expects " +
                              std::to_string(m.feature_count));
    }
    for (double v : x) {
        if (std::isnan(v)) {
            throw PredictionError("input has a missing value; impute before prediction");
        }
    }
}

} // namespace detail

/// Best (feature, threshold) over midpoints of consecutive distinct values,
/// minimising count-weighted child Gini. Empty when rows are pure or no split
/// lowers impurity. Candidates are searched in the given order; on equal
/// impurity the first found wins.
[[nodiscard]] inline std::optional<SplitChoice> best_split(const Samples& samples, std::span<const std::size_t> rows,
                                                           std::span<const std::size_t> candidates,
                                                           std::size_t min_samples_leaf = 1) {
    if (rows.empty()) {
        throw DomainError("best_split needs at least one row");
    }
    std::vector<Label> space(samples.labels);
    std::sort(space.begin(), space.end());
    space.erase(std::unique(space.begin(), space.end()), space.end());
    const auto classes = detail::encode_labels(samples, space);
    detail::SplitSearch search(samples, classes, space.size(), min_samples_leaf);
    const double parent = search.node_gini(rows);
    if (parent <= 0.0) {
        return std::nullopt;
    }
    std::optional<SplitChoice> best;
    for (std::size_t f : candidates) {
        if (f >= samples.feature_count) {
            throw DomainError("candidate feature " + std::to_string(f) + " is out of range");
        }
        search.scan(rows, f, best);
    }
    if (!best || !(best->impurity < parent - detail::kMinImpurityDecrease)) {
        return std::nullopt;
    }
    return best;
}

/// Trains cfg.num_trees trees. Tree t draws from a stream derived from
/// (cfg.seed, t), so the result does not depend on thread scheduling.
/// `label_space` may name labels absent from the samples; they get zero votes.
[[nodiscard]] inline RandomForestModel train_forest(const Samples& samples, const TrainConfig& cfg,
                                                    std::optional<std::vector<Label>> label_space = std::nullopt) {
    if (samples.empty()) {
        throw TrainingError("cannot train on an empty sample set");
    }
    if (samples.feature_count == 0) {
        throw TrainingError("samples have no features");
    }
    cfg.validate(samples.feature_count);
    for (double v : samples.values) {
        if (std::isnan(v)) {
            throw TrainingError("training data has a missing value; impute first");
        }
    }

    RandomForestModel model;
    model.config = cfg;
    model.feature_count = samples.feature_count;
    model.fingerprint = detail::fingerprint_of(samples);
    if (label_space) {
        model.label_space = std::move(*label_space);
    } else {
        model.label_space = samples.labels;
    }
    std::sort(model.label_space.begin(), model.label_space.end());
    model.label_space.erase(std::unique(model.label_space.begin(), model.label_space.end()), model.label_space.end());
    const auto classes = detail::encode_labels(samples, model.label_space);

    const auto n = samples.size();
    const auto tree_count = static_cast<std::size_t>(cfg.num_trees);
    model.trees.resize(tree_count);

    auto build = [&](std::size_t t) {
        rng::Engine engine(rng::derive(cfg.seed, t));
        std::vector<std::size_t> rows(n);
        if (cfg.bootstrap) {
            for (auto& r : rows) {
                r = rng::index(engine, n);
            }
        } else {
            std::iota(rows.begin(), rows.end(), std::size_t{0});
        }
        model.trees[t] = detail::grow_tree(samples, classes, model.label_space.size(), std::move(rows), cfg, engine);
    };

    unsigned workers = cfg.threads != 0 ? cfg.threads : std::max(1U, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, tree_count));
    if (workers <= 1) {
        for (std::size_t t = 0; t < tree_count; ++t) {
            build(t);
        }
        return model;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t t = next++; t < tree_count; t = next++) {
                try {
                    build(t);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return model;
}

/// Vote fractions aligned with m.label_space; they sum to 1.
[[nodiscard]] inline std::vector<double> predict_proba(const RandomForestModel& m, std::span<const double> x) {
    detail::check_input(m, x);
    std::vector<double> votes(m.label_space.size(), 0.0);
    for (const auto& tree : m.trees) {
        votes[tree.vote(x)] += 1.0;
    }
    const auto total = static_cast<double>(m.trees.size());
    for (auto& v : votes) {
        v /= total;
    }
    return votes;
}

/// Plurality vote; ties go to the lowest label.
[[nodiscard]] inline Label predict(const RandomForestModel& m, std::span<const double> x) {
    detail::check_input(m, x);
    std::vector<std::size_t> votes(m.label_space.size(), 0);
    for (const auto& tree : m.trees) {
        ++votes[tree.vote(x)];
    }
    return m.label_space[static_cast<std::size_t>(std::max_element(votes.begin(), votes.end()) - votes.begin())];
}

/// Predicts every row, batch_size rows at a time.
[[nodiscard]] inline std::vector<Label> predict_batch(const RandomForestModel& m, const Samples& rows,
                                                      std::optional<int> batch_size = std::nullopt) {
    const auto batch = static_cast<std::size_t>(std::max(1, batch_size.value_or(m.config.batch_size)));
    std::vector<Label> out(rows.size());
    for (std::size_t start = 0; start < rows.size(); start += batch) {
        const std::size_t stop = std::min(rows.size(), start + batch);
        for (std::size_t i = start; i < stop; ++i) {
            out[i] = predict(m, rows.row(i));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Serialization

inline constexpr std::string_view kForestFormat = "scada-ids-forest";
inline constexpr int kForestVersion = 1;

namespace detail {

inline nlohmann::json node_to_json(const DecisionTree& t, std::size_t n) {
    const auto& node = t.nodes[n];
    if (node.feature < 0) {
        const auto c = t.counts(n);
        return {{"counts", std::vector<std::uint32_t>(c.begin(), c.end())}};
    }
    return {{"feature", node.feature},
            {"threshold", node.threshold},
            {"left", node_to_json(t, static_cast<std::size_t>(node.left))},
            {"right", node_to_json(t, static_cast<std::size_t>(node.right))}};
}

// Rebuilds a tree with the node layout training produces: children are
// allocated as a pair when their parent is visited, left subtree first.
inline void tree_from_json(DecisionTree& t, const nlohmann::json& root, std::size_t feature_count) {
    t.nodes.emplace_back();
    std::vector<std::pair<std::size_t, const nlohmann::json*>> stack{{0, &root}};
    while (!stack.empty()) {
        const auto [index, j] = stack.back();
        stack.pop_back();
        if (j->contains("counts")) {
            const auto counts = j->at("counts").get<std::vector<std::uint32_t>>();
            if (counts.size() != t.class_count) {
                throw StructureError("leaf has " + std::to_string(counts.size()) + " counts, expected " +
                                     std::to_string(t.class_count));
            }
            if (std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}) == 0) {
                throw StructureError("leaf counts sum to zero");
            }
            t.nodes[index].counts_offset = static_cast<std::uint32_t>(t.leaf_counts.size());
            t.leaf_counts.insert(t.leaf_counts.end(), counts.begin(), counts.end());
            continue;
        }
        const auto feature = j->at("feature").get<std::int32_t>();
        if (feature < 0 || static_cast<std::size_t>(feature) >= feature_count) {
            throw StructureError("node feature " + std::to_string(feature) + " is out of range");
        }
        const auto left = static_cast<std::int32_t>(t.nodes.size());
        t.nodes.emplace_back();
        t.nodes.emplace_back();
        auto& node = t.nodes[index];
        node.feature = feature;
        node.threshold = j->at("threshold").get<double>();
        node.left = left;
        node.right = left + 1;
        stack.emplace_back(static_cast<std::size_t>(left + 1), &j->at("right"));
        stack.emplace_back(static_cast<std::size_t>(left), &j->at("left"));
    }
}

} // namespace detail

[[nodiscard]] inline nlohmann::json config_to_json(const TrainConfig& c) {
    return {{"num_trees", c.num_trees},
            {"max_features", c.max_features},
            {"min_samples_leaf", c.min_samples_leaf},
            {"max_depth", c.max_depth ? nlohmann::json(*c.max_depth) : nlohmann::json(nullptr)},
            {"bootstrap", c.bootstrap},
            {"seed", c.seed},
            {"batch_size", c.batch_size}};
}

/// Reads a TrainConfig; absent keys keep the values already in `base`.
[[nodiscard]] inline TrainConfig config_from_json(const nlohmann::json& j, TrainConfig base = {}) {
    base.num_trees = j.value("num_trees", base.num_trees);
    base.max_features = j.value("max_features", base.max_features);
    base.min_samples_leaf = j.value("min_samples_leaf", base.min_samples_leaf);
    if (j.contains("max_depth")) {
        base.max_depth = j.at("max_depth").is_null() ? std::nullopt : std::optional<int>(j.at("max_depth").get<int>());
    }
    base.bootstrap = j.value("bootstrap", base.bootstrap);
    base.seed = j.value("seed", base.seed);
    base.batch_size = j.value("batch_size", base.batch_size);
    return base;
}

[[nodiscard]] inline nlohmann::json to_json(const RandomForestModel& m) {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : m.trees) {
        trees.push_back({{"root", detail::node_to_json(t, 0)}});
    }
    return {{"format", kForestFormat},    {"version", kForestVersion},        {"feature_count", m.feature_count},
            {"label_space", m.label_space}, {"config", config_to_json(m.config)}, {"fingerprint", m.fingerprint},
            {"trees", std::move(trees)}};
}

[[nodiscard]] inline RandomForestModel forest_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format").get<std::string>() != kForestFormat) {
            throw StructureError("not a forest document");
        }
        if (j.at("version").get<int>() != kForestVersion) {
            throw StructureError("unsupported forest version " + std::to_string(j.at("version").get<int>()));
        }
        RandomForestModel m;
        m.feature_count = j.at("feature_count").get<std::size_t>();
        m.label_space = j.at("label_space").get<std::vector<Label>>();
        if (m.label_space.empty() || !std::is_sorted(m.label_space.begin(), m.label_space.end()) ||
            std::adjacent_find(m.label_space.begin(), m.label_space.end()) != m.label_space.end()) {
            throw StructureError("label space must be non-empty, ascending and unique");
        }
        m.config = config_from_json(j.at("config"));
        m.fingerprint = j.at("fingerprint").get<std::string>();
        for (const auto& tj : j.at("trees")) {
            DecisionTree t;
            t.class_count = m.label_space.size();
            detail::tree_from_json(t, tj.at("root"), m.feature_count);
            m.trees.push_back(std::move(t));
        }
        if (m.trees.size() != static_cast<std::size_t>(m.config.num_trees)) {
            throw StructureError("document holds " + std::to_string(m.trees.size()) + " trees, config says " +
                                 std::to_string(m.config.num_trees));
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw StructureError(std::string("malformed forest document: ") + e.what());
    }
}

inline void save_forest(const RandomForestModel& m, std::ostream& out) {
    out << to_json(m).dump() << '\n';
    if (!out) {
        throw Error("forest write failed");
    }
}

[[nodiscard]] inline RandomForestModel load_forest(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw StructureError(std::string("malformed forest document: ") + e.what());
    }
    return forest_from_json(j);
}

} // namespace scada_ids
