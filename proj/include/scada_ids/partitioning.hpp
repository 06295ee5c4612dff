#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "scada_ids/dataset.hpp"
#include "scada_ids/error.hpp"
#include "scada_ids/rng.hpp"

namespace scada_ids {

/// Ascending record indices.
struct Split {
    std::vector<std::size_t> indices;

    [[nodiscard]] std::size_t size() const noexcept { return indices.size(); }
    friend bool operator==(const Split&, const Split&) = default;
};

struct Fold {
    int fold_id = 1;
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;

    friend bool operator==(const Fold&, const Fold&) = default;
};

using Splits = std::array<Split, 3>;
using Folds = std::array<Fold, 3>;

/// Three splits stratified on the subclass label. Each stratum is shuffled
/// with the seed and dealt round-robin; the dealing position carries over from
/// one stratum to the next so remainders spread across splits.
[[nodiscard]] inline Splits stratified_split3(const Dataset& d, std::uint64_t seed) {
    if (!d.complete()) {
        throw StructureError("stratified split needs a complete dataset; impute first");
    }
    std::array<std::vector<std::size_t>, kSubclassCount + 1> strata;
    for (std::size_t i = 0; i < d.size(); ++i) {
        strata[to_int(d.records[i].subclass)].push_back(i);
    }
    rng::Engine engine(rng::derive(seed, 0x3517));
    Splits splits;
    std::size_t dealer = rng::index(engine, 3);
    for (auto& stratum : strata) {
        rng::shuffle(std::span<std::size_t>(stratum), engine);
        for (std::size_t idx : stratum) {
            splits[dealer % 3].indices.push_back(idx);
            ++dealer;
        }
    }
    for (auto& s : splits) {
        std::sort(s.indices.begin(), s.indices.end());
    }
    return splits;
}

/// Fold i tests on split i and trains on the union of the other two.
/// `total` is the dataset size the splits must partition.
[[nodiscard]] inline Folds make_folds(const Splits& splits, std::size_t total) {
    std::vector<std::uint8_t> seen(total, 0);
    for (std::size_t k = 0; k < 3; ++k) {
        for (std::size_t idx : splits[k].indices) {
            if (idx >= total) {
                throw StructureError("split " + std::to_string(k + 1) + " holds index " + std::to_string(idx) +
                                     " outside a dataset of " + std::to_string(total));
            }
            if (seen[idx]++ != 0) {
                throw StructureError("index " + std::to_string(idx) + " appears in more than one split");
            }
        }
    }
    for (std::size_t idx = 0; idx < total; ++idx) {
        if (seen[idx] == 0) {
            throw StructureError("index " + std::to_string(idx) + " is in no split");
        }
    }

    Folds folds;
    for (std::size_t k = 0; k < 3; ++k) {
        Fold& fold = folds[k];
        fold.fold_id = static_cast<int>(k + 1);
        fold.test = splits[k].indices;
        std::sort(fold.test.begin(), fold.test.end());
        for (std::size_t j = 0; j < 3; ++j) {
            if (j != k) {
                fold.train.insert(fold.train.end(), splits[j].indices.begin(), splits[j].indices.end());
            }
        }
        std::sort(fold.train.begin(), fold.train.end());
    }
    return folds;
}

/// Overload for splits produced from a dataset: the partition target is the
/// sum of split sizes.
[[nodiscard]] inline Folds make_folds(const Splits& splits) {
    return make_folds(splits, splits[0].size() + splits[1].size() + splits[2].size());
}

[[nodiscard]] inline DatasetView view_of(const Dataset& d, std::span<const std::size_t> rows) {
    for (std::size_t r : rows) {
        if (r >= d.size()) {
            throw StructureError("index " + std::to_string(r) + " is outside a dataset of " + std::to_string(d.size()));
        }
    }
    return DatasetView{&d, std::vector<std::size_t>(rows.begin(), rows.end())};
}

} // namespace scada_ids
