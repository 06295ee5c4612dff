#pragma once

// Schema-conforming synthetic gas-pipeline records for desk-scale runs
// without the original corpus.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scada_ids/dataset.hpp"
#include "scada_ids/error.hpp"
#include "scada_ids/reference_counts.hpp"
#include "scada_ids/rng.hpp"
#include "scada_ids/taxonomy.hpp"

namespace scada_ids {

struct FeatureRange {
    double lo = 0.0;
    double hi = 1.0;
};

[[nodiscard]] inline std::array<FeatureRange, kFeatureCount> default_feature_ranges() {
    return {{
        {1.0, 250.0},        // Address
        {10.0, 90.0},        // Length
        {0.0, 200.0},        // Gain
        {0.0, 20.0},         // Deadband
        {0.0, 10.0},         // Rate
        {0.0, 1.0},          // Control Scheme
        {0.0, 1.0},          // Solenoid
        {0.0, 1.0},          // CRC Rate
        {1.4e9, 1.5e9},      // Timestamp
        {1.0, 36.0},         // Function
        {0.0, 20.0},         // Set Point
        {0.0, 100.0},        // Reset Rate
        {0.0, 20.0},         // Cycle Time
        {0.0, 2.0},          // System Mode
        {0.0, 1.0},          // Pump Mode
        {0.0, 40.0},         // Pressure Measurement
        {0.0, 1.0},          // Command Response
    }};
}

struct SynthesisSpec {
    /// Subclass label (0 = Normal) -> number of records.
    std::map<int, std::size_t> counts;
    std::array<FeatureRange, kFeatureCount> ranges = default_feature_ranges();
    /// Per-feature probability that a cell is dropped; payload features only.
    std::array<double, kFeatureCount> missingness{};
    std::uint64_t seed = 0;
    /// Fraction of NMRI/CMRI records drawn from one shared profile with
    /// pressure in [2, 10], which makes them indistinguishable.
    double response_overlap = 0.0;
    /// When set, Pressure Measurement = factor * Set Point on every record.
    std::optional<double> pressure_per_set_point;

    void validate() const {
        for (const auto& [label, n] : counts) {
            if (label < 0 || label > kSubclassCount) {
                throw DomainError("synthesis count for subclass " + std::to_string(label) + " is outside 0..35");
            }
        }
        const auto schema = FeatureSchema::gas_pipeline();
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            const double rate = missingness[i];
            if (!(rate >= 0.0 && rate <= 1.0)) {
                throw DomainError("missingness rate for '" + std::string(schema[i].name) + "' is outside [0,1]");
            }
            if (rate > 0.0 && !schema.missable(i)) {
                throw DomainError("network feature '" + std::string(schema[i].name) + "' cannot be missing");
            }
            if (!(ranges[i].lo <= ranges[i].hi) || !std::isfinite(ranges[i].lo) || !std::isfinite(ranges[i].hi)) {
                throw DomainError("value range for '" + std::string(schema[i].name) + "' is invalid");
            }
        }
        if (!(response_overlap >= 0.0 && response_overlap <= 1.0)) {
            throw DomainError("response_overlap is outside [0,1]");
        }
    }

    [[nodiscard]] std::size_t total() const {
        std::size_t n = 0;
        for (const auto& [label, c] : counts) {
            n += c;
        }
        return n;
    }

    void set_payload_missingness(double rate) {
        const auto schema = FeatureSchema::gas_pipeline();
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            missingness[i] = schema.missable(i) ? rate : 0.0;
        }
    }
};

/// Corpus category counts scaled by `factor` (rounded half away from zero),
/// each category spread over its subclasses in proportion to the fold-1
/// subclass populations by largest remainder.
[[nodiscard]] inline std::map<int, std::size_t> scaled_reference_counts(double factor) {
    if (!(factor >= 0.0)) {
        throw DomainError("scale factor must be non-negative");
    }
    std::map<int, std::size_t> out;
    out[0] = static_cast<std::size_t>(std::llround(reference::kCategoryCounts[0] * factor));
    for (const auto c : Taxonomy::attack_categories()) {
        const auto target =
            static_cast<std::size_t>(std::llround(reference::kCategoryCounts[static_cast<std::size_t>(c)] * factor));
        const auto members = Taxonomy::category_subclasses(c);
        std::vector<double> weight;
        double weight_sum = 0.0;
        for (int s : members) {
            const auto& fc = reference::kStage3Counts[static_cast<std::size_t>(s)];
            weight.push_back(static_cast<double>(fc.train + fc.test));
            weight_sum += weight.back();
        }
        std::size_t assigned = 0;
        std::vector<std::pair<double, std::size_t>> remainders;
        for (std::size_t k = 0; k < members.size(); ++k) {
            const double exact = static_cast<double>(target) * weight[k] / weight_sum;
            const auto whole = static_cast<std::size_t>(std::floor(exact));
            out[members[k]] = whole;
            assigned += whole;
            remainders.emplace_back(exact - static_cast<double>(whole), k);
        }
        std::stable_sort(remainders.begin(), remainders.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        for (std::size_t k = 0; assigned < target; ++k, ++assigned) {
            ++out[members[remainders[k % remainders.size()].second]];
        }
    }
    return out;
}

struct SyntheticDataset {
    Dataset data;
    /// The generator's drop decisions, aligned with data.records.
    MissingnessMask dropped;
};

namespace detail {

// Multipliers coprime with 36 give a distinct slot permutation per feature.
inline constexpr std::array<int, kFeatureCount> kSlotMultiplier = {1, 5, 7, 11, 13, 17, 19, 23, 25,
                                                                   29, 31, 35, 5, 7, 11, 13, 17};

inline std::size_t slot_of(int subclass, std::size_t feature) {
    return static_cast<std::size_t>((subclass * kSlotMultiplier[feature] + static_cast<int>(feature) * 7) % 36);
}

inline double draw_in_slot(rng::Engine& engine, const FeatureRange& range, std::size_t slot) {
    const double width = (range.hi - range.lo) / 36.0;
    const double lo = range.lo + width * (static_cast<double>(slot) + 0.1);
    return rng::uniform(engine, lo, lo + 0.8 * width);
}

// Per-subclass probability that a discrete feature takes its higher codes.
inline double code_bias(int subclass, std::size_t feature) {
    return static_cast<double>((subclass * 7 + static_cast<int>(feature) * 3) % 5) / 4.0;
}

inline FeatureVector draw_features(rng::Engine& engine, const SynthesisSpec& spec, int profile) {
    const auto schema = FeatureSchema::gas_pipeline();
    FeatureVector x{};
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        const auto& range = spec.ranges[i];
        switch (schema[i].kind) {
        case FeatureKind::binary01:
            x[i] = rng::bernoulli(engine, 0.1 + 0.8 * code_bias(profile, i)) ? 1.0 : 0.0;
            break;
        case FeatureKind::ternary012: {
            const double bias = code_bias(profile, i);
            const double u = rng::uniform01(engine);
            x[i] = u < 0.8 * (1.0 - bias) + 0.1 ? 0.0 : (u < 0.9 + 0.05 * bias ? 1.0 : 2.0);
            break;
        }
        case FeatureKind::numeric:
        case FeatureKind::timestamp:
            if (schema[i].discrete) {
                const double span = std::floor(range.hi - range.lo) + 1.0;
                x[i] = range.lo + std::fmod(static_cast<double>(slot_of(profile, i)), span);
            } else {
                x[i] = draw_in_slot(engine, range, slot_of(profile, i));
            }
            break;
        }
    }
    return x;
}

} // namespace detail

/// Draws exactly spec.counts[s] records of every subclass s. Continuous
/// features come from per-subclass uniform slots that do not overlap, so the
/// classes are separable unless response_overlap mixes NMRI and CMRI.
[[nodiscard]] inline SyntheticDataset generate_synthetic_with_mask(const SynthesisSpec& spec) {
    spec.validate();
    rng::Engine engine(rng::derive(spec.seed, 0x5157));
    // Shared profile for overlapping response-injection rows.
    constexpr int kSharedResponseProfile = 31;

    std::vector<Record> records;
    records.reserve(spec.total());
    for (const auto& [label, n] : spec.counts) {
        const SubclassLabel s{static_cast<std::uint8_t>(label)};
        const bool response_injection = !s.is_normal() && (subclass_to_category(s) == CategoryLabel::nmri ||
                                                            subclass_to_category(s) == CategoryLabel::cmri);
        for (std::size_t k = 0; k < n; ++k) {
            const bool shared = response_injection && spec.response_overlap > 0.0 &&
                                rng::bernoulli(engine, spec.response_overlap);
            FeatureVector x = detail::draw_features(engine, spec, shared ? kSharedResponseProfile : label);
            if (shared) {
                x[Feature::pressure_measurement] = rng::uniform(engine, 2.0, 10.0);
            }
            if (spec.pressure_per_set_point) {
                x[Feature::pressure_measurement] = *spec.pressure_per_set_point * x[Feature::set_point];
            }
            records.push_back(Record::labelled(x, s));
        }
    }
    rng::shuffle(std::span<Record>(records), engine);

    MissingnessMask dropped{std::vector<std::array<bool, kFeatureCount>>(records.size())};
    for (std::size_t r = 0; r < records.size(); ++r) {
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            if (spec.missingness[i] > 0.0 && rng::bernoulli(engine, spec.missingness[i])) {
                records[r].features[i] = kMissing;
                dropped.cells[r][i] = true;
            }
        }
    }
    return {Dataset{FeatureSchema::gas_pipeline(), std::move(records), Provenance::synthetic}, std::move(dropped)};
}

[[nodiscard]] inline Dataset generate_synthetic(const SynthesisSpec& spec) {
    return generate_synthetic_with_mask(spec).data;
}

} // namespace scada_ids
