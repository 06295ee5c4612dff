#pragma once

// Feature schema, label spaces and the attack class hierarchy of the
// gas-pipeline SCADA corpus. Everything here is immutable.

#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scada_ids/error.hpp"

namespace scada_ids {

inline constexpr std::size_t kFeatureCount = 17;
inline constexpr std::size_t kCategoryCount = 7;
inline constexpr int kSubclassCount = 35;
inline constexpr std::string_view kTaxonomyVersion = "gas-pipeline-taxonomy/1";

enum class FeatureGroup : std::uint8_t { network, command_payload, response_payload };

enum class FeatureKind : std::uint8_t { numeric, binary01, ternary012, timestamp };

/// Column positions in file order.
enum Feature : std::size_t {
    address = 0,
    length,
    gain,
    deadband,
    rate,
    control_scheme,
    solenoid,
    crc_rate,
    timestamp,
    function,
    set_point,
    reset_rate,
    cycle_time,
    system_mode,
    pump_mode,
    pressure_measurement,
    command_response,
};

struct FeatureDescriptor {
    std::string_view name;
    FeatureGroup group;
    FeatureKind kind;
    // Takes values from a small set of codes; imputed by mode, never by regression.
    bool discrete;
};

class FeatureSchema {
public:
    using Descriptors = std::array<FeatureDescriptor, kFeatureCount>;

    constexpr explicit FeatureSchema(const Descriptors& features) : features_(features) {}

    /// The 17 columns of the gas-pipeline corpus.
    [[nodiscard]] static constexpr FeatureSchema gas_pipeline() {
        using G = FeatureGroup;
        using K = FeatureKind;
        return FeatureSchema(Descriptors{{
            {"Address", G::network, K::numeric, false},
            {"Length", G::network, K::numeric, false},
            {"Gain", G::command_payload, K::numeric, false},
            {"Deadband", G::command_payload, K::numeric, false},
            {"Rate", G::command_payload, K::numeric, false},
            {"Control Scheme", G::command_payload, K::binary01, true},
            {"Solenoid", G::command_payload, K::binary01, true},
            {"CRC Rate", G::network, K::numeric, false},
            {"Timestamp", G::network, K::timestamp, false},
            {"Function", G::command_payload, K::numeric, true},
            {"Set Point", G::command_payload, K::numeric, false},
            {"Reset Rate", G::command_payload, K::numeric, false},
            {"Cycle Time", G::command_payload, K::numeric, false},
            {"System Mode", G::command_payload, K::ternary012, true},
            {"Pump Mode", G::command_payload, K::binary01, true},
            {"Pressure Measurement", G::response_payload, K::numeric, false},
            {"Command Response", G::network, K::binary01, true},
        }});
    }

    [[nodiscard]] constexpr std::size_t size() const noexcept { return features_.size(); }
    [[nodiscard]] constexpr const FeatureDescriptor& operator[](std::size_t i) const { return features_[i]; }
    [[nodiscard]] constexpr auto begin() const noexcept { return features_.begin(); }
    [[nodiscard]] constexpr auto end() const noexcept { return features_.end(); }

    /// Payload columns are the only ones allowed to be missing.
    [[nodiscard]] constexpr bool missable(std::size_t i) const { return features_[i].group != FeatureGroup::network; }

    [[nodiscard]] constexpr std::optional<std::size_t> index_of(std::string_view name) const {
        for (std::size_t i = 0; i < features_.size(); ++i) {
            if (features_[i].name == name) {
                return i;
            }
        }
        return std::nullopt;
    }

    [[nodiscard]] constexpr std::size_t count(FeatureGroup group) const {
        std::size_t n = 0;
        for (const auto& f : features_) {
            n += f.group == group ? 1 : 0;
        }
        return n;
    }

    friend constexpr bool operator==(const FeatureSchema& a, const FeatureSchema& b) {
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            if (a.features_[i].name != b.features_[i].name || a.features_[i].group != b.features_[i].group ||
                a.features_[i].kind != b.features_[i].kind) {
                return false;
            }
        }
        return true;
    }

private:
    Descriptors features_;
};

enum class BinaryLabel : std::uint8_t { normal = 0, attack = 1 };

enum class CategoryLabel : std::uint8_t {
    normal = 0,
    nmri = 1,
    cmri = 2,
    msci = 3,
    mpci = 4,
    mfci = 5,
    dos = 6,
    recon = 7,
};

struct SubclassLabel {
    std::uint8_t value = 0;

    [[nodiscard]] constexpr bool is_normal() const noexcept { return value == 0; }
    friend constexpr auto operator<=>(SubclassLabel, SubclassLabel) = default;
};

[[nodiscard]] constexpr int to_int(BinaryLabel b) noexcept { return static_cast<int>(b); }
[[nodiscard]] constexpr int to_int(CategoryLabel c) noexcept { return static_cast<int>(c); }
[[nodiscard]] constexpr int to_int(SubclassLabel s) noexcept { return static_cast<int>(s.value); }

namespace detail {

// Index = subclass, value = owning category; slot 0 is Normal.
inline constexpr std::array<std::uint8_t, kSubclassCount + 1> kSubclassCategory = {
    0,                                  // Normal
    4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4, // 1-12 MPCI
    3, 3, 3, 3, 3,                      // 13-17 MSCI
    6,                                  // 18 DoS
    5,                                  // 19 MFCI
    7,                                  // 20 Recon
    5, 5,                               // 21-22 MFCI
    7, 7,                               // 23-24 Recon
    2, 2, 2, 2,                         // 25-28 CMRI
    1, 1, 1, 1,                         // 29-32 NMRI
    2, 2, 2,                            // 33-35 CMRI
};

inline constexpr std::array<std::string_view, kCategoryCount + 1> kCategoryNames = {
    "Normal", "NMRI", "CMRI", "MSCI", "MPCI", "MFCI", "DoS", "Recon",
};

inline constexpr std::array<std::string_view, kSubclassCount + 1> kAttackNames = {
    "Normal",
    "Setpoint Attack", "Setpoint Attack",
    "PID Gain Attack", "PID Gain Attack",
    "PID Reset Rate Attack", "PID Reset Rate Attack",
    "PID Rate Attack", "PID Rate Attack",
    "PID Deadband Attack", "PID Deadband Attack",
    "PID Cycle Time Attack", "PID Cycle Time Attack",
    "Pump Attack", "Solenoid Attack", "System Mode Attack",
    "Critical Condition Attack", "Critical Condition Attack",
    "Bad CRC Attack", "Clean Register Attack", "Device Scan Attack",
    "Force Listen Attack", "Restart Attack", "Read ID Attack", "Function Code Scan Attack",
    "Rise/Fall Attack", "Rise/Fall Attack", "Slope Attack", "Slope Attack",
    "Random Value Attack", "Random Value Attack", "Random Value Attack",
    "Negative Pressure Attack",
    "Fast Attack", "Fast Attack", "Slow Attack",
};

} // namespace detail

/// The fixed subclass -> category hierarchy.
struct Taxonomy {
    [[nodiscard]] static constexpr std::string_view version() noexcept { return kTaxonomyVersion; }

    [[nodiscard]] static constexpr CategoryLabel subclass_to_category(SubclassLabel s) {
        if (s.value == 0) {
            throw DomainError("Normal has no attack category");
        }
        if (s.value > kSubclassCount) {
            throw DomainError("subclass " + std::to_string(s.value) + " is outside 1..35");
        }
        return static_cast<CategoryLabel>(detail::kSubclassCategory[s.value]);
    }

    /// Subclasses owned by an attack category, ascending.
    [[nodiscard]] static std::vector<int> category_subclasses(CategoryLabel c) {
        if (c == CategoryLabel::normal || to_int(c) > static_cast<int>(kCategoryCount)) {
            throw DomainError("category " + std::to_string(to_int(c)) + " owns no subclasses");
        }
        std::vector<int> out;
        for (int s = 1; s <= kSubclassCount; ++s) {
            if (detail::kSubclassCategory[static_cast<std::size_t>(s)] == to_int(c)) {
                out.push_back(s);
            }
        }
        return out;
    }

    [[nodiscard]] static constexpr std::string_view category_name(CategoryLabel c) {
        const auto i = static_cast<std::size_t>(c);
        if (i > kCategoryCount) {
            throw DomainError("category " + std::to_string(i) + " is outside 0..7");
        }
        return detail::kCategoryNames[i];
    }

    [[nodiscard]] static constexpr std::string_view attack_name(SubclassLabel s) {
        if (s.value > kSubclassCount) {
            throw DomainError("subclass " + std::to_string(s.value) + " is outside 0..35");
        }
        return detail::kAttackNames[s.value];
    }

    [[nodiscard]] static constexpr std::array<CategoryLabel, kCategoryCount> attack_categories() noexcept {
        return {CategoryLabel::nmri, CategoryLabel::cmri, CategoryLabel::msci, CategoryLabel::mpci,
                CategoryLabel::mfci, CategoryLabel::dos,  CategoryLabel::recon};
    }
};

[[nodiscard]] constexpr CategoryLabel subclass_to_category(SubclassLabel s) { return Taxonomy::subclass_to_category(s); }

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

[[nodiscard]] inline bool is_missing(double v) noexcept { return std::isnan(v); }

using FeatureVector = std::array<double, kFeatureCount>;

/// One observation. Missing cells hold NaN.
struct Record {
    FeatureVector features{};
    BinaryLabel binary = BinaryLabel::normal;
    CategoryLabel category = CategoryLabel::normal;
    SubclassLabel subclass{};

    /// Builds a consistent label triple from the subclass alone.
    [[nodiscard]] static Record labelled(const FeatureVector& features, SubclassLabel s) {
        Record r{features, BinaryLabel::normal, CategoryLabel::normal, s};
        if (!s.is_normal()) {
            r.binary = BinaryLabel::attack;
            r.category = subclass_to_category(s);
        }
        return r;
    }

    [[nodiscard]] bool complete() const noexcept {
        for (double v : features) {
            if (is_missing(v)) {
                return false;
            }
        }
        return true;
    }

    // Missing cells compare equal to each other.
    friend bool operator==(const Record& a, const Record& b) noexcept {
        if (a.binary != b.binary || a.category != b.category || a.subclass != b.subclass) {
            return false;
        }
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            const bool ma = is_missing(a.features[i]);
            const bool mb = is_missing(b.features[i]);
            if (ma != mb || (!ma && a.features[i] != b.features[i])) {
                return false;
            }
        }
        return true;
    }
};

struct ValidationResult {
    std::vector<std::string> violations;

    [[nodiscard]] bool ok() const noexcept { return violations.empty(); }
};

/// Reports every broken label-consistency rule and every out-of-kind value.
/// Violations are returned, never thrown.
[[nodiscard]] inline ValidationResult validate_record(const Record& r,
                                                      const FeatureSchema& schema = FeatureSchema::gas_pipeline()) {
    ValidationResult result;
    auto& v = result.violations;

    const int b = to_int(r.binary);
    const int c = to_int(r.category);
    const int s = to_int(r.subclass);
    if (b > 1) {
        v.push_back("binary label " + std::to_string(b) + " is outside {0,1}");
    }
    if (c > static_cast<int>(kCategoryCount)) {
        v.push_back("category label " + std::to_string(c) + " is outside 0..7");
    }
    if (s > kSubclassCount) {
        v.push_back("subclass label " + std::to_string(s) + " is outside 0..35");
    }
    if ((b == 0) != (c == 0) || (c == 0) != (s == 0)) {
        v.push_back("labels (" + std::to_string(b) + ", " + std::to_string(c) + ", " + std::to_string(s) +
                    ") disagree on Normal");
    }
    if (s > 0 && s <= kSubclassCount && c > 0) {
        const int owner = detail::kSubclassCategory[static_cast<std::size_t>(s)];
        if (owner != c) {
            v.push_back("subclass " + std::to_string(s) + " belongs to category " + std::to_string(owner));
        }
    }

    for (std::size_t i = 0; i < schema.size(); ++i) {
        const auto& f = schema[i];
        const double x = r.features[i];
        if (is_missing(x)) {
            if (!schema.missable(i)) {
                v.push_back("network feature '" + std::string(f.name) + "' is missing");
            }
            continue;
        }
        if (!std::isfinite(x)) {
            v.push_back("feature '" + std::string(f.name) + "' is not finite");
            continue;
        }
        switch (f.kind) {
        case FeatureKind::binary01:
            if (x != 0.0 && x != 1.0) {
                v.push_back("feature '" + std::string(f.name) + "' = " + std::to_string(x) + " is outside {0,1}");
            }
            break;
        case FeatureKind::ternary012:
            if (x != 0.0 && x != 1.0 && x != 2.0) {
                v.push_back("feature '" + std::string(f.name) + "' = " + std::to_string(x) + " is outside {0,1,2}");
            }
            break;
        case FeatureKind::numeric:
        case FeatureKind::timestamp:
            break;
        }
    }
    return result;
}

} // namespace scada_ids
