#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "scada_ids/error.hpp"
#include "scada_ids/taxonomy.hpp"

namespace scada_ids {

enum class Provenance : std::uint8_t { real, synthetic, imputed };

[[nodiscard]] constexpr std::string_view to_string(Provenance p) noexcept {
    switch (p) {
    case Provenance::real: return "real";
    case Provenance::synthetic: return "synthetic";
    case Provenance::imputed: return "imputed";
    }
    return "unknown";
}

struct Dataset {
    FeatureSchema schema = FeatureSchema::gas_pipeline();
    std::vector<Record> records;
    Provenance provenance = Provenance::real;

    [[nodiscard]] std::size_t size() const noexcept { return records.size(); }
    [[nodiscard]] bool empty() const noexcept { return records.empty(); }

    [[nodiscard]] bool complete() const noexcept {
        return std::all_of(records.begin(), records.end(), [](const Record& r) { return r.complete(); });
    }

    // Provenance is metadata; equality is over the data.
    friend bool operator==(const Dataset& a, const Dataset& b) { return a.schema == b.schema && a.records == b.records; }
};

/// Per-record, per-feature flag; true where the cell is missing.
struct MissingnessMask {
    std::vector<std::array<bool, kFeatureCount>> cells;

    [[nodiscard]] std::size_t rows() const noexcept { return cells.size(); }

    [[nodiscard]] std::size_t count() const noexcept {
        std::size_t n = 0;
        for (const auto& row : cells) {
            n += static_cast<std::size_t>(std::count(row.begin(), row.end(), true));
        }
        return n;
    }

    [[nodiscard]] std::size_t count(std::size_t feature) const noexcept {
        std::size_t n = 0;
        for (const auto& row : cells) {
            n += row[feature] ? 1 : 0;
        }
        return n;
    }

    [[nodiscard]] bool any() const noexcept { return count() > 0; }

    friend bool operator==(const MissingnessMask&, const MissingnessMask&) = default;
};

/// A subset of a dataset's rows, by index. Does not own the dataset.
struct DatasetView {
    const Dataset* data = nullptr;
    std::vector<std::size_t> rows;

    [[nodiscard]] static DatasetView all(const Dataset& d) {
        DatasetView v{&d, std::vector<std::size_t>(d.size())};
        for (std::size_t i = 0; i < d.size(); ++i) {
            v.rows[i] = i;
        }
        return v;
    }

    [[nodiscard]] std::size_t size() const noexcept { return rows.size(); }
    [[nodiscard]] const Record& operator[](std::size_t i) const { return data->records[rows[i]]; }
};

inline constexpr std::array<std::string_view, 3> kLabelColumns = {"binary", "categorized", "specified"};

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

inline bool parse_double(std::string_view s, double& out) {
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

inline bool parse_label(std::string_view s, int& out) {
    double d = 0;
    if (!parse_double(s, d) || d != static_cast<double>(static_cast<int>(d)) || d < 0 || d > 255) {
        return false;
    }
    out = static_cast<int>(d);
    return true;
}

} // namespace detail

/// Shortest decimal text that parses back to exactly `v`.
[[nodiscard]] inline std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

/// Reads the 20-column CSV format: the 17 schema columns, then
/// binary, categorized, specified. Empty or "?" feature cells are missing.
[[nodiscard]] inline Dataset load_dataset(std::istream& in, const FeatureSchema& schema = FeatureSchema::gas_pipeline()) {
    Dataset d{schema, {}, Provenance::real};
    const std::size_t columns = schema.size() + kLabelColumns.size();

    std::string line;
    if (!std::getline(in, line)) {
        throw LoadError(0, "missing header");
    }
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        line.erase(0, 3);
    }
    const auto header = detail::split_commas(line);
    if (header.size() != columns) {
        throw LoadError(0, "header has " + std::to_string(header.size()) + " columns, expected " +
                               std::to_string(columns));
    }
    for (std::size_t i = 0; i < columns; ++i) {
        const std::string_view expected = i < schema.size() ? schema[i].name : kLabelColumns[i - schema.size()];
        if (detail::trim(header[i]) != expected) {
            throw LoadError(0, "header column " + std::to_string(i + 1) + " is '" +
                                   std::string(detail::trim(header[i])) + "', expected '" + std::string(expected) + "'");
        }
    }

    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) {
            continue;
        }
        ++row;
        const auto cells = detail::split_commas(line);
        if (cells.size() != columns) {
            throw LoadError(row, "has " + std::to_string(cells.size()) + " fields, expected " + std::to_string(columns));
        }
        Record r;
        for (std::size_t i = 0; i < schema.size(); ++i) {
            const auto cell = detail::trim(cells[i]);
            if (cell.empty() || cell == "?") {
                r.features[i] = kMissing;
            } else if (!detail::parse_double(cell, r.features[i])) {
                throw LoadError(row, "cannot parse '" + std::string(cell) + "' in column '" +
                                         std::string(schema[i].name) + "'");
            }
        }
        int labels[3] = {0, 0, 0};
        for (std::size_t j = 0; j < 3; ++j) {
            const auto cell = detail::trim(cells[schema.size() + j]);
            if (!detail::parse_label(cell, labels[j])) {
                throw LoadError(row, "cannot parse label '" + std::string(cell) + "' in column '" +
                                         std::string(kLabelColumns[j]) + "'");
            }
        }
        r.binary = static_cast<BinaryLabel>(labels[0]);
        r.category = static_cast<CategoryLabel>(labels[1]);
        r.subclass = SubclassLabel{static_cast<std::uint8_t>(labels[2])};

        const auto check = validate_record(r, schema);
        if (!check.ok()) {
            throw LoadError(row, check.violations.front());
        }
        d.records.push_back(r);
    }
    return d;
}

inline void write_header(std::ostream& out, const FeatureSchema& schema) {
    for (const auto& f : schema) {
        out << f.name << ',';
    }
    out << kLabelColumns[0] << ',' << kLabelColumns[1] << ',' << kLabelColumns[2] << '\n';
}

inline void write_record(std::ostream& out, const Record& r) {
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        if (!is_missing(r.features[i])) {
            out << format_double(r.features[i]);
        }
        out << ',';
    }
    out << to_int(r.binary) << ',' << to_int(r.category) << ',' << to_int(r.subclass) << '\n';
}

/// Writes the CSV format read by load_dataset; missing cells become empty fields.
inline void write_dataset(const Dataset& d, std::ostream& out) {
    write_header(out, d.schema);
    for (const auto& r : d.records) {
        write_record(out, r);
    }
    out.flush();
    if (!out) {
        throw Error("dataset write failed");
    }
}

/// Index lists, one integer per line.
inline void write_index_list(std::span<const std::size_t> indices, std::ostream& out) {
    for (std::size_t i : indices) {
        out << i << '\n';
    }
    out.flush();
    if (!out) {
        throw Error("index list write failed");
    }
}

[[nodiscard]] inline std::vector<std::size_t> read_index_list(std::istream& in) {
    std::vector<std::size_t> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto s = detail::trim(line);
        if (s.empty()) {
            continue;
        }
        std::size_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) {
            throw StructureError("index list line " + std::to_string(lineno) + ": '" + std::string(s) +
                                 "' is not an index");
        }
        out.push_back(v);
    }
    return out;
}

} // namespace scada_ids
