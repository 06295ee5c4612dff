#pragma once

// Confusion matrices and the one-vs-rest metrics derived from them.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "scada_ids/error.hpp"
#include "scada_ids/label.hpp"

namespace scada_ids {

/// Square count matrix; rows are true labels, columns predicted labels.
class ConfusionMatrix {
public:
    ConfusionMatrix() = default;

    explicit ConfusionMatrix(std::vector<Label> labels)
        : labels_(std::move(labels)), counts_(labels_.size() * labels_.size(), 0) {
        for (std::size_t i = 1; i < labels_.size(); ++i) {
            if (std::find(labels_.begin(), labels_.begin() + static_cast<std::ptrdiff_t>(i), labels_[i]) !=
                labels_.begin() + static_cast<std::ptrdiff_t>(i)) {
                throw DomainError("label " + std::to_string(labels_[i]) + " appears twice in the label set");
            }
        }
    }

    /// From explicit rows, e.g. a published table.
    [[nodiscard]] static ConfusionMatrix from_rows(std::vector<Label> labels,
                                                   const std::vector<std::vector<std::uint64_t>>& rows) {
        ConfusionMatrix cm(std::move(labels));
        if (rows.size() != cm.size()) {
            throw DomainError("matrix has " + std::to_string(rows.size()) + " rows for " + std::to_string(cm.size()) +
                              " labels");
        }
        for (std::size_t t = 0; t < rows.size(); ++t) {
            if (rows[t].size() != cm.size()) {
                throw DomainError("matrix row " + std::to_string(t) + " has the wrong width");
            }
            for (std::size_t p = 0; p < rows[t].size(); ++p) {
                cm.at(t, p) = rows[t][p];
            }
        }
        return cm;
    }

    [[nodiscard]] std::size_t size() const noexcept { return labels_.size(); }
    [[nodiscard]] const std::vector<Label>& labels() const noexcept { return labels_; }

    [[nodiscard]] std::uint64_t& at(std::size_t truth, std::size_t predicted) { return counts_[truth * size() + predicted]; }
    [[nodiscard]] std::uint64_t at(std::size_t truth, std::size_t predicted) const {
        return counts_[truth * size() + predicted];
    }

    [[nodiscard]] std::size_t index_of(Label label) const {
        const auto it = std::find(labels_.begin(), labels_.end(), label);
        if (it == labels_.end()) {
            throw DomainError("label " + std::to_string(label) + " is not in the label set");
        }
        return static_cast<std::size_t>(it - labels_.begin());
    }

    void add(Label truth, Label predicted, std::uint64_t n = 1) { at(index_of(truth), index_of(predicted)) += n; }

    void merge(const ConfusionMatrix& other) {
        if (other.labels_ != labels_) {
            throw DomainError("cannot merge confusion matrices over different label sets");
        }
        for (std::size_t i = 0; i < counts_.size(); ++i) {
            counts_[i] += other.counts_[i];
        }
    }

    [[nodiscard]] std::uint64_t row_sum(std::size_t t) const {
        std::uint64_t s = 0;
        for (std::size_t p = 0; p < size(); ++p) {
            s += at(t, p);
        }
        return s;
    }

    [[nodiscard]] std::uint64_t column_sum(std::size_t p) const {
        std::uint64_t s = 0;
        for (std::size_t t = 0; t < size(); ++t) {
            s += at(t, p);
        }
        return s;
    }

    [[nodiscard]] std::uint64_t trace() const {
        std::uint64_t s = 0;
        for (std::size_t i = 0; i < size(); ++i) {
            s += at(i, i);
        }
        return s;
    }

    [[nodiscard]] std::uint64_t total() const {
        std::uint64_t s = 0;
        for (auto c : counts_) {
            s += c;
        }
        return s;
    }

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

private:
    std::vector<Label> labels_;
    std::vector<std::uint64_t> counts_;
};

/// Tallies truth/prediction pairs over `labels`.
[[nodiscard]] inline ConfusionMatrix confusion(std::span<const Label> truth, std::span<const Label> predicted,
                                               std::vector<Label> labels) {
    if (truth.size() != predicted.size()) {
        throw DomainError("truth has " + std::to_string(truth.size()) + " labels, predictions " +
                          std::to_string(predicted.size()));
    }
    ConfusionMatrix cm(std::move(labels));
    for (std::size_t i = 0; i < truth.size(); ++i) {
        cm.add(truth[i], predicted[i]);
    }
    return cm;
}

struct LabelMetrics {
    Label label = 0;
    std::uint64_t support = 0;
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;
    double tpr = 0.0;
    double fpr = 0.0;
    double tnr = 0.0;
    double fnr = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    // False when the ratio had a zero denominator and was set to 0.
    bool tpr_defined = true;
    bool fpr_defined = true;
    bool precision_defined = true;

    friend bool operator==(const LabelMetrics&, const LabelMetrics&) = default;
};

/// Support-weighted (row-sum) means of the per-label rates.
struct WeightedMetrics {
    double tpr = 0.0;
    double fpr = 0.0;
    double tnr = 0.0;
    double fnr = 0.0;
    double precision = 0.0;
    double recall = 0.0;

    friend bool operator==(const WeightedMetrics&, const WeightedMetrics&) = default;
};

struct ClassMetrics {
    std::vector<LabelMetrics> per_label;
    WeightedMetrics weighted;
    double accuracy = 0.0;
    std::uint64_t total = 0;
    std::uint64_t correct = 0;

    [[nodiscard]] const LabelMetrics& of(Label label) const {
        for (const auto& m : per_label) {
            if (m.label == label) {
                return m;
            }
        }
        throw DomainError("no metrics for label " + std::to_string(label));
    }

    friend bool operator==(const ClassMetrics&, const ClassMetrics&) = default;
};

/// One-vs-rest rates for every label. Zero-denominator ratios are 0 and
/// flagged; FNR = 1 - TPR and TNR = 1 - FPR always hold.
[[nodiscard]] inline ClassMetrics per_class_metrics(const ConfusionMatrix& cm) {
    const std::uint64_t total = cm.total();
    if (total == 0) {
        throw DomainError("metrics of an all-zero confusion matrix");
    }
    ClassMetrics out;
    out.total = total;
    out.correct = cm.trace();
    out.accuracy = static_cast<double>(out.correct) / static_cast<double>(total);

    auto ratio = [](std::uint64_t num, std::uint64_t den, bool& defined) {
        defined = den != 0;
        return defined ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
    };

    for (std::size_t i = 0; i < cm.size(); ++i) {
        LabelMetrics m;
        m.label = cm.labels()[i];
        m.tp = cm.at(i, i);
        m.support = cm.row_sum(i);
        m.fn = m.support - m.tp;
        m.fp = cm.column_sum(i) - m.tp;
        m.tn = total - m.tp - m.fn - m.fp;
        m.tpr = ratio(m.tp, m.tp + m.fn, m.tpr_defined);
        m.fnr = 1.0 - m.tpr;
        m.fpr = ratio(m.fp, m.fp + m.tn, m.fpr_defined);
        m.tnr = 1.0 - m.fpr;
        m.precision = ratio(m.tp, m.tp + m.fp, m.precision_defined);
        m.recall = m.tpr;

        const double w = static_cast<double>(m.support) / static_cast<double>(total);
        out.weighted.tpr += w * m.tpr;
        out.weighted.fpr += w * m.fpr;
        out.weighted.tnr += w * m.tnr;
        out.weighted.fnr += w * m.fnr;
        out.weighted.precision += w * m.precision;
        out.weighted.recall += w * m.recall;
        out.per_label.push_back(m);
    }
    return out;
}

/// Headline figures of one stage.
struct StageFigures {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;

    [[nodiscard]] static StageFigures of(const ClassMetrics& m) {
        return {m.accuracy, m.weighted.precision, m.weighted.recall};
    }

    friend bool operator==(const StageFigures&, const StageFigures&) = default;
};

/// Stage-1 and stage-2 figures combined by multiplication, which is how the
/// seven-category detection rate of a two-stage cascade is reported.
[[nodiscard]] inline StageFigures combined_two_stage(const StageFigures& stage1, const StageFigures& stage2) {
    return {stage1.accuracy * stage2.accuracy, stage1.precision * stage2.precision, stage1.recall * stage2.recall};
}

[[nodiscard]] inline StageFigures combined_two_stage(const ClassMetrics& stage1, const ClassMetrics& stage2) {
    return combined_two_stage(StageFigures::of(stage1), StageFigures::of(stage2));
}

enum class Semantics : std::uint8_t { ground_truth_routed, end_to_end };

[[nodiscard]] constexpr std::string_view to_string(Semantics s) noexcept {
    return s == Semantics::ground_truth_routed ? "ground-truth-routed" : "end-to-end";
}

[[nodiscard]] inline Semantics semantics_from_string(std::string_view s) {
    if (s == "ground-truth-routed") {
        return Semantics::ground_truth_routed;
    }
    if (s == "end-to-end") {
        return Semantics::end_to_end;
    }
    throw DomainError("unknown evaluation semantics '" + std::string(s) + "'");
}

struct StageReport {
    std::string name;
    Semantics semantics = Semantics::ground_truth_routed;
    ConfusionMatrix matrix;
    ClassMetrics metrics;
    std::uint64_t correct = 0;
    std::uint64_t incorrect = 0;
    /// Optional display names aligned with matrix.labels().
    std::vector<std::string> label_names;

    [[nodiscard]] static StageReport make(std::string name, Semantics semantics, ConfusionMatrix cm,
                                          std::vector<std::string> label_names = {}) {
        StageReport r;
        r.name = std::move(name);
        r.semantics = semantics;
        r.metrics = per_class_metrics(cm);
        r.correct = cm.trace();
        r.incorrect = cm.total() - r.correct;
        r.matrix = std::move(cm);
        r.label_names = std::move(label_names);
        return r;
    }

    friend bool operator==(const StageReport&, const StageReport&) = default;
};

enum class ReportFormat : std::uint8_t { text, json };

[[nodiscard]] inline ReportFormat report_format_from_string(std::string_view s) {
    if (s == "text") {
        return ReportFormat::text;
    }
    if (s == "json" || s == "json-like") {
        return ReportFormat::json;
    }
    throw DomainError("unknown report format '" + std::string(s) + "'");
}

inline constexpr std::string_view kReportFormat = "scada-ids-report";
inline constexpr int kReportVersion = 1;

[[nodiscard]] inline nlohmann::json to_json(const StageReport& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t t = 0; t < r.matrix.size(); ++t) {
        std::vector<std::uint64_t> row(r.matrix.size());
        for (std::size_t p = 0; p < r.matrix.size(); ++p) {
            row[p] = r.matrix.at(t, p);
        }
        rows.push_back(row);
    }
    nlohmann::json per_label = nlohmann::json::array();
    for (const auto& m : r.metrics.per_label) {
        per_label.push_back({{"label", m.label},
                             {"support", m.support},
                             {"tp", m.tp},
                             {"fp", m.fp},
                             {"fn", m.fn},
                             {"tn", m.tn},
                             {"tpr", m.tpr},
                             {"fpr", m.fpr},
                             {"tnr", m.tnr},
                             {"fnr", m.fnr},
                             {"precision", m.precision},
                             {"recall", m.recall},
                             {"tpr_defined", m.tpr_defined},
                             {"fpr_defined", m.fpr_defined},
                             {"precision_defined", m.precision_defined}});
    }
    const auto& w = r.metrics.weighted;
    return {{"format", kReportFormat},
            {"version", kReportVersion},
            {"name", r.name},
            {"semantics", to_string(r.semantics)},
            {"labels", r.matrix.labels()},
            {"label_names", r.label_names},
            {"matrix", std::move(rows)},
            {"correct", r.correct},
            {"incorrect", r.incorrect},
            {"metrics",
             {{"accuracy", r.metrics.accuracy},
              {"total", r.metrics.total},
              {"correct", r.metrics.correct},
              {"per_label", std::move(per_label)},
              {"weighted",
               {{"tpr", w.tpr},
                {"fpr", w.fpr},
                {"tnr", w.tnr},
                {"fnr", w.fnr},
                {"precision", w.precision},
                {"recall", w.recall}}}}}};
}

[[nodiscard]] inline StageReport report_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format").get<std::string>() != kReportFormat) {
            throw StructureError("not a report document");
        }
        if (j.at("version").get<int>() != kReportVersion) {
            throw StructureError("unsupported report version");
        }
        StageReport r;
        r.name = j.at("name").get<std::string>();
        r.semantics = semantics_from_string(j.at("semantics").get<std::string>());
        r.matrix = ConfusionMatrix::from_rows(j.at("labels").get<std::vector<Label>>(),
                                              j.at("matrix").get<std::vector<std::vector<std::uint64_t>>>());
        r.label_names = j.at("label_names").get<std::vector<std::string>>();
        r.correct = j.at("correct").get<std::uint64_t>();
        r.incorrect = j.at("incorrect").get<std::uint64_t>();
        const auto& mj = j.at("metrics");
        r.metrics.accuracy = mj.at("accuracy").get<double>();
        r.metrics.total = mj.at("total").get<std::uint64_t>();
        r.metrics.correct = mj.at("correct").get<std::uint64_t>();
        for (const auto& lj : mj.at("per_label")) {
            LabelMetrics m;
            m.label = lj.at("label").get<Label>();
            m.support = lj.at("support").get<std::uint64_t>();
            m.tp = lj.at("tp").get<std::uint64_t>();
            m.fp = lj.at("fp").get<std::uint64_t>();
            m.fn = lj.at("fn").get<std::uint64_t>();
            m.tn = lj.at("tn").get<std::uint64_t>();
            m.tpr = lj.at("tpr").get<double>();
            m.fpr = lj.at("fpr").get<double>();
            m.tnr = lj.at("tnr").get<double>();
            m.fnr = lj.at("fnr").get<double>();
            m.precision = lj.at("precision").get<double>();
            m.recall = lj.at("recall").get<double>();
            m.tpr_defined = lj.at("tpr_defined").get<bool>();
            m.fpr_defined = lj.at("fpr_defined").get<bool>();
            m.precision_defined = lj.at("precision_defined").get<bool>();
            r.metrics.per_label.push_back(m);
        }
        const auto& wj = mj.at("weighted");
        r.metrics.weighted = {wj.at("tpr").get<double>(),  wj.at("fpr").get<double>(),
                              wj.at("tnr").get<double>(),  wj.at("fnr").get<double>(),
                              wj.at("precision").get<double>(), wj.at("recall").get<double>()};
        if (r.correct != r.matrix.trace() || r.correct + r.incorrect != r.matrix.total()) {
            throw StructureError("report counts disagree with its matrix");
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw StructureError(std::string("malformed report document: ") + e.what());
    }
}

namespace detail {

inline std::string fixed(double v, int decimals) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(decimals) << v;
    return s.str();
}

inline std::string percent(double v) { return fixed(100.0 * v, 2) + "%"; }

} // namespace detail

/// Text layout: the matrix, then one metrics row per label and a weighted
/// row. Fractions to 3 decimals, accuracy as a percentage to 2. A '*' marks
/// a ratio whose denominator was zero.
inline void render_report(const StageReport& r, ReportFormat format, std::ostream& out) {
    if (format == ReportFormat::json) {
        out << to_json(r).dump(2) << '\n';
        if (!out) {
            throw Error("report write failed");
        }
        return;
    }
    const auto& cm = r.matrix;
    auto name_of = [&](std::size_t i) {
        return i < r.label_names.size() ? r.label_names[i] : std::to_string(cm.labels()[i]);
    };
    std::size_t name_width = std::string_view("Classified as ->").size();
    std::size_t cell_width = 6;
    for (std::size_t i = 0; i < cm.size(); ++i) {
        name_width = std::max(name_width, name_of(i).size());
        cell_width = std::max(cell_width, name_of(i).size() + 1);
        for (std::size_t p = 0; p < cm.size(); ++p) {
            cell_width = std::max(cell_width, std::to_string(cm.at(i, p)).size() + 1);
        }
    }

    out << r.name << " [" << to_string(r.semantics) << "]\n\n";
    out << std::left << std::setw(static_cast<int>(name_width)) << "Classified as ->";
    for (std::size_t p = 0; p < cm.size(); ++p) {
        out << std::right << std::setw(static_cast<int>(cell_width)) << name_of(p);
    }
    out << '\n';
    for (std::size_t t = 0; t < cm.size(); ++t) {
        out << std::left << std::setw(static_cast<int>(name_width)) << name_of(t);
        for (std::size_t p = 0; p < cm.size(); ++p) {
            out << std::right << std::setw(static_cast<int>(cell_width)) << cm.at(t, p);
        }
        out << '\n';
    }
    out << '\n';

    const int w = static_cast<int>(std::max<std::size_t>(name_width, 8));
    auto cell = [&](double v, bool defined = true) {
        std::string s = detail::fixed(v, 3) + (defined ? "" : "*");
        out << std::right << std::setw(11) << s;
    };
    out << std::left << std::setw(w) << "Class" << std::right << std::setw(10) << "Accuracy";
    for (const char* h : {"TPR", "FPR", "TNR", "FNR", "Precision", "Recall"}) {
        out << std::setw(11) << h;
    }
    out << '\n';
    for (std::size_t i = 0; i < r.metrics.per_label.size(); ++i) {
        const auto& m = r.metrics.per_label[i];
        out << std::left << std::setw(w) << name_of(i) << std::right << std::setw(10)
            << (i == 0 ? detail::percent(r.metrics.accuracy) : "");
        cell(m.tpr, m.tpr_defined);
        cell(m.fpr, m.fpr_defined);
        cell(m.tnr, m.fpr_defined);
        cell(m.fnr, m.tpr_defined);
        cell(m.precision, m.precision_defined);
        cell(m.recall, m.tpr_defined);
        out << '\n';
    }
    const auto& wm = r.metrics.weighted;
    out << std::left << std::setw(w) << "Weighted" << std::right << std::setw(10) << "";
    for (double v : {wm.tpr, wm.fpr, wm.tnr, wm.fnr, wm.precision, wm.recall}) {
        cell(v);
    }
    out << "\n\nAccuracy: " << detail::percent(r.metrics.accuracy) << "\nCorrect Instances: " << r.correct
        << "\nIncorrect Instances: " << r.incorrect << "\n";
    if (!out) {
        throw Error("report write failed");
    }
}

[[nodiscard]] inline std::string render_report(const StageReport& r, ReportFormat format) {
    std::ostringstream s;
    render_report(r, format, s);
    return s.str();
}

} // namespace scada_ids
