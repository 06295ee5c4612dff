#include <gtest/gtest.h>

#include <random>

#include "scada_ids/metrics.hpp"
#include "support/oracles.hpp"
#include "support/published_tables.hpp"

using namespace scada_ids;

namespace {

ClassMetrics metrics_of(const published::Matrix& m) {
    return per_class_metrics(ConfusionMatrix::from_rows(m.labels, m.rows));
}

} // namespace

TEST(ConfusionMatrix, MatchesPerCellTally) {
    std::mt19937_64 g(7);
    const std::vector<Label> labels{0, 3, 4, 9};
    std::uniform_int_distribution<std::size_t> pick(0, labels.size() - 1);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Label> truth;
        std::vector<Label> pred;
        for (int i = 0; i < 100 + trial; ++i) {
            truth.push_back(labels[pick(g)]);
            pred.push_back(labels[pick(g)]);
        }
        const auto cm = confusion(truth, pred, labels);
        const auto want = oracle::tally(truth, pred, labels);
        for (std::size_t t = 0; t < labels.size(); ++t) {
            for (std::size_t p = 0; p < labels.size(); ++p) {
                EXPECT_EQ(cm.at(t, p), want[t][p]);
            }
        }
        EXPECT_EQ(cm.total(), truth.size());
    }
}

TEST(ConfusionMatrix, RejectsBadInput) {
    EXPECT_THROW(ConfusionMatrix(std::vector<Label>{1, 2, 1}), DomainError);
    const std::vector<Label> truth{0, 1};
    const std::vector<Label> short_pred{0};
    EXPECT_THROW((void)confusion(truth, short_pred, {0, 1}), DomainError);
    const std::vector<Label> unknown{0, 5};
    EXPECT_THROW((void)confusion(truth, unknown, {0, 1}), DomainError);
}

TEST(PerClassMetrics, Identities) {
    std::mt19937_64 g(8);
    std::uniform_int_distribution<std::uint64_t> cell(0, 40);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t k = 2 + static_cast<std::size_t>(trial % 6);
        std::vector<Label> labels(k);
        std::iota(labels.begin(), labels.end(), 0);
        std::vector<std::vector<std::uint64_t>> rows(k, std::vector<std::uint64_t>(k));
        for (auto& row : rows) {
            for (auto& c : row) {
                c = cell(g);
            }
        }
        rows[0][0] += 1;
        const auto m = per_class_metrics(ConfusionMatrix::from_rows(labels, rows));
        // Support-weighted recall is accuracy.
        EXPECT_NEAR(m.weighted.recall, m.accuracy, 1e-12);
        EXPECT_NEAR(m.weighted.tpr + m.weighted.fnr, 1.0, 1e-12);
        EXPECT_NEAR(m.weighted.fpr + m.weighted.tnr, 1.0, 1e-12);
        for (const auto& l : m.per_label) {
            EXPECT_EQ(l.tp + l.fp + l.fn + l.tn, m.total);
            EXPECT_DOUBLE_EQ(l.fnr, 1.0 - l.tpr);
            EXPECT_DOUBLE_EQ(l.tnr, 1.0 - l.fpr);
            EXPECT_DOUBLE_EQ(l.recall, l.tpr);
        }
    }
}

TEST(PerClassMetrics, IllDefinedRatiosAreZeroAndFlagged) {
    // Label 2 never occurs and is never predicted.
    const auto m = per_class_metrics(ConfusionMatrix::from_rows({0, 1, 2}, {{3, 1, 0}, {0, 4, 0}, {0, 0, 0}}));
    const auto& l = m.of(2);
    EXPECT_FALSE(l.tpr_defined);
    EXPECT_FALSE(l.precision_defined);
    EXPECT_TRUE(l.fpr_defined);
    EXPECT_EQ(l.tpr, 0.0);
    EXPECT_EQ(l.precision, 0.0);
    EXPECT_THROW((void)per_class_metrics(ConfusionMatrix({0, 1})), DomainError);
}

TEST(PublishedTables, StageOneFigures) {
    const auto m = metrics_of(published::stage1());
    EXPECT_EQ(m.total, 91589U);
    EXPECT_EQ(m.correct, 89906U);
    EXPECT_NEAR(m.accuracy, 0.9816, 0.00005);
    EXPECT_NEAR(m.of(0).tpr, 0.995, 0.0005);
    EXPECT_NEAR(m.of(1).fnr, 0.066, 0.0005);
    EXPECT_NEAR(m.of(0).precision, 0.982, 0.0005);
    EXPECT_NEAR(m.of(1).precision, 0.980, 0.0005);
    EXPECT_NEAR(m.weighted.fpr, 0.053, 0.0005);
    EXPECT_NEAR(m.weighted.precision, 0.982, 0.0005);
}

TEST(PublishedTables, StageTwoFigures) {
    const auto m = metrics_of(published::stage2());
    EXPECT_EQ(m.total, 19910U);
    EXPECT_EQ(m.correct, 18674U);
    EXPECT_NEAR(m.accuracy, 0.9379, 0.00005);
    EXPECT_NEAR(m.weighted.tpr, 0.938, 0.0005);
    EXPECT_NEAR(m.weighted.fpr, 0.014, 0.0005);
    EXPECT_NEAR(m.weighted.precision, 0.937, 0.0005);
}

TEST(PublishedTables, StageThreeSummaries) {
    for (const auto& row : published::stage3_summaries()) {
        const auto m = metrics_of(published::stage3_for(row.category));
        EXPECT_EQ(m.correct, row.correct) << "category " << row.category;
        EXPECT_EQ(m.total - m.correct, row.incorrect) << "category " << row.category;
        EXPECT_NEAR(m.accuracy, row.accuracy_percent / 100.0, 0.0005) << "category " << row.category;
    }
}

TEST(CombinedTwoStage, ProductOfStageFigures) {
    const auto c = combined_two_stage(StageFigures{0.9816, 0.982, 0.982}, StageFigures{0.9379, 0.937, 0.938});
    EXPECT_NEAR(c.accuracy, 0.9206, 0.0001);
    EXPECT_NEAR(c.precision, 0.920, 0.0005);
    EXPECT_NEAR(c.recall, 0.921, 0.0005);
    const auto from_tables = combined_two_stage(metrics_of(published::stage1()), metrics_of(published::stage2()));
    EXPECT_NEAR(from_tables.accuracy, 0.9206, 0.0001);
}

TEST(StageReport, JsonRoundTripIsLossless) {
    const auto m = published::stage3_for(2);
    const auto r = StageReport::make("Stage 3, category 2", Semantics::ground_truth_routed,
                                     ConfusionMatrix::from_rows(m.labels, m.rows));
    const auto back = report_from_json(nlohmann::json::parse(to_json(r).dump()));
    EXPECT_EQ(back, r);
    EXPECT_EQ(render_report(back, ReportFormat::text), render_report(r, ReportFormat::text));
}

TEST(StageReport, RejectsTamperedDocuments) {
    const auto r = StageReport::make("x", Semantics::end_to_end, ConfusionMatrix::from_rows({0, 1}, {{2, 1}, {0, 3}}));
    auto j = to_json(r);
    j["correct"] = 4;
    EXPECT_THROW((void)report_from_json(j), StructureError);
    j = to_json(r);
    j["format"] = "other";
    EXPECT_THROW((void)report_from_json(j), StructureError);
    j = to_json(r);
    j.erase("matrix");
    EXPECT_THROW((void)report_from_json(j), StructureError);
}

TEST(StageReport, TextLayout) {
    const auto p = published::stage1();
    const auto r = StageReport::make("Stage 1", Semantics::ground_truth_routed,
                                     ConfusionMatrix::from_rows(p.labels, p.rows), {"Normal", "Attack"});
    const auto text = render_report(r, ReportFormat::text);
    EXPECT_NE(text.find("Stage 1 [ground-truth-routed]"), std::string::npos);
    EXPECT_NE(text.find("Accuracy: 98.16%"), std::string::npos);
    EXPECT_NE(text.find("Correct Instances: 89906"), std::string::npos);
    EXPECT_NE(text.find("Incorrect Instances: 1683"), std::string::npos);
    EXPECT_NE(text.find("Weighted"), std::string::npos);
    EXPECT_NE(text.find("0.995"), std::string::npos);
}

TEST(StageReport, FormatNames) {
    EXPECT_EQ(report_format_from_string("json-like"), ReportFormat::json);
    EXPECT_EQ(report_format_from_string("text"), ReportFormat::text);
    EXPECT_THROW((void)report_format_from_string("xml"), DomainError);
    EXPECT_EQ(semantics_from_string(to_string(Semantics::end_to_end)), Semantics::end_to_end);
}
