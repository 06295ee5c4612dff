#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "scada_ids/synthetic.hpp"

using namespace scada_ids;

TEST(Synthetic, NormalOnly) {
    SynthesisSpec spec;
    spec.counts = {{0, 10}};
    const auto d = generate_synthetic(spec);
    ASSERT_EQ(d.size(), 10U);
    for (const auto& r : d.records) {
        EXPECT_EQ(r.binary, BinaryLabel::normal);
        EXPECT_TRUE(validate_record(r).ok());
        EXPECT_TRUE(r.complete());
    }
    EXPECT_EQ(d.provenance, Provenance::synthetic);
}

TEST(Synthetic, ScaledReferenceCountsAtOnePercent) {
    const auto counts = scaled_reference_counts(0.01);
    std::map<int, std::size_t> per_category;
    std::size_t total = 0;
    for (const auto& [s, n] : counts) {
        const int c = s == 0 ? 0 : to_int(subclass_to_category(SubclassLabel{static_cast<std::uint8_t>(s)}));
        per_category[c] += n;
        total += n;
    }
    // Category counts / 100, rounded half away from zero.
    const std::map<int, std::size_t> expected{{0, 2146}, {1, 78}, {2, 130}, {3, 79},
                                              {4, 204},  {5, 49}, {6, 22},  {7, 39}};
    EXPECT_EQ(per_category, expected);
    EXPECT_EQ(total, 2747U);
}

TEST(Synthetic, HistogramMatchesSpecExactly) {
    SynthesisSpec spec;
    spec.counts = scaled_reference_counts(0.01);
    spec.seed = 4;
    const auto d = generate_synthetic(spec);
    std::map<int, std::size_t> histogram;
    for (const auto& r : d.records) {
        ++histogram[to_int(r.subclass)];
        ASSERT_TRUE(validate_record(r).ok());
    }
    for (const auto& [s, n] : spec.counts) {
        EXPECT_EQ(histogram[s], n) << "subclass " << s;
    }
}

TEST(Synthetic, DeterministicPerSeed) {
    SynthesisSpec spec;
    spec.counts = {{0, 30}, {1, 10}, {25, 10}, {29, 10}};
    spec.set_payload_missingness(0.1);
    spec.response_overlap = 0.5;
    spec.seed = 77;
    std::ostringstream a;
    std::ostringstream b;
    write_dataset(generate_synthetic(spec), a);
    write_dataset(generate_synthetic(spec), b);
    EXPECT_EQ(a.str(), b.str());
    spec.seed = 78;
    std::ostringstream c;
    write_dataset(generate_synthetic(spec), c);
    EXPECT_NE(a.str(), c.str());
}

TEST(Synthetic, MissingOnlyInPayloadAndRecorded) {
    SynthesisSpec spec;
    spec.counts = {{0, 200}, {4, 50}};
    spec.set_payload_missingness(0.3);
    const auto out = generate_synthetic_with_mask(spec);
    const auto schema = FeatureSchema::gas_pipeline();
    for (std::size_t r = 0; r < out.data.size(); ++r) {
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            EXPECT_EQ(is_missing(out.data.records[r].features[i]), out.dropped.cells[r][i]);
            if (!schema.missable(i)) {
                EXPECT_FALSE(out.dropped.cells[r][i]);
            }
        }
    }
    EXPECT_GT(out.dropped.count(), 0U);
}

TEST(Synthetic, PlantedPressureRelation) {
    SynthesisSpec spec;
    spec.counts = {{0, 20}, {2, 20}};
    spec.pressure_per_set_point = 2.0;
    for (const auto& r : generate_synthetic(spec).records) {
        EXPECT_EQ(r.features[Feature::pressure_measurement], 2.0 * r.features[Feature::set_point]);
    }
}

TEST(Synthetic, RejectsInvalidSpecs) {
    SynthesisSpec spec;
    spec.counts = {{36, 1}};
    EXPECT_THROW((void)generate_synthetic(spec), DomainError);
    spec.counts = {{0, 1}};
    spec.missingness[Feature::address] = 0.1;
    EXPECT_THROW((void)generate_synthetic(spec), DomainError);
    spec.missingness[Feature::address] = 0.0;
    spec.missingness[Feature::gain] = 1.5;
    EXPECT_THROW((void)generate_synthetic(spec), DomainError);
}

TEST(Synthetic, EmptyCountsGiveEmptyDataset) {
    SynthesisSpec spec;
    spec.counts = {{0, 0}, {5, 0}};
    EXPECT_TRUE(generate_synthetic(spec).empty());
}
