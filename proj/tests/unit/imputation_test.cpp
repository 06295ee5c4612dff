#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <set>

#include "scada_ids/imputation.hpp"
#include "scada_ids/synthetic.hpp"

using namespace scada_ids;

namespace {

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

SynthesisSpec mixed_spec(double rate, std::uint64_t seed) {
    SynthesisSpec spec;
    spec.counts = {{0, 300}, {1, 40}, {13, 40}, {19, 30}, {25, 40}, {29, 40}};
    spec.set_payload_missingness(rate);
    spec.seed = seed;
    return spec;
}

} // namespace

TEST(DetectMissing, CompleteDatasetHasEmptyMask) {
    SynthesisSpec spec;
    spec.counts = {{0, 20}};
    const auto mask = detect_missing(generate_synthetic(spec));
    EXPECT_EQ(mask.rows(), 20U);
    EXPECT_FALSE(mask.any());
}

TEST(DetectMissing, SingleMissingCell) {
    SynthesisSpec spec;
    spec.counts = {{0, 5}};
    auto d = generate_synthetic(spec);
    d.records[3].features[Feature::pressure_measurement] = kMissing;
    const auto mask = detect_missing(d);
    EXPECT_EQ(mask.count(), 1U);
    EXPECT_TRUE(mask.cells[3][Feature::pressure_measurement]);
}

TEST(DetectMissing, MatchesGeneratorDropDecisions) {
    const auto out = generate_synthetic_with_mask(mixed_spec(0.2, 5));
    const auto mask = detect_missing(out.data);
    EXPECT_EQ(mask, out.dropped);
    const double payload_cells = static_cast<double>(out.data.size()) * 12.0;
    const double density = static_cast<double>(mask.count()) / payload_cells;
    // Binomial standard error at p = 0.2 over ~5.8k cells is ~0.005.
    EXPECT_NEAR(density, 0.2, 0.03);
}

TEST(MiceImpute, IdentityOnCompleteData) {
    auto spec = mixed_spec(0.0, 1);
    const auto d = generate_synthetic(spec);
    EXPECT_EQ(mice_impute(d), d);
}

TEST(MiceImpute, ConstantColumnImputesConstant) {
    SynthesisSpec spec;
    spec.counts = {{0, 30}};
    auto d = generate_synthetic(spec);
    for (auto& r : d.records) {
        r.features[Feature::gain] = 5.0;
    }
    d.records[7].features[Feature::gain] = kMissing;
    const auto out = mice_impute(d);
    EXPECT_DOUBLE_EQ(out.records[7].features[Feature::gain], 5.0);
}

TEST(MiceImpute, CompleteNonDestructiveAndClosed) {
    const auto schema = FeatureSchema::gas_pipeline();
    for (std::uint64_t seed : {3ULL, 4ULL}) {
        const auto in = generate_synthetic(mixed_spec(0.3, seed));
        const auto out = mice_impute(in);
        EXPECT_TRUE(out.complete());
        EXPECT_EQ(out.provenance, Provenance::imputed);
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            std::set<double> observed;
            for (const auto& r : in.records) {
                if (!is_missing(r.features[i])) {
                    observed.insert(r.features[i]);
                }
            }
            for (std::size_t r = 0; r < in.size(); ++r) {
                const double before = in.records[r].features[i];
                const double after = out.records[r].features[i];
                if (!is_missing(before)) {
                    EXPECT_TRUE(bit_equal(before, after));
                } else if (schema[i].discrete) {
                    EXPECT_TRUE(observed.contains(after)) << schema[i].name << " imputed to " << after;
                }
            }
        }
        for (std::size_t r = 0; r < in.size(); ++r) {
            EXPECT_EQ(out.records[r].subclass, in.records[r].subclass);
        }
    }
}

TEST(MiceImpute, Deterministic) {
    const auto in = generate_synthetic(mixed_spec(0.15, 8));
    EXPECT_EQ(mice_impute(in), mice_impute(in));
}

TEST(MiceImpute, RecoversPlantedLinearRelation) {
    SynthesisSpec spec = mixed_spec(0.0, 12);
    spec.pressure_per_set_point = 2.0;
    spec.missingness[Feature::pressure_measurement] = 0.1;
    const auto in = generate_synthetic_with_mask(spec);
    ASSERT_GT(in.dropped.count(Feature::pressure_measurement), 0U);
    const auto out = mice_impute(in.data);
    for (std::size_t r = 0; r < out.size(); ++r) {
        if (in.dropped.cells[r][Feature::pressure_measurement]) {
            const auto& x = out.records[r].features;
            EXPECT_NEAR(x[Feature::pressure_measurement], 2.0 * x[Feature::set_point], 1e-6);
        }
    }
}

TEST(MiceImpute, AllMissingColumnNamesTheFeature) {
    SynthesisSpec spec;
    spec.counts = {{0, 10}};
    auto d = generate_synthetic(spec);
    for (auto& r : d.records) {
        r.features[Feature::cycle_time] = kMissing;
    }
    try {
        (void)mice_impute(d);
        FAIL() << "expected ImputationError";
    } catch (const ImputationError& e) {
        EXPECT_NE(std::string(e.what()).find("Cycle Time"), std::string::npos);
    }
}

TEST(MiceImpute, RejectsZeroIterations) {
    ImputationConfig cfg;
    cfg.chain_iterations = 0;
    EXPECT_THROW((void)mice_impute(Dataset{}, cfg), ImputationError);
}
