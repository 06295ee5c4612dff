#include <gtest/gtest.h>

#include <map>

#include "scada_ids/partitioning.hpp"
#include "scada_ids/synthetic.hpp"

using namespace scada_ids;

namespace {

Dataset sample(std::uint64_t seed) {
    SynthesisSpec spec;
    spec.counts = {{0, 101}, {1, 7}, {2, 3}, {13, 1}, {18, 12}, {20, 2}, {31, 50}};
    spec.seed = seed;
    return generate_synthetic(spec);
}

} // namespace

TEST(StratifiedSplit, StrataDifferByAtMostOne) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto d = sample(seed);
        const auto splits = stratified_split3(d, seed);
        std::map<int, std::array<std::size_t, 3>> per;
        for (std::size_t k = 0; k < 3; ++k) {
            for (auto i : splits[k].indices) {
                ++per[to_int(d.records[i].subclass)][k];
            }
        }
        for (const auto& [s, n] : per) {
            const auto [lo, hi] = std::minmax({n[0], n[1], n[2]});
            EXPECT_LE(hi - lo, 1U) << "subclass " << s;
        }
        const auto [lo, hi] = std::minmax({splits[0].size(), splits[1].size(), splits[2].size()});
        EXPECT_LE(hi - lo, 1U);
    }
}

TEST(StratifiedSplit, DivisibleInputGivesEqualSizes) {
    SynthesisSpec spec;
    spec.counts = {{0, 30}, {5, 9}, {22, 3}};
    const auto splits = stratified_split3(generate_synthetic(spec), 4);
    for (const auto& s : splits) {
        EXPECT_EQ(s.size(), 14U);
    }
}

TEST(StratifiedSplit, PartitionsAndIsDeterministic) {
    const auto d = sample(1);
    const auto a = stratified_split3(d, 9);
    EXPECT_EQ(a, stratified_split3(d, 9));
    EXPECT_NE(a, stratified_split3(d, 10));
    std::vector<int> seen(d.size(), 0);
    for (const auto& s : a) {
        EXPECT_TRUE(std::is_sorted(s.indices.begin(), s.indices.end()));
        for (auto i : s.indices) {
            ++seen[i];
        }
    }
    for (int c : seen) {
        EXPECT_EQ(c, 1);
    }
}

TEST(StratifiedSplit, RequiresCompleteData) {
    auto d = sample(2);
    d.records[0].features[Feature::gain] = kMissing;
    EXPECT_THROW((void)stratified_split3(d, 0), StructureError);
}

TEST(MakeFolds, FoldTestsOnItsOwnSplit) {
    const auto d = sample(3);
    const auto splits = stratified_split3(d, 3);
    const auto folds = make_folds(splits, d.size());
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_EQ(folds[k].fold_id, static_cast<int>(k + 1));
        EXPECT_EQ(folds[k].test, splits[k].indices);
        EXPECT_EQ(folds[k].train.size() + folds[k].test.size(), d.size());
        std::vector<std::size_t> both;
        std::set_intersection(folds[k].train.begin(), folds[k].train.end(), folds[k].test.begin(),
                              folds[k].test.end(), std::back_inserter(both));
        EXPECT_TRUE(both.empty());
    }
}

TEST(MakeFolds, RejectsBrokenPartitions) {
    Splits overlap{Split{{0, 1}}, Split{{1, 2}}, Split{{3}}};
    EXPECT_THROW((void)make_folds(overlap, 4), StructureError);
    Splits gap{Split{{0}}, Split{{1}}, Split{{3}}};
    EXPECT_THROW((void)make_folds(gap, 4), StructureError);
    Splits outside{Split{{0}}, Split{{1}}, Split{{2, 9}}};
    EXPECT_THROW((void)make_folds(outside, 4), StructureError);
    Splits fine{Split{{0, 3}}, Split{{1}}, Split{{2}}};
    EXPECT_NO_THROW((void)make_folds(fine));
}

TEST(ViewOf, RejectsOutOfRangeRows) {
    const auto d = sample(4);
    const std::vector<std::size_t> rows{0, d.size()};
    EXPECT_THROW((void)view_of(d, rows), StructureError);
}
