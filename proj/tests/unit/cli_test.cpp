#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "scada_ids/scada_ids.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

#ifdef SCADA_IDS_CLI_PATH

namespace {

class CliPipeline : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("scada_ids_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    int run(const std::string& args) const {
        const std::string cmd = std::string("\"") + SCADA_IDS_CLI_PATH + "\" " + args + " > \"" +
                                (dir_ / "stdout.txt").string() + "\" 2> \"" + (dir_ / "stderr.txt").string() + "\"";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    std::string text(const std::string& name) const {
        std::ifstream in(dir_ / name, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    void write(const std::string& name, const json& j) const { std::ofstream(dir_ / name) << j.dump(); }

    std::string path(const std::string& name) const { return "\"" + (dir_ / name).string() + "\""; }

    fs::path dir_;
};

json small_spec(double missing) {
    return {{"format", "scada-ids-synth-spec"},
            {"version", 1},
            {"seed", 3},
            {"counts", {{"0", 60}, {"1", 9}, {"13", 9}, {"18", 9}, {"19", 9}, {"20", 9}, {"25", 9}, {"29", 9}}},
            {"payload_missingness", missing}};
}

json small_config() {
    json stage = {{"num_trees", 5}};
    return {{"format", "scada-ids-pipeline"},
            {"version", 1},
            {"master_seed", 7},
            {"stages", {{"stage1", stage}, {"stage2", stage}, {"stage3", stage}}}};
}

} // namespace

TEST_F(CliPipeline, FullPipeline) {
    write("spec.json", small_spec(0.1));
    write("config.json", small_config());
    ASSERT_EQ(run("synth " + path("spec.json") + " --out " + path("raw.csv")), 0) << text("stderr.txt");
    EXPECT_TRUE(fs::exists(dir_ / "raw.csv.manifest.json"));

    // Training on data with gaps is refused.
    ASSERT_EQ(run("split " + path("raw.csv") + " --out " + path("raw_split")), 1);
    EXPECT_NE(text("stderr.txt").find("impute first"), std::string::npos);

    ASSERT_EQ(run("impute " + path("raw.csv") + " --out " + path("full.csv") + " --iterations 3"), 0)
        << text("stderr.txt");
    const auto imputed = json::parse(text("full.csv.manifest.json"));
    EXPECT_EQ(imputed["chain_iterations"], 3);

    ASSERT_EQ(run("split " + path("full.csv") + " --seed 4 --out " + path("splits")), 0) << text("stderr.txt");
    for (const char* f : {"split_1.txt", "split_2.txt", "split_3.txt", "fold_1.json", "fold_2_train.txt",
                          "fold_3_test.txt", "split_manifest.json"}) {
        EXPECT_TRUE(fs::exists(dir_ / "splits" / f)) << f;
    }
    const auto fold = json::parse(text("splits/fold_1.json"));
    EXPECT_EQ(fold["train_size"].get<int>() + fold["test_size"].get<int>(), 123);

    ASSERT_EQ(run("train --fold " + path("splits/fold_1.json") + " --config " + path("config.json") + " --out " +
                  path("model")),
              0)
        << text("stderr.txt");
    const auto log = json::parse(text("model/training_log.json"));
    const auto& pop = log["populations"];
    std::size_t stage3_rows = 0;
    for (const auto& [c, entry] : pop["stage3"].items()) {
        stage3_rows += entry["rows"].get<std::size_t>();
    }
    EXPECT_EQ(pop["stage1"]["labels"]["1"].get<std::size_t>(), stage3_rows + pop["dos_rule_rows"].get<std::size_t>());
    EXPECT_EQ(pop["stage2"]["rows"].get<std::size_t>(), pop["stage1"]["labels"]["1"].get<std::size_t>());

    ASSERT_EQ(run("eval --model " + path("model/cascade.json") + " --fold " + path("splits/fold_1.json") +
                  " --semantics both --format text --out " + path("eval")),
              0)
        << text("stderr.txt");
    const std::string out = text("stdout.txt");
    EXPECT_NE(out.find("Stage 1 [ground-truth-routed]"), std::string::npos);
    EXPECT_NE(out.find("End-to-end cascade [end-to-end]"), std::string::npos);
    EXPECT_NE(out.find("Combined stage 1 x stage 2"), std::string::npos);
    const auto summary = json::parse(text("eval/evaluation_summary.json"));
    EXPECT_NEAR(summary["combined"]["accuracy"].get<double>(),
                summary["stage1_accuracy"].get<double>() * summary["stage2_accuracy"].get<double>(), 1e-12);
    EXPECT_TRUE(summary.contains("end_to_end_accuracy"));

    ASSERT_EQ(run("report " + path("eval/stage1_report.json") + " --format text"), 0);
    EXPECT_NE(text("stdout.txt").find("Correct Instances:"), std::string::npos);
}

TEST_F(CliPipeline, TrainingIsReproducible) {
    write("spec.json", small_spec(0.0));
    write("config.json", small_config());
    ASSERT_EQ(run("synth " + path("spec.json") + " --out " + path("d.csv")), 0);
    ASSERT_EQ(run("split " + path("d.csv") + " --out " + path("s")), 0);
    ASSERT_EQ(run("split " + path("d.csv") + " --out " + path("s2")), 0);
    EXPECT_EQ(text("s/split_manifest.json"), text("s2/split_manifest.json"));
    EXPECT_EQ(text("s/fold_2_test.txt"), text("s2/fold_2_test.txt"));
    const std::string train = "train --fold " + path("s/fold_2.json") + " --config " + path("config.json");
    ASSERT_EQ(run(train + " --out " + path("m1")), 0) << text("stderr.txt");
    ASSERT_EQ(run(train + " --out " + path("m2")), 0);
    EXPECT_EQ(text("m1/stage2.json"), text("m2/stage2.json"));
    EXPECT_EQ(text("m1/stage3_4.json"), text("m2/stage3_4.json"));
}

TEST_F(CliPipeline, OutputDirectoryFromEnvironment) {
    write("spec.json", small_spec(0.0));
    ASSERT_EQ(run("synth " + path("spec.json") + " --out " + path("d.csv")), 0);
    ::setenv("SCADA_IDS_OUT_DIR", (dir_ / "from_env").string().c_str(), 1);
    const int rc = run("split " + path("d.csv"));
    ::unsetenv("SCADA_IDS_OUT_DIR");
    ASSERT_EQ(rc, 0) << text("stderr.txt");
    EXPECT_TRUE(fs::exists(dir_ / "from_env" / "split_manifest.json"));
}

TEST_F(CliPipeline, MissingCategoryNeedsExplicitOptIn) {
    json spec = small_spec(0.0);
    spec["counts"] = {{"0", 30}, {"18", 12}, {"29", 12}};
    write("spec.json", spec);
    write("config.json", small_config());
    ASSERT_EQ(run("synth " + path("spec.json") + " --out " + path("d.csv")), 0);
    ASSERT_EQ(run("split " + path("d.csv") + " --out " + path("s")), 0);
    const std::string train = "train --fold " + path("s/fold_1.json") + " --config " + path("config.json");
    EXPECT_EQ(run(train + " --out " + path("m")), 1);
    EXPECT_NE(text("stderr.txt").find("has no training rows"), std::string::npos);
    EXPECT_EQ(run(train + " --allow-missing-categories --out " + path("m")), 0) << text("stderr.txt");
}

TEST_F(CliPipeline, EmptyCountsGiveHeaderOnlyCsv) {
    json spec = small_spec(0.0);
    spec["counts"] = {{"0", 0}};
    write("spec.json", spec);
    ASSERT_EQ(run("synth " + path("spec.json") + " --out " + path("empty.csv")), 0);
    std::ostringstream header;
    scada_ids::write_header(header, scada_ids::FeatureSchema::gas_pipeline());
    EXPECT_EQ(text("empty.csv"), header.str());
}

TEST_F(CliPipeline, CompleteInputImputesToIdenticalRows) {
    write("spec.json", small_spec(0.0));
    ASSERT_EQ(run("synth " + path("spec.json") + " --out " + path("d.csv")), 0);
    ASSERT_EQ(run("impute " + path("d.csv") + " --out " + path("i.csv")), 0);
    EXPECT_EQ(text("d.csv"), text("i.csv"));
}

TEST_F(CliPipeline, Failures) {
    write("spec.json", small_spec(0.0));
    EXPECT_NE(run("synth " + path("spec.json") + " --out " + path("no/such/dir/x.csv")), 0);
    json bad = small_spec(0.0);
    bad["counts"] = {{"40", 1}};
    write("bad.json", bad);
    EXPECT_NE(run("synth " + path("bad.json") + " --out " + path("x.csv")), 0);
    EXPECT_NE(run("frobnicate"), 0);

    // A column with no observed values.
    json spec = small_spec(0.0);
    spec["missingness"] = {{"Reset Rate", 1.0}};
    write("gap.json", spec);
    ASSERT_EQ(run("synth " + path("gap.json") + " --out " + path("gap.csv")), 0);
    EXPECT_EQ(run("impute " + path("gap.csv") + " --out " + path("gap_out.csv")), 1);
    EXPECT_NE(text("stderr.txt").find("Reset Rate"), std::string::npos);
}

#else

TEST(CliPipeline, NotBuilt) { GTEST_SKIP() << "command-line tool not built"; }

#endif
