// scada-ids: synthesize, impute, split, train, evaluate and report.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pipeline_config.hpp"
#include "scada_ids/scada_ids.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace scada_ids;
using scada_ids::cli::PipelineConfig;
using scada_ids::cli::SemanticsChoice;

namespace {

constexpr const char* kOutDirVariable = "SCADA_IDS_OUT_DIR";

json read_json(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw StructureError(path.string() + ": " + e.what());
    }
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    out << j.dump(2) << '\n';
    out.close();
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    // Every document is re-read before the command reports success.
    if (read_json(path) != j) {
        throw Error(path.string() + " did not read back identically");
    }
}

Dataset read_dataset(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    return load_dataset(in);
}

void write_dataset_file(const fs::path& path, const Dataset& d) {
    {
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw Error("cannot write " + path.string());
        }
        write_dataset(d, out);
        out.close();
        if (!out) {
            throw Error("cannot write " + path.string());
        }
    }
    if (read_dataset(path) != d) {
        throw Error(path.string() + " did not read back identically");
    }
}

void write_indices(const fs::path& path, const std::vector<std::size_t>& indices) {
    {
        std::ofstream out(path, std::ios::binary);
        write_index_list(indices, out);
        out.close();
        if (!out) {
            throw Error("cannot write " + path.string());
        }
    }
    std::ifstream in(path, std::ios::binary);
    if (read_index_list(in) != indices) {
        throw Error(path.string() + " did not read back identically");
    }
}

std::vector<std::size_t> read_indices(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    return read_index_list(in);
}

json feature_counts(const MissingnessMask& mask, const FeatureSchema& schema) {
    json j = json::object();
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        j[std::string(schema[i].name)] = mask.count(i);
    }
    return j;
}

json histogram_of(const Dataset& d) {
    std::map<int, std::size_t> h;
    for (const auto& r : d.records) {
        ++h[to_int(r.subclass)];
    }
    json j = json::object();
    for (const auto& [s, n] : h) {
        j[std::to_string(s)] = n;
    }
    return j;
}

/// Options shared by every verb.
struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;

    [[nodiscard]] PipelineConfig config() const {
        if (config_path.empty()) {
            PipelineConfig c;
            c.cascade.coverage = CategoryCoverage::all_required;
            c.cascade.set_master_seed(c.master_seed);
            return c;
        }
        return cli::pipeline_config_from_json(read_json(config_path));
    }

    /// --out, then the environment variable, then the config file, then ".".
    [[nodiscard]] fs::path output_dir(const PipelineConfig& c) const {
        if (!out.empty()) {
            return out;
        }
        if (const char* env = std::getenv(kOutDirVariable); env != nullptr && *env != '\0') {
            return env;
        }
        return c.output_dir.value_or(".");
    }
};

// ---------------------------------------------------------------------------

int cmd_synth(const std::string& spec_path, const Common& common) {
    if (common.out.empty()) {
        throw DomainError("synth needs --out <file.csv>");
    }
    const json spec_doc = read_json(spec_path);
    auto spec = cli::synthesis_spec_from_json(spec_doc);
    if (common.seed) {
        spec.seed = *common.seed;
    }
    const auto out = generate_synthetic_with_mask(spec);
    const fs::path csv = common.out;
    write_dataset_file(csv, out.data);

    json counts = json::object();
    for (const auto& [s, n] : spec.counts) {
        counts[std::to_string(s)] = n;
    }
    write_json(csv.string() + ".manifest.json",
               {{"format", "scada-ids-synth-manifest"},
                {"version", 1},
                {"command", "synth"},
                {"spec", fs::absolute(spec_path).string()},
                {"seed", spec.seed},
                {"counts", counts},
                {"rows", out.data.size()},
                {"dropped_cells", feature_counts(out.dropped, out.data.schema)},
                {"output", fs::absolute(csv).string()}});
    std::cout << "wrote " << out.data.size() << " rows to " << csv.string() << '\n';
    return 0;
}

int cmd_impute(const std::string& in_path, const Common& common, std::optional<int> iterations) {
    if (common.out.empty()) {
        throw DomainError("impute needs --out <file.csv>");
    }
    const auto cfg = common.config();
    auto icfg = cfg.imputation;
    if (iterations) {
        icfg.chain_iterations = *iterations;
    }
    if (common.seed) {
        icfg.seed = *common.seed;
    }
    const Dataset in = read_dataset(in_path);
    const auto mask = detect_missing(in);
    const Dataset out = mice_impute(in, icfg);
    if (!out.complete()) {
        throw ImputationError("imputed dataset still has missing cells");
    }
    const fs::path csv = common.out;
    write_dataset_file(csv, out);
    write_json(csv.string() + ".manifest.json",
               {{"format", "scada-ids-impute-manifest"},
                {"version", 1},
                {"command", "impute"},
                {"input", fs::absolute(in_path).string()},
                {"output", fs::absolute(csv).string()},
                {"rows", out.size()},
                {"missing_cells", feature_counts(mask, in.schema)},
                {"chain_iterations", icfg.chain_iterations},
                {"buckets", icfg.buckets},
                {"seed", icfg.seed}});
    std::cout << "imputed " << mask.count() << " cells; wrote " << csv.string() << '\n';
    return 0;
}

int cmd_split(const std::string& in_path, const Common& common) {
    const auto cfg = common.config();
    const std::uint64_t seed = common.seed.value_or(cfg.resolved_split_seed());
    const fs::path dir = common.output_dir(cfg);
    fs::create_directories(dir);
    const Dataset d = read_dataset(in_path);
    const auto splits = stratified_split3(d, seed);
    const auto folds = make_folds(splits, d.size());

    json split_docs = json::array();
    for (std::size_t k = 0; k < 3; ++k) {
        const std::string file = "split_" + std::to_string(k + 1) + ".txt";
        write_indices(dir / file, splits[k].indices);
        split_docs.push_back({{"split", k + 1}, {"file", file}, {"size", splits[k].size()}});
    }
    json fold_docs = json::array();
    for (const auto& fold : folds) {
        const std::string stem = "fold_" + std::to_string(fold.fold_id);
        write_indices(dir / (stem + "_train.txt"), fold.train);
        write_indices(dir / (stem + "_test.txt"), fold.test);
        write_json(dir / (stem + ".json"), {{"format", "scada-ids-fold"},
                                            {"version", 1},
                                            {"fold_id", fold.fold_id},
                                            {"dataset", fs::absolute(in_path).string()},
                                            {"train", stem + "_train.txt"},
                                            {"test", stem + "_test.txt"},
                                            {"train_size", fold.train.size()},
                                            {"test_size", fold.test.size()},
                                            {"seed", seed}});
        fold_docs.push_back(stem + ".json");
    }
    write_json(dir / "split_manifest.json", {{"format", "scada-ids-split-manifest"},
                                             {"version", 1},
                                             {"command", "split"},
                                             {"dataset", fs::absolute(in_path).string()},
                                             {"rows", d.size()},
                                             {"subclass_histogram", histogram_of(d)},
                                             {"seed", seed},
                                             {"splits", split_docs},
                                             {"folds", fold_docs}});
    std::cout << "splits " << splits[0].size() << '/' << splits[1].size() << '/' << splits[2].size() << " written to "
              << dir.string() << '\n';
    return 0;
}

struct LoadedFold {
    Dataset data;
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    json doc;
};

LoadedFold load_fold(const fs::path& manifest) {
    LoadedFold f;
    f.doc = read_json(manifest);
    try {
        if (f.doc.at("format").get<std::string>() != "scada-ids-fold") {
            throw StructureError(manifest.string() + " is not a fold manifest");
        }
        const auto dir = manifest.parent_path();
        f.data = read_dataset(f.doc.at("dataset").get<std::string>());
        f.train = read_indices(dir / f.doc.at("train").get<std::string>());
        f.test = read_indices(dir / f.doc.at("test").get<std::string>());
    } catch (const json::exception& e) {
        throw StructureError(manifest.string() + ": " + e.what());
    }
    (void)view_of(f.data, f.train);
    (void)view_of(f.data, f.test);
    return f;
}

int cmd_train(const std::string& fold_path, const Common& common, bool allow_missing_categories) {
    auto cfg = common.config();
    if (common.seed) {
        cfg.master_seed = *common.seed;
        cfg.cascade.set_master_seed(*common.seed);
    }
    if (allow_missing_categories) {
        cfg.cascade.coverage = CategoryCoverage::present_only;
    }
    const auto fold = load_fold(fold_path);
    const auto train = view_of(fold.data, fold.train);
    for (std::size_t i = 0; i < train.size(); ++i) {
        if (!train[i].complete()) {
            throw TrainingError("training row " + std::to_string(train.rows[i]) +
                                " has a missing value; impute first (scada-ids impute)");
        }
    }
    const auto stages = derive_stage_datasets(train, cfg.cascade.coverage);
    const auto model = train_cascade(train, cfg.cascade);

    const fs::path dir = common.output_dir(cfg);
    const auto manifest = save_cascade(model, dir);
    const auto reloaded = load_cascade(manifest);
    for (std::size_t i = 0; i < std::min<std::size_t>(train.size(), 200); ++i) {
        if (classify(reloaded, train[i].features).outcome() != classify(model, train[i].features).outcome()) {
            throw StructureError("reloaded cascade disagrees with the trained one");
        }
    }

    auto histogram = [](const Samples& s) {
        std::map<Label, std::size_t> h;
        for (Label l : s.labels) {
            ++h[l];
        }
        json j = json::object();
        for (const auto& [l, n] : h) {
            j[std::to_string(l)] = n;
        }
        return j;
    };
    json stage3 = json::object();
    for (const auto& [c, s] : stages.stage3) {
        stage3[std::to_string(c)] = {{"rows", s.size()}, {"subclasses", histogram(s)}};
    }
    std::size_t dos_rows = 0;
    for (Label c : stages.stage2.labels) {
        dos_rows += c == kDosCategory;
    }
    write_json(dir / "training_log.json",
               {{"format", "scada-ids-training-log"},
                {"version", 1},
                {"command", "train"},
                {"fold", fs::absolute(fold_path).string()},
                {"model", fs::absolute(manifest).string()},
                {"config", cli::to_json(cfg)},
                {"populations",
                 {{"stage1", {{"rows", stages.stage1.size()}, {"labels", histogram(stages.stage1)}}},
                  {"stage2", {{"rows", stages.stage2.size()}, {"labels", histogram(stages.stage2)}}},
                  {"stage3", stage3},
                  {"dos_rule_rows", dos_rows}}}});
    std::cout << "trained cascade on " << train.size() << " rows; model at " << manifest.string() << '\n';
    return 0;
}

void emit(const StageReport& r, ReportFormat format, const fs::path& path) {
    write_json(path, to_json(r));
    if (report_from_json(read_json(path)) != r) {
        throw StructureError(path.string() + " does not reproduce its report");
    }
    render_report(r, format, std::cout);
    std::cout << '\n';
}

int cmd_eval(const std::string& model_path, const std::string& fold_path, const Common& common,
             const std::string& semantics_flag, const std::string& format_flag) {
    const auto cfg = common.config();
    const auto semantics =
        semantics_flag.empty() ? cfg.semantics : cli::semantics_choice_from_string(semantics_flag);
    const auto format = format_flag.empty() ? cfg.report_format : report_format_from_string(format_flag);
    const auto model = load_cascade(model_path);
    const auto fold = load_fold(fold_path);
    const auto test = view_of(fold.data, fold.test);
    if (!fold.data.complete()) {
        for (std::size_t i = 0; i < test.size(); ++i) {
            if (!test[i].complete()) {
                throw DomainError("test row " + std::to_string(test.rows[i]) +
                                  " has a missing value; impute first (scada-ids impute)");
            }
        }
    }
    const fs::path dir = common.output_dir(cfg);
    fs::create_directories(dir);

    json summary = {{"format", "scada-ids-evaluation"},
                    {"version", 1},
                    {"command", "eval"},
                    {"model", fs::absolute(model_path).string()},
                    {"fold", fs::absolute(fold_path).string()},
                    {"semantics", cli::to_string(semantics)},
                    {"test_rows", test.size()}};
    json reports = json::array();

    if (semantics != SemanticsChoice::end2end) {
        const auto eval = evaluate_stagewise(model, test);
        emit(eval.stage1, format, dir / "stage1_report.json");
        reports.push_back("stage1_report.json");
        summary["stage1_accuracy"] = eval.stage1.metrics.accuracy;
        if (eval.stage2) {
            emit(*eval.stage2, format, dir / "stage2_report.json");
            reports.push_back("stage2_report.json");
            summary["stage2_accuracy"] = eval.stage2->metrics.accuracy;
        }
        json stage3 = json::object();
        for (const auto& [c, r] : eval.stage3) {
            const std::string file = "stage3_" + std::to_string(c) + "_report.json";
            emit(r, format, dir / file);
            reports.push_back(file);
            stage3[std::to_string(c)] = r.metrics.accuracy;
        }
        summary["stage3_accuracy"] = stage3;
        if (eval.combined) {
            summary["combined"] = {{"accuracy", eval.combined->accuracy},
                                   {"precision", eval.combined->precision},
                                   {"recall", eval.combined->recall}};
            std::cout << "Combined stage 1 x stage 2: accuracy " << detail::percent(eval.combined->accuracy)
                      << ", precision " << detail::fixed(eval.combined->precision, 3) << ", recall "
                      << detail::fixed(eval.combined->recall, 3) << "\n\n";
        }
    }
    if (semantics != SemanticsChoice::stagewise) {
        const auto r = evaluate_end_to_end(model, test);
        emit(r, format, dir / "end_to_end_report.json");
        reports.push_back("end_to_end_report.json");
        summary["end_to_end_accuracy"] = r.metrics.accuracy;
    }
    if (summary.contains("end_to_end_accuracy") && summary.contains("stage1_accuracy")) {
        std::cout << "End-to-end accuracy " << detail::percent(summary["end_to_end_accuracy"].get<double>())
                  << " vs stage-1 " << detail::percent(summary["stage1_accuracy"].get<double>());
        if (summary.contains("stage2_accuracy")) {
            std::cout << ", stage-2 " << detail::percent(summary["stage2_accuracy"].get<double>());
        }
        std::cout << '\n';
    }
    summary["reports"] = reports;
    write_json(dir / "evaluation_summary.json", summary);
    return 0;
}

int cmd_report(const std::string& path, const std::string& format_flag) {
    const auto r = report_from_json(read_json(path));
    render_report(r, format_flag.empty() ? ReportFormat::text : report_format_from_string(format_flag), std::cout);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Three-stage intrusion detection for gas-pipeline SCADA records", "scada-ids"};
    app.require_subcommand(1);
    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config_path, "Pipeline configuration (JSON)")->check(CLI::ExistingFile);
        sub->add_option("--seed", common.seed, "Seed override");
        sub->add_option("--out", common.out, "Output file or directory");
    };

    std::string input;
    std::string model;
    std::string fold;
    std::string semantics;
    std::string format;
    std::optional<int> iterations;
    bool allow_missing_categories = false;

    auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset from a specification");
    synth->add_option("spec", input, "Synthesis specification (JSON)")->required();
    add_common(synth);

    auto* impute = app.add_subcommand("impute", "Fill missing payload cells by chained equations");
    impute->add_option("input", input, "Dataset CSV")->required();
    impute->add_option("--iterations", iterations, "Chain iterations");
    add_common(impute);

    auto* split = app.add_subcommand("split", "Write three stratified splits and their folds");
    split->add_option("input", input, "Complete dataset CSV")->required();
    add_common(split);

    auto* train = app.add_subcommand("train", "Train the cascade on a fold's training rows");
    train->add_option("--fold", fold, "Fold manifest")->required();
    train->add_flag("--allow-missing-categories", allow_missing_categories,
                    "Build stages for whichever categories are present");
    add_common(train);

    auto* eval = app.add_subcommand("eval", "Evaluate a trained cascade on a fold's test rows");
    eval->add_option("--model", model, "Cascade manifest (cascade.json)")->required();
    eval->add_option("--fold", fold, "Fold manifest")->required();
    eval->add_option("--semantics", semantics, "stagewise, end2end or both")
        ->check(CLI::IsMember({"stagewise", "end2end", "both"}));
    eval->add_option("--format", format, "text or json-like")->check(CLI::IsMember({"text", "json", "json-like"}));
    add_common(eval);

    auto* report = app.add_subcommand("report", "Render a saved report");
    report->add_option("report", input, "Report document")->required();
    report->add_option("--format", format, "text or json-like")->check(CLI::IsMember({"text", "json", "json-like"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            return cmd_synth(input, common);
        }
        if (impute->parsed()) {
            return cmd_impute(input, common, iterations);
        }
        if (split->parsed()) {
            return cmd_split(input, common);
        }
        if (train->parsed()) {
            return cmd_train(fold, common, allow_missing_categories);
        }
        if (eval->parsed()) {
            return cmd_eval(model, fold, common, semantics, format);
        }
        if (report->parsed()) {
            return cmd_report(input, format);
        }
    } catch (const std::exception& e) {
        std::cerr << "scada-ids: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
