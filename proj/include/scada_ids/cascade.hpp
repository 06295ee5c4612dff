#pragma once

// Three-stage detector: Normal/Attack, then one of seven attack categories,
// then the subclass within that category. Category 6 (DoS) has a single
// subclass and is resolved by rule instead of a trained model.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scada_ids/dataset.hpp"
#include "scada_ids/error.hpp"
#include "scada_ids/forest.hpp"
#include "scada_ids/metrics.hpp"
#include "scada_ids/rng.hpp"
#include "scada_ids/taxonomy.hpp"

namespace scada_ids {

inline constexpr int kDosCategory = 6;
inline constexpr int kDosSubclass = 18;

enum class CategoryCoverage : std::uint8_t {
    /// Every one of the seven categories must have training rows.
    all_required,
    /// Stages are built for whatever categories are present.
    present_only,
};

struct StageDatasets {
    Samples stage1{kFeatureCount};
    Samples stage2{kFeatureCount};
    /// Category -> rows of that category labelled by subclass.
    std::map<int, Samples> stage3;
};

[[nodiscard]] inline Samples samples_of(const DatasetView& view, Label (*label_of)(const Record&)) {
    Samples s(kFeatureCount);
    s.values.reserve(view.size() * kFeatureCount);
    s.labels.reserve(view.size());
    for (std::size_t i = 0; i < view.size(); ++i) {
        s.push_back(view[i].features, label_of(view[i]));
    }
    return s;
}

/// Splits a training view into the per-stage training sets: binary labels on
/// everything; category labels on attack rows; subclass labels per category.
[[nodiscard]] inline StageDatasets derive_stage_datasets(const DatasetView& train,
                                                         CategoryCoverage coverage = CategoryCoverage::all_required) {
    StageDatasets out;
    for (std::size_t i = 0; i < train.size(); ++i) {
        const Record& r = train[i];
        if (!r.complete()) {
            throw TrainingError("training row " + std::to_string(train.rows[i]) +
                                " has a missing value; impute first");
        }
        out.stage1.push_back(r.features, to_int(r.binary));
        if (r.binary == BinaryLabel::normal) {
            continue;
        }
        out.stage2.push_back(r.features, to_int(r.category));
        if (r.category != CategoryLabel::dos) {
            auto [it, inserted] = out.stage3.try_emplace(to_int(r.category), kFeatureCount);
            it->second.push_back(r.features, to_int(r.subclass));
        }
    }
    if (coverage == CategoryCoverage::all_required) {
        std::array<bool, kCategoryCount + 1> seen{};
        for (Label c : out.stage2.labels) {
            seen[static_cast<std::size_t>(c)] = true;
        }
        for (auto c : Taxonomy::attack_categories()) {
            if (!seen[static_cast<std::size_t>(c)]) {
                throw TrainingError("category " + std::to_string(to_int(c)) + " (" +
                                    std::string(Taxonomy::category_name(c)) + ") has no training rows");
            }
        }
    }
    return out;
}

struct CascadeTrainConfig {
    TrainConfig stage1 = with_batch(1000, 11);
    TrainConfig stage2 = with_batch(100, 22);
    /// Template for every stage-3 model; each category's seed is derived from it.
    TrainConfig stage3 = with_batch(10, 33);
    CategoryCoverage coverage = CategoryCoverage::present_only;

    /// Stage seeds at fixed offsets from one master seed.
    void set_master_seed(std::uint64_t master) {
        stage1.seed = master + 11;
        stage2.seed = master + 22;
        stage3.seed = master + 33;
    }

private:
    static TrainConfig with_batch(int batch, std::uint64_t seed) {
        TrainConfig c;
        c.batch_size = batch;
        c.seed = seed;
        return c;
    }
};

struct CascadeModel {
    RandomForestModel stage1;
    RandomForestModel stage2;
    /// Category -> subclass model. Never holds category 6.
    std::map<int, RandomForestModel> stage3;
};

struct CascadeOutput {
    BinaryLabel binary = BinaryLabel::normal;
    std::optional<CategoryLabel> category;
    std::optional<SubclassLabel> subclass;

    /// Subclass label with Normal as 0.
    [[nodiscard]] Label outcome() const { return subclass ? to_int(*subclass) : 0; }
};

/// Optional per-caller invocation counters.
struct CascadeTrace {
    std::size_t stage1 = 0;
    std::size_t stage2 = 0;
    std::size_t stage3 = 0;
    std::size_t dos_rule = 0;
};

[[nodiscard]] inline TrainConfig stage3_config(const CascadeTrainConfig& cfg, int category) {
    TrainConfig c = cfg.stage3;
    c.seed = rng::derive(cfg.stage3.seed, static_cast<std::uint64_t>(category));
    return c;
}

[[nodiscard]] inline CascadeModel train_cascade(const DatasetView& train, const CascadeTrainConfig& cfg = {}) {
    const auto stages = derive_stage_datasets(train, cfg.coverage);
    CascadeModel m;
    try {
        m.stage1 = train_forest(stages.stage1, cfg.stage1, std::vector<Label>{0, 1});
    } catch (const TrainingError& e) {
        throw TrainingError(std::string("stage 1: ") + e.what());
    }
    if (stages.stage2.empty()) {
        throw TrainingError("stage 2: training view holds no attack rows");
    }
    try {
        m.stage2 = train_forest(stages.stage2, cfg.stage2);
    } catch (const TrainingError& e) {
        throw TrainingError(std::string("stage 2: ") + e.what());
    }
    for (const auto& [category, samples] : stages.stage3) {
        try {
            m.stage3.emplace(category,
                             train_forest(samples, stage3_config(cfg, category),
                                          Taxonomy::category_subclasses(static_cast<CategoryLabel>(category))));
        } catch (const TrainingError& e) {
            throw TrainingError("stage 3, category " + std::to_string(category) + ": " + e.what());
        }
    }
    return m;
}

/// Routes one record through the cascade. Stops after stage 1 on Normal.
[[nodiscard]] inline CascadeOutput classify(const CascadeModel& m, std::span<const double> features,
                                            CascadeTrace* trace = nullptr) {
    CascadeOutput out;
    if (trace) {
        ++trace->stage1;
    }
    if (predict(m.stage1, features) == 0) {
        return out;
    }
    out.binary = BinaryLabel::attack;
    if (trace) {
        ++trace->stage2;
    }
    const Label category = predict(m.stage2, features);
    out.category = static_cast<CategoryLabel>(category);
    if (category == kDosCategory) {
        if (trace) {
            ++trace->dos_rule;
        }
        out.subclass = SubclassLabel{kDosSubclass};
        return out;
    }
    const auto it = m.stage3.find(category);
    if (it == m.stage3.end()) {
        throw PredictionError("no stage-3 model for category " + std::to_string(category));
    }
    if (trace) {
        ++trace->stage3;
    }
    out.subclass = SubclassLabel{static_cast<std::uint8_t>(predict(it->second, features))};
    return out;
}

namespace detail {

inline std::vector<std::string> category_names(const std::vector<Label>& labels) {
    std::vector<std::string> out;
    for (Label c : labels) {
        out.emplace_back(Taxonomy::category_name(static_cast<CategoryLabel>(c)));
    }
    return out;
}

inline std::vector<Label> predict_rows(const RandomForestModel& m, const DatasetView& view,
                                       const std::vector<std::size_t>& positions) {
    Samples s(kFeatureCount);
    for (auto i : positions) {
        s.push_back(view[i].features, 0);
    }
    return predict_batch(m, s);
}

} // namespace detail

struct StagewiseEvaluation {
    StageReport stage1;
    /// Over true attack rows; absent when the view has none.
    std::optional<StageReport> stage2;
    /// Category -> report over that category's true rows. Category 6 is
    /// scored through the DoS rule.
    std::map<int, StageReport> stage3;
    /// Stage-1 x stage-2 figures; present with stage2.
    std::optional<StageFigures> combined;
};

/// Scores each stage on the rows that truly belong to it: stage 1 on every
/// row, stage 2 on true attacks, stage 3 on the true rows of each category,
/// independent of upstream predictions.
[[nodiscard]] inline StagewiseEvaluation evaluate_stagewise(const CascadeModel& m, const DatasetView& test) {
    if (test.size() == 0) {
        throw DomainError("cannot evaluate on an empty view");
    }
    StagewiseEvaluation out;
    std::vector<std::size_t> all(test.size());
    std::vector<std::size_t> attacks;
    std::map<int, std::vector<std::size_t>> by_category;
    std::vector<Label> truth1(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
        all[i] = i;
        truth1[i] = to_int(test[i].binary);
        if (test[i].binary == BinaryLabel::attack) {
            attacks.push_back(i);
            by_category[to_int(test[i].category)].push_back(i);
        }
    }

    const auto pred1 = detail::predict_rows(m.stage1, test, all);
    out.stage1 = StageReport::make("Stage 1", Semantics::ground_truth_routed,
                                   confusion(truth1, pred1, {0, 1}), {"Normal", "Attack"});
    if (attacks.empty()) {
        return out;
    }

    std::vector<Label> truth2;
    for (auto i : attacks) {
        truth2.push_back(to_int(test[i].category));
    }
    const auto pred2 = detail::predict_rows(m.stage2, test, attacks);
    std::vector<Label> labels2 = m.stage2.label_space;
    for (Label t : truth2) {
        if (std::find(labels2.begin(), labels2.end(), t) == labels2.end()) {
            labels2.push_back(t);
        }
    }
    std::sort(labels2.begin(), labels2.end());
    out.stage2 = StageReport::make("Stage 2", Semantics::ground_truth_routed, confusion(truth2, pred2, labels2),
                                   detail::category_names(labels2));
    out.combined = combined_two_stage(out.stage1.metrics, out.stage2->metrics);

    for (const auto& [category, rows] : by_category) {
        std::vector<Label> truth3;
        for (auto i : rows) {
            truth3.push_back(to_int(test[i].subclass));
        }
        const std::string name = "Stage 3, category " + std::to_string(category) + " (" +
                                 std::string(Taxonomy::category_name(static_cast<CategoryLabel>(category))) + ")";
        if (category == kDosCategory) {
            const std::vector<Label> pred3(truth3.size(), kDosSubclass);
            out.stage3.emplace(category, StageReport::make(name, Semantics::ground_truth_routed,
                                                           confusion(truth3, pred3, {kDosSubclass})));
            continue;
        }
        const auto it = m.stage3.find(category);
        if (it == m.stage3.end()) {
            continue;
        }
        const auto pred3 = detail::predict_rows(it->second, test, rows);
        out.stage3.emplace(category, StageReport::make(name, Semantics::ground_truth_routed,
                                                       confusion(truth3, pred3, it->second.label_space)));
    }
    return out;
}

/// All 36 outcomes (0 = Normal, 1..35 subclasses) with errors propagating
/// through the cascade.
[[nodiscard]] inline StageReport evaluate_end_to_end(const CascadeModel& m, const DatasetView& test) {
    if (test.size() == 0) {
        throw DomainError("cannot evaluate on an empty view");
    }
    std::vector<Label> labels(kSubclassCount + 1);
    for (int s = 0; s <= kSubclassCount; ++s) {
        labels[static_cast<std::size_t>(s)] = s;
    }
    std::vector<std::string> names{"Normal"};
    for (int s = 1; s <= kSubclassCount; ++s) {
        names.push_back(std::to_string(s));
    }
    ConfusionMatrix cm(labels);
    for (std::size_t i = 0; i < test.size(); ++i) {
        cm.add(to_int(test[i].subclass), classify(m, test[i].features).outcome());
    }
    return StageReport::make("End-to-end cascade", Semantics::end_to_end, std::move(cm), std::move(names));
}

// ---------------------------------------------------------------------------
// Serialization: a manifest plus one forest document per stage model.

inline constexpr std::string_view kCascadeFormat = "scada-ids-cascade";
inline constexpr int kCascadeVersion = 1;

namespace detail {

inline void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    out << j.dump() << '\n';
    out.close();
    if (!out) {
        throw Error("cannot write " + path.string());
    }
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw StructureError(path.string() + ": " + e.what());
    }
}

} // namespace detail

/// Checks the structural invariants of a cascade against the taxonomy.
inline void validate_cascade(const CascadeModel& m) {
    if (m.stage1.label_space != std::vector<Label>{0, 1}) {
        throw StructureError("stage-1 label space must be {0, 1}");
    }
    for (Label c : m.stage2.label_space) {
        if (c < 1 || c > static_cast<int>(kCategoryCount)) {
            throw StructureError("stage-2 label " + std::to_string(c) + " is not an attack category");
        }
        if (c != kDosCategory && !m.stage3.contains(c)) {
            throw StructureError("stage 2 can emit category " + std::to_string(c) + " but no stage-3 model exists");
        }
    }
    for (const auto& [category, model] : m.stage3) {
        if (category == kDosCategory || category < 1 || category > static_cast<int>(kCategoryCount)) {
            throw StructureError("stage-3 model keyed by invalid category " + std::to_string(category));
        }
        if (model.label_space != Taxonomy::category_subclasses(static_cast<CategoryLabel>(category))) {
            throw StructureError("stage-3 model for category " + std::to_string(category) +
                                 " does not cover exactly that category's subclasses");
        }
    }
}

/// Writes cascade.json and the stage documents into `dir`; returns the manifest path.
inline std::filesystem::path save_cascade(const CascadeModel& m, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    nlohmann::json stage3 = nlohmann::json::object();
    detail::write_json_file(dir / "stage1.json", to_json(m.stage1));
    detail::write_json_file(dir / "stage2.json", to_json(m.stage2));
    for (const auto& [category, model] : m.stage3) {
        const std::string file = "stage3_" + std::to_string(category) + ".json";
        detail::write_json_file(dir / file, to_json(model));
        stage3[std::to_string(category)] = file;
    }
    const nlohmann::json manifest = {{"format", kCascadeFormat},
                                     {"version", kCascadeVersion},
                                     {"taxonomy", kTaxonomyVersion},
                                     {"stage1", "stage1.json"},
                                     {"stage2", "stage2.json"},
                                     {"stage3", stage3},
                                     {"dos_rule", {{"category", kDosCategory}, {"subclass", kDosSubclass}}}};
    const auto path = dir / "cascade.json";
    detail::write_json_file(path, manifest);
    return path;
}

[[nodiscard]] inline CascadeModel load_cascade(const std::filesystem::path& manifest_path) {
    const auto manifest = detail::read_json_file(manifest_path);
    const auto dir = manifest_path.parent_path();
    CascadeModel m;
    try {
        if (manifest.at("format").get<std::string>() != kCascadeFormat) {
            throw StructureError("not a cascade manifest");
        }
        if (manifest.at("version").get<int>() != kCascadeVersion) {
            throw StructureError("unsupported cascade version");
        }
        if (manifest.at("taxonomy").get<std::string>() != kTaxonomyVersion) {
            throw StructureError("cascade was built for taxonomy '" + manifest.at("taxonomy").get<std::string>() + "'");
        }
        const auto& rule = manifest.at("dos_rule");
        if (rule.at("category").get<int>() != kDosCategory || rule.at("subclass").get<int>() != kDosSubclass) {
            throw StructureError("unexpected DoS rule");
        }
        m.stage1 = forest_from_json(detail::read_json_file(dir / manifest.at("stage1").get<std::string>()));
        m.stage2 = forest_from_json(detail::read_json_file(dir / manifest.at("stage2").get<std::string>()));
        for (const auto& [key, file] : manifest.at("stage3").items()) {
            m.stage3.emplace(std::stoi(key), forest_from_json(detail::read_json_file(dir / file.get<std::string>())));
        }
    } catch (const nlohmann::json::exception& e) {
        throw StructureError(std::string("malformed cascade manifest: ") + e.what());
    }
    validate_cascade(m);
    return m;
}

} // namespace scada_ids
