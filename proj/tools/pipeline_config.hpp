#pragma once

// JSON documents read by the command-line tool: the pipeline configuration
// and the synthetic-data specification.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "scada_ids/scada_ids.hpp"

namespace scada_ids::cli {

inline constexpr std::string_view kPipelineFormat = "scada-ids-pipeline";
inline constexpr std::string_view kSynthSpecFormat = "scada-ids-synth-spec";

enum class SemanticsChoice { stagewise, end2end, both };

inline SemanticsChoice semantics_choice_from_string(const std::string& s) {
    if (s == "stagewise") {
        return SemanticsChoice::stagewise;
    }
    if (s == "end2end") {
        return SemanticsChoice::end2end;
    }
    if (s == "both") {
        return SemanticsChoice::both;
    }
    throw DomainError("unknown semantics '" + s + "' (expected stagewise, end2end or both)");
}

inline std::string to_string(SemanticsChoice s) {
    switch (s) {
    case SemanticsChoice::stagewise: return "stagewise";
    case SemanticsChoice::end2end: return "end2end";
    case SemanticsChoice::both: return "both";
    }
    return "both";
}

struct PipelineConfig {
    std::optional<std::filesystem::path> dataset;
    std::optional<std::filesystem::path> output_dir;
    ImputationConfig imputation;
    std::uint64_t master_seed = 0;
    std::optional<std::uint64_t> split_seed;
    CascadeTrainConfig cascade;
    SemanticsChoice semantics = SemanticsChoice::both;
    ReportFormat report_format = ReportFormat::text;

    [[nodiscard]] std::uint64_t resolved_split_seed() const { return split_seed.value_or(master_seed); }
};

inline nlohmann::json to_json(const PipelineConfig& c) {
    nlohmann::json j = {
        {"format", kPipelineFormat},
        {"version", 1},
        {"master_seed", c.master_seed},
        {"imputation",
         {{"chain_iterations", c.imputation.chain_iterations},
          {"seed", c.imputation.seed},
          {"buckets", c.imputation.buckets}}},
        {"split_seed", c.resolved_split_seed()},
        {"stages",
         {{"stage1", config_to_json(c.cascade.stage1)},
          {"stage2", config_to_json(c.cascade.stage2)},
          {"stage3", config_to_json(c.cascade.stage3)}}},
        {"coverage", c.cascade.coverage == CategoryCoverage::all_required ? "all_required" : "present_only"},
        {"semantics", to_string(c.semantics)},
        {"report_format", c.report_format == ReportFormat::json ? "json-like" : "text"},
    };
    if (c.dataset) {
        j["dataset"] = c.dataset->string();
    }
    if (c.output_dir) {
        j["output_dir"] = c.output_dir->string();
    }
    return j;
}

/// Stage seeds not given explicitly follow the master seed at fixed offsets.
inline PipelineConfig pipeline_config_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format").get<std::string>() != kPipelineFormat) {
            throw StructureError("not a pipeline configuration");
        }
        if (j.at("version").get<int>() != 1) {
            throw StructureError("unsupported pipeline configuration version");
        }
        PipelineConfig c;
        c.cascade.coverage = CategoryCoverage::all_required;
        c.master_seed = j.value("master_seed", std::uint64_t{0});
        c.cascade.set_master_seed(c.master_seed);
        if (j.contains("dataset")) {
            c.dataset = j.at("dataset").get<std::string>();
        }
        if (j.contains("output_dir")) {
            c.output_dir = j.at("output_dir").get<std::string>();
        }
        if (j.contains("imputation")) {
            const auto& ij = j.at("imputation");
            c.imputation.chain_iterations = ij.value("chain_iterations", c.imputation.chain_iterations);
            c.imputation.seed = ij.value("seed", c.imputation.seed);
            c.imputation.buckets = ij.value("buckets", c.imputation.buckets);
        }
        if (j.contains("split_seed")) {
            c.split_seed = j.at("split_seed").get<std::uint64_t>();
        }
        if (j.contains("stages")) {
            const auto& sj = j.at("stages");
            if (sj.contains("stage1")) {
                c.cascade.stage1 = config_from_json(sj.at("stage1"), c.cascade.stage1);
            }
            if (sj.contains("stage2")) {
                c.cascade.stage2 = config_from_json(sj.at("stage2"), c.cascade.stage2);
            }
            if (sj.contains("stage3")) {
                c.cascade.stage3 = config_from_json(sj.at("stage3"), c.cascade.stage3);
            }
        }
        if (j.contains("coverage")) {
            const auto s = j.at("coverage").get<std::string>();
            if (s == "all_required") {
                c.cascade.coverage = CategoryCoverage::all_required;
            } else if (s == "present_only") {
                c.cascade.coverage = CategoryCoverage::present_only;
            } else {
                throw StructureError("unknown coverage '" + s + "'");
            }
        }
        if (j.contains("semantics")) {
            c.semantics = semantics_choice_from_string(j.at("semantics").get<std::string>());
        }
        if (j.contains("report_format")) {
            c.report_format = report_format_from_string(j.at("report_format").get<std::string>());
        }
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw StructureError(std::string("malformed pipeline configuration: ") + e.what());
    }
}

/// Either explicit "counts" keyed by subclass, or "scale" of the reference
/// corpus counts. Missingness is a payload-wide rate and/or per-feature rates.
inline SynthesisSpec synthesis_spec_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format").get<std::string>() != kSynthSpecFormat) {
            throw StructureError("not a synthesis specification");
        }
        if (j.at("version").get<int>() != 1) {
            throw StructureError("unsupported synthesis specification version");
        }
        SynthesisSpec spec;
        spec.seed = j.value("seed", std::uint64_t{0});
        if (j.contains("counts") == j.contains("scale")) {
            throw StructureError("give exactly one of 'counts' or 'scale'");
        }
        if (j.contains("scale")) {
            const double scale = j.at("scale").get<double>();
            if (!(scale >= 0.0)) {
                throw DomainError("scale must be non-negative");
            }
            spec.counts = scaled_reference_counts(scale);
        } else {
            for (const auto& [key, n] : j.at("counts").items()) {
                std::size_t used = 0;
                const int label = std::stoi(key, &used);
                if (used != key.size()) {
                    throw StructureError("count key '" + key + "' is not a subclass number");
                }
                spec.counts[label] = n.get<std::size_t>();
            }
        }
        if (j.contains("payload_missingness")) {
            spec.set_payload_missingness(j.at("payload_missingness").get<double>());
        }
        if (j.contains("missingness")) {
            const auto schema = FeatureSchema::gas_pipeline();
            for (const auto& [name, rate] : j.at("missingness").items()) {
                const auto idx = schema.index_of(name);
                if (!idx) {
                    throw StructureError("unknown feature '" + name + "'");
                }
                spec.missingness[*idx] = rate.get<double>();
            }
        }
        spec.response_overlap = j.value("response_overlap", 0.0);
        if (j.contains("pressure_per_set_point") && !j.at("pressure_per_set_point").is_null()) {
            spec.pressure_per_set_point = j.at("pressure_per_set_point").get<double>();
        }
        spec.validate();
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw StructureError(std::string("malformed synthesis specification: ") + e.what());
    } catch (const std::invalid_argument&) {
        throw StructureError("count keys must be subclass numbers");
    } catch (const std::out_of_range&) {
        throw StructureError("count key out of range");
    }
}

} // namespace scada_ids::cli
