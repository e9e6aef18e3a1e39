#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "scatter/core.hpp"
#include "scatter/harness.hpp"
#include "scatter/stats.hpp"

namespace scatter {

using json = nlohmann::json;

// Core types round-trip losslessly through these (see tests).
void to_json(json& j, const Segment& s);
void from_json(const json& j, Segment& s);
void to_json(json& j, const ProcessSpec& s);
void from_json(const json& j, ProcessSpec& s);
void to_json(json& j, const InnovationInput& v);
void from_json(const json& j, InnovationInput& v);
void to_json(json& j, const LocalInnovation& v);
void from_json(const json& j, LocalInnovation& v);
void to_json(json& j, const GeneralizedInnovation& v);
void from_json(const json& j, GeneralizedInnovation& v);
void to_json(json& j, const ScopeVerdict& v);
void from_json(const json& j, ScopeVerdict& v);
void to_json(json& j, const SegmentApplication& v);
void from_json(const json& j, SegmentApplication& v);
void to_json(json& j, const ScatterResult& v);
void from_json(const json& j, ScatterResult& v);
void to_json(json& j, const OptimizationItem& v);
void from_json(const json& j, OptimizationItem& v);
void to_json(json& j, const MetricPair& v);
void from_json(const json& j, MetricPair& v);
void to_json(json& j, const RoundRecord& v);
void from_json(const json& j, RoundRecord& v);
void to_json(json& j, const ExperimentTable& v);
void from_json(const json& j, ExperimentTable& v);

// File loaders for the CLI formats; throw ValidationError with the offending
// path on unreadable or malformed files.
ProcessSpec load_process_file(const std::filesystem::path& path);
InnovationInput load_innovation_file(const std::filesystem::path& path);

// JSONL round records, one document per line (fields: round, method,
// variant, items, metrics, transcript_keys).
std::string round_record_line(const RoundRecord& record);
std::vector<RoundRecord> load_rounds_jsonl(const std::filesystem::path& path);

std::string pretty(const json& j); // 2-space indent, trailing newline

} // namespace scatter
