#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "scatter/core.hpp"
#include "scatter/gateway.hpp"
#include "scatter/pipeline.hpp"
#include "scatter/prompts.hpp"

namespace scatter {

// One distinct proposed improvement, tagged with the segments it touches.
struct OptimizationItem {
    std::string description;
    std::vector<std::string> stages; // segment ids, deduplicated, spec order
};

struct MetricPair {
    int items_count = 0;
    int stages_covered = 0;
    bool operator==(const MetricPair&) const = default;
};

enum class Method { A, B };
std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct RoundRecord {
    int round = 0; // 1-based
    Method method = Method::A;
    std::size_t variant = 0;
    std::vector<OptimizationItem> items;
    MetricPair metrics;
    std::vector<std::string> transcript_keys;
};

struct RoundPair {
    RoundRecord a;
    RoundRecord b;
};

struct MeanMetrics {
    double items = 0.0;
    double stages = 0.0;
};

struct ExperimentTable {
    std::vector<RoundPair> rows;
    MeanMetrics avg_a;
    MeanMetrics avg_b;

    static ExperimentTable from_rounds(std::vector<RoundRecord> records); // pairs + averages
};

// Pure parser for the structured output contract: the first fenced code
// block whose contents form a JSON array of {"description", "stages"}
// records. Unknown stage names are dropped; structural defects throw
// MalformedOutput immediately (no repair).
std::vector<OptimizationItem> parse_items_text(const std::string& raw, const ProcessSpec& spec);

// Parser with repair: on failure, reissues at most `max_repairs` repair-role
// completions carrying the unparseable reply, then throws MalformedOutput.
std::vector<OptimizationItem> parse_items(const std::string& raw, const ProcessSpec& spec,
                                          Gateway& gateway, const PipelineConfig& config,
                                          std::vector<std::string>* transcript = nullptr,
                                          int max_repairs = 2);

// Normalizes a free-form stage name to a segment id (exact id, exact name,
// then marker-token match, in spec order). Empty result = unknown.
std::string normalize_stage_name(const std::string& name, const ProcessSpec& spec);

MetricPair count_metrics(const std::vector<OptimizationItem>& items, const ProcessSpec& spec);

// Method A: one direct-role completion with variant (round-1) mod count.
RoundRecord run_round_a(int round, const InnovationInput& input, const ProcessSpec& spec,
                        Gateway& gateway, const PromptRegistry& registry, PipelineConfig config);

// Method B: full scatter run; the parsed records of each applicable
// application become items (one synthesized per application otherwise),
// preceded by the origin-stage innovation itself.
RoundRecord run_round_b(int round, const InnovationInput& input, const ProcessSpec& spec,
                        Gateway& gateway, const PromptRegistry& registry, PipelineConfig config);

// Runs A and B for rounds 1..n_rounds. on_record (when set) fires after each
// round record so callers can persist partial progress before a later round
// aborts the run.
ExperimentTable run_experiment(int n_rounds, const InnovationInput& input, const ProcessSpec& spec,
                               Gateway& gateway, const PromptRegistry& registry,
                               const PipelineConfig& config,
                               const std::function<void(const RoundRecord&)>& on_record = {});

} // namespace scatter
