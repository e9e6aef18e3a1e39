#pragma once

#include <cstddef>
#include <string>

#include "scatter/core.hpp"
#include "scatter/gateway.hpp"
#include "scatter/prompts.hpp"

namespace scatter {

struct PipelineConfig {
    std::size_t prompt_variant = 0; // variant index used for every role
    int max_attempts = 3;           // generalization retry bound K
    double tau = 0.5;               // spatial-mode similarity gate
    int parallelism = 1;            // concurrent step-4 applications
    std::string model = "gpt-4o";
    double temperature = 0.7;
    int max_tokens = 1024;
    std::optional<std::int64_t> seed;

    CompletionRequest request(PromptRole role, std::string prompt) const;
};

// Lexical surrogate for the innovation-to-segment coupling score:
// |markers ∩ tokens(text)| / |markers|, in [0, 1]. Throws EmptyMarkers.
double coupling_strength(const std::string& innovation_text, const Segment& segment);

// Jaccard index over F(s) = markers ∪ tokens(description). Symmetric,
// 1 on identical segments, 0 on disjoint feature sets.
double segment_similarity(const Segment& a, const Segment& b);

// Step 1: one diff-role completion; resolves the origin segment and scores
// the coupling of the extracted summary against it.
LocalInnovation extract_local_innovation(const InnovationInput& input, const ProcessSpec& spec,
                                         Gateway& gateway, const PromptRegistry& registry,
                                         const PipelineConfig& config,
                                         std::vector<std::string>* transcript = nullptr);

// Step 2: up to K gen-role completions; keeps the candidate with minimal
// recomputed coupling (earliest attempt wins ties) and stops early once the
// coupling strictly drops below the local score.
GeneralizedInnovation generalize(const LocalInnovation& local, const ProcessSpec& spec,
                                 Gateway& gateway, const PromptRegistry& registry,
                                 const PipelineConfig& config,
                                 std::vector<std::string>* transcript = nullptr);

// Step 3: one scope-role completion, parsed case-insensitively; falls back
// to a lexical heuristic (GLOBAL iff the generalized text mentions >= 2
// distinct segments) when the reply carries no verdict token.
ScopeVerdict determine_scope(const GeneralizedInnovation& gen, const LocalInnovation& local,
                             const ProcessSpec& spec, Gateway& gateway,
                             const PromptRegistry& registry, const PipelineConfig& config,
                             std::vector<std::string>* transcript = nullptr);

// Step 4 body: one apply-role completion for the target segment. The reply
// is kept verbatim; a NOT-APPLICABLE token marks the target as skipped.
SegmentApplication apply_to_segment(const GeneralizedInnovation& gen, const Segment& target,
                                    const LocalInnovation& local, const ProcessSpec& spec,
                                    Gateway& gateway, const PromptRegistry& registry,
                                    const PipelineConfig& config,
                                    std::vector<std::string>* transcript = nullptr);

// Full four-step expansion. GLOBAL verdicts return early with no
// applications; LOCAL verdicts apply to every other segment (temporal) or to
// the segments passing the tau similarity gate (spatial), recording gated-out
// segments as non-applicable entries. All-or-error: no partial results.
ScatterResult run_scatter(const InnovationInput& input, const ProcessSpec& spec, Gateway& gateway,
                          const PromptRegistry& registry, const PipelineConfig& config);

// True when the segment's id, name, or markers occur in the text's tokens.
bool mentions_segment(const std::string& txt, const Segment& segment);

} // namespace scatter
