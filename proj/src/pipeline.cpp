#include "scatter/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <future>

#include "scatter/errors.hpp"
#include "scatter/text.hpp"

namespace scatter {

CompletionRequest PipelineConfig::request(PromptRole role, std::string prompt) const {
    CompletionRequest req;
    req.role = to_string(role);
    req.prompt = std::move(prompt);
    req.model = model;
    req.temperature = temperature;
    req.max_tokens = max_tokens;
    req.seed = seed;
    return req;
}

double coupling_strength(const std::string& innovation_text, const Segment& segment) {
    if (segment.markers.empty()) throw EmptyMarkers(segment.id);
    auto words = text::token_set(innovation_text);
    std::size_t hits = 0;
    for (const auto& m : segment.markers) {
        if (words.count(m)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(segment.markers.size());
}

static std::set<std::string> feature_set(const Segment& s) {
    auto f = text::token_set(s.description);
    f.insert(s.markers.begin(), s.markers.end());
    return f;
}

double segment_similarity(const Segment& a, const Segment& b) {
    auto fa = feature_set(a);
    auto fb = feature_set(b);
    std::size_t inter = 0;
    for (const auto& x : fa) {
        if (fb.count(x)) ++inter;
    }
    std::size_t uni = fa.size() + fb.size() - inter;
    if (uni == 0) return 0.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

bool mentions_segment(const std::string& txt, const Segment& segment) {
    auto toks = text::token_set(txt);
    for (const auto& m : segment.markers) {
        if (toks.count(m)) return true;
    }
    auto covered = [&toks](const std::vector<std::string>& parts) {
        if (parts.empty()) return false;
        return std::all_of(parts.begin(), parts.end(),
                           [&toks](const std::string& p) { return toks.count(p) > 0; });
    };
    return covered(text::tokenize(segment.name)) || covered(text::tokenize(segment.id));
}

namespace {

Bindings bindings_for(const ProcessSpec& spec) {
    std::vector<std::string> names;
    names.reserve(spec.segments.size());
    for (const auto& seg : spec.segments) names.push_back(seg.name);
    return {
        {"process_name", spec.name},
        {"stage_list", text::join(names, ", ")},
        {"innovation", ""},
        {"context", ""},
        {"segment_name", ""},
        {"segment_description", ""},
    };
}

// Case-insensitive "KEY:" line lookup; returns the trimmed remainder.
std::optional<std::string> labeled_line(const std::string& reply, const std::string& key) {
    std::size_t start = 0;
    std::string want = text::to_lower(key) + ":";
    while (start < reply.size()) {
        std::size_t end = reply.find('\n', start);
        if (end == std::string::npos) end = reply.size();
        std::string line = text::trim(reply.substr(start, end - start));
        if (text::to_lower(line).rfind(want, 0) == 0)
            return text::trim(line.substr(want.size()));
        start = end + 1;
    }
    return std::nullopt;
}

const Segment* resolve_named_segment(const std::string& field, const ProcessSpec& spec) {
    std::string flat = text::to_lower(text::trim(field));
    for (const auto& seg : spec.segments) {
        if (flat == seg.id || flat == text::to_lower(seg.name)) return &seg;
    }
    auto toks = text::tokenize(field);
    for (const auto& seg : spec.segments) {
        for (const auto& tok : toks) {
            if (tok == seg.id) return &seg;
        }
    }
    for (const auto& seg : spec.segments) {
        for (const auto& tok : toks) {
            if (seg.markers.count(tok)) return &seg;
        }
    }
    return nullptr;
}

void record_key(std::vector<std::string>* transcript, const CompletionRequest& req) {
    if (transcript) transcript->push_back(digest(req));
}

// Round r uses variant r mod variant_count(role), per role.
std::size_t pick_variant(const PromptRegistry& registry, PromptRole role, std::size_t base) {
    std::size_t count = registry.variant_count(role);
    if (count == 0) throw UnknownTemplate(to_string(role), base);
    return base % count;
}

std::string render_for(const PromptRegistry& registry, PromptRole role,
                       const PipelineConfig& config, const Bindings& bindings) {
    return registry.render(role, pick_variant(registry, role, config.prompt_variant), bindings);
}

} // namespace

LocalInnovation extract_local_innovation(const InnovationInput& input, const ProcessSpec& spec,
                                         Gateway& gateway, const PromptRegistry& registry,
                                         const PipelineConfig& config,
                                         std::vector<std::string>* transcript) {
    auto bindings = bindings_for(spec);
    bindings["innovation"] = input.text;
    bindings["context"] = input.context;
    auto req = config.request(PromptRole::Diff,
                              render_for(registry, PromptRole::Diff, config, bindings));
    record_key(transcript, req);
    auto reply = gateway.complete(req).text;

    LocalInnovation local;
    local.summary = labeled_line(reply, "summary").value_or(text::trim(reply));

    const Segment* origin = nullptr;
    if (input.declared_origin) {
        origin = spec.find_segment(*input.declared_origin);
        if (!origin)
            throw ValidationError("declared origin names no segment: " + *input.declared_origin);
    }
    if (!origin) {
        if (auto named = labeled_line(reply, "origin"))
            origin = resolve_named_segment(*named, spec);
    }
    if (!origin) {
        double best = 0.0;
        for (const auto& seg : spec.segments) {
            double c = coupling_strength(local.summary, seg);
            if (c > best) {
                best = c;
                origin = &seg;
            }
        }
        if (!origin) throw OriginUnresolvable();
    }

    local.origin = origin->id;
    local.coupling_before = coupling_strength(local.summary, *origin);
    return local;
}

GeneralizedInnovation generalize(const LocalInnovation& local, const ProcessSpec& spec,
                                 Gateway& gateway, const PromptRegistry& registry,
                                 const PipelineConfig& config,
                                 std::vector<std::string>* transcript) {
    if (config.max_attempts < 1) throw ValidationError("max_attempts must be >= 1");
    const Segment& origin = *spec.find_segment(local.origin);

    auto bindings = bindings_for(spec);
    bindings["innovation"] = local.summary;
    bindings["segment_name"] = origin.name;
    auto req = config.request(PromptRole::Gen,
                              render_for(registry, PromptRole::Gen, config, bindings));

    GeneralizedInnovation best;
    best.coupling_after = 1.0 + 1e-9; // any real candidate wins the first comparison
    for (int attempt = 1; attempt <= config.max_attempts; ++attempt) {
        record_key(transcript, req);
        std::string candidate = text::trim(gateway.complete(req).text);
        double c = coupling_strength(candidate, origin);
        best.attempts = attempt;
        if (c < best.coupling_after) { // strict: ties keep the earliest attempt
            best.coupling_after = c;
            best.text = candidate;
        }
        if (best.coupling_after < local.coupling_before) break;
    }
    best.reduced = best.coupling_after < local.coupling_before;
    return best;
}

ScopeVerdict determine_scope(const GeneralizedInnovation& gen, const LocalInnovation& local,
                             const ProcessSpec& spec, Gateway& gateway,
                             const PromptRegistry& registry, const PipelineConfig& config,
                             std::vector<std::string>* transcript) {
    auto bindings = bindings_for(spec);
    bindings["innovation"] = gen.text;
    auto req = config.request(PromptRole::Scope,
                              render_for(registry, PromptRole::Scope, config, bindings));
    record_key(transcript, req);
    auto reply = gateway.complete(req).text;

    auto toks = text::tokenize(reply);
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (toks[i] == "global")
            return ScopeVerdict::global("backend verdict: GLOBAL");
        if (toks[i] == "local") {
            // First segment named after the verdict token; origin otherwise.
            for (std::size_t j = i + 1; j < toks.size(); ++j) {
                for (const auto& seg : spec.segments) {
                    if (toks[j] == seg.id || seg.markers.count(toks[j]))
                        return ScopeVerdict::local(seg.id, "backend verdict: LOCAL(" + seg.id + ")");
                }
            }
            return ScopeVerdict::local(local.origin,
                                       "backend verdict: LOCAL (no segment named; using origin)");
        }
    }

    std::size_t mentioned = 0;
    for (const auto& seg : spec.segments) {
        if (mentions_segment(gen.text, seg)) ++mentioned;
    }
    if (mentioned >= 2) {
        return ScopeVerdict::global("lexical fallback: generalized text mentions " +
                                    std::to_string(mentioned) + " segments");
    }
    return ScopeVerdict::local(local.origin, "lexical fallback: generalized text mentions " +
                                                 std::to_string(mentioned) +
                                                 " segments; keeping origin");
}

SegmentApplication apply_to_segment(const GeneralizedInnovation& gen, const Segment& target,
                                    const LocalInnovation& local, const ProcessSpec& spec,
                                    Gateway& gateway, const PromptRegistry& registry,
                                    const PipelineConfig& config,
                                    std::vector<std::string>* transcript) {
    const Segment& origin = *spec.find_segment(local.origin);

    auto bindings = bindings_for(spec);
    bindings["innovation"] = gen.text;
    bindings["segment_name"] = target.name;
    bindings["segment_description"] = target.description;
    auto req = config.request(PromptRole::Apply,
                              render_for(registry, PromptRole::Apply, config, bindings));
    record_key(transcript, req);
    auto reply = gateway.complete(req).text;

    SegmentApplication app;
    app.segment = target.id;
    app.adapted_text = reply; // verbatim, for audit
    app.applicable = text::to_lower(reply).find("not-applicable") == std::string::npos;
    app.similarity = segment_similarity(origin, target);
    return app;
}

ScatterResult run_scatter(const InnovationInput& input, const ProcessSpec& spec, Gateway& gateway,
                          const PromptRegistry& registry, const PipelineConfig& config) {
    validate_process_spec(spec);
    if (input.text.empty() || input.context.empty())
        throw ValidationError("innovation text and context must be non-empty");

    ScatterResult result;
    result.input = input;
    result.local = extract_local_innovation(input, spec, gateway, registry, config,
                                            &result.transcript_keys);
    result.generalized =
        generalize(result.local, spec, gateway, registry, config, &result.transcript_keys);
    result.verdict = determine_scope(result.generalized, result.local, spec, gateway, registry,
                                     config, &result.transcript_keys);
    if (result.verdict.is_global()) return result; // already generalized; nothing to expand

    const std::string& pivot = result.verdict.segment;
    const Segment& origin = *spec.find_segment(result.local.origin);

    struct Task {
        const Segment* target;
        bool gated_out;
        double similarity;
    };
    std::vector<Task> tasks;
    for (const auto& seg : spec.segments) {
        if (seg.id == pivot) continue;
        double sim = segment_similarity(origin, seg);
        bool gated = spec.mode == ProcessMode::Spatial && sim < config.tau;
        tasks.push_back({&seg, gated, sim});
    }

    result.applications.resize(tasks.size());
    std::vector<std::vector<std::string>> keys(tasks.size());

    auto run_task = [&](std::size_t i) {
        const Task& t = tasks[i];
        if (t.gated_out) {
            SegmentApplication app;
            app.segment = t.target->id;
            app.applicable = false;
            app.similarity = t.similarity;
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.4f below threshold %.4f", t.similarity, config.tau);
            app.adapted_text = std::string("skipped: similarity ") + buf;
            result.applications[i] = std::move(app);
            return;
        }
        result.applications[i] = apply_to_segment(result.generalized, *t.target, result.local,
                                                  spec, gateway, registry, config, &keys[i]);
    };

    if (config.parallelism > 1) {
        // Chunked dispatch; assembly below restores segment order regardless.
        std::size_t i = 0;
        while (i < tasks.size()) {
            std::vector<std::future<void>> batch;
            for (int k = 0; k < config.parallelism && i < tasks.size(); ++k, ++i)
                batch.push_back(std::async(std::launch::async, run_task, i));
            for (auto& f : batch) f.get();
        }
    } else {
        for (std::size_t i = 0; i < tasks.size(); ++i) run_task(i);
    }

    for (auto& k : keys)
        result.transcript_keys.insert(result.transcript_keys.end(), k.begin(), k.end());
    return result;
}

} // namespace scatter
