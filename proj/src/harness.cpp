#include "scatter/harness.hpp"

#include <algorithm>
#include <iostream>

#include <json.hpp>

#include "scatter/errors.hpp"
#include "scatter/text.hpp"

namespace scatter {

using nlohmann::json;

std::string to_string(Method m) { return m == Method::A ? "A" : "B"; }

Method method_from_string(const std::string& s) {
    if (s == "A") return Method::A;
    if (s == "B") return Method::B;
    throw ValidationError("unknown method: " + s);
}

std::string normalize_stage_name(const std::string& name, const ProcessSpec& spec) {
    std::string flat = text::to_lower(text::trim(name));
    for (const auto& seg : spec.segments) {
        if (flat == seg.id || flat == text::to_lower(seg.name)) return seg.id;
    }
    auto toks = text::tokenize(name);
    for (const auto& seg : spec.segments) {
        for (const auto& tok : toks) {
            if (tok == seg.id) return seg.id;
        }
    }
    for (const auto& seg : spec.segments) {
        for (const auto& tok : toks) {
            if (seg.markers.count(tok)) return seg.id;
        }
    }
    return "";
}

namespace {

// Deduplicates and orders stage ids by segment position.
std::vector<std::string> canonical_stages(const std::vector<std::string>& ids,
                                          const ProcessSpec& spec) {
    std::vector<std::string> out;
    for (const auto& seg : spec.segments) {
        if (std::find(ids.begin(), ids.end(), seg.id) != ids.end()) out.push_back(seg.id);
    }
    return out;
}

struct FencedBlock {
    std::string content;
};

std::vector<FencedBlock> fenced_blocks(const std::string& raw) {
    std::vector<FencedBlock> blocks;
    std::size_t pos = 0;
    while ((pos = raw.find("```", pos)) != std::string::npos) {
        std::size_t line_end = raw.find('\n', pos + 3);
        if (line_end == std::string::npos) break; // fence with no content
        std::size_t close = raw.find("```", line_end + 1);
        if (close == std::string::npos) break; // unterminated
        blocks.push_back({raw.substr(line_end + 1, close - line_end - 1)});
        pos = raw.find('\n', close + 3);
        if (pos == std::string::npos) break;
    }
    return blocks;
}

} // namespace

std::vector<OptimizationItem> parse_items_text(const std::string& raw, const ProcessSpec& spec) {
    auto blocks = fenced_blocks(raw);
    if (blocks.empty()) throw MalformedOutput("no complete fenced block in reply");

    json arr;
    bool found = false;
    for (const auto& block : blocks) {
        json candidate = json::parse(block.content, nullptr, /*allow_exceptions=*/false);
        if (candidate.is_array()) {
            arr = std::move(candidate);
            found = true;
            break;
        }
    }
    if (!found) throw MalformedOutput("no fenced block contains a JSON array");

    std::vector<OptimizationItem> items;
    for (const auto& rec : arr) {
        if (!rec.is_object()) throw MalformedOutput("array element is not an object");
        if (!rec.contains("description") || !rec["description"].is_string())
            throw MalformedOutput("record lacks a string \"description\"");
        OptimizationItem item;
        item.description = text::trim(rec["description"].get<std::string>());
        if (item.description.empty()) throw MalformedOutput("record has empty description");
        if (rec.contains("stages")) {
            if (!rec["stages"].is_array())
                throw MalformedOutput("record \"stages\" is not an array");
            std::vector<std::string> ids;
            for (const auto& st : rec["stages"]) {
                if (!st.is_string()) throw MalformedOutput("stage name is not a string");
                std::string id = normalize_stage_name(st.get<std::string>(), spec);
                if (id.empty()) {
                    std::cerr << "warning: dropping unknown stage name '"
                              << st.get<std::string>() << "'\n";
                    continue;
                }
                ids.push_back(id);
            }
            item.stages = canonical_stages(ids, spec);
        }
        items.push_back(std::move(item));
    }
    return items;
}

std::vector<OptimizationItem> parse_items(const std::string& raw, const ProcessSpec& spec,
                                          Gateway& gateway, const PipelineConfig& config,
                                          std::vector<std::string>* transcript, int max_repairs) {
    std::string reply = raw;
    std::string last_error;
    for (int attempt = 0;; ++attempt) {
        try {
            return parse_items_text(reply, spec);
        } catch (const MalformedOutput& e) {
            last_error = e.what();
            if (attempt >= max_repairs) break;
        }
        CompletionRequest req;
        req.role = "repair";
        req.prompt =
            "Your previous reply could not be parsed. Rewrite it as one fenced code block "
            "containing a JSON array; each element must be an object with a \"description\" "
            "string and a \"stages\" array of stage names. Reply with the block only.\n"
            "\n"
            "Previous reply:\n" +
            reply;
        req.model = config.model;
        req.temperature = config.temperature;
        req.max_tokens = config.max_tokens;
        req.seed = config.seed;
        if (transcript) transcript->push_back(digest(req));
        reply = gateway.complete(req).text;
    }
    throw MalformedOutput("repair attempts exhausted; last error: " + last_error);
}

MetricPair count_metrics(const std::vector<OptimizationItem>& items, const ProcessSpec& spec) {
    std::set<std::string> covered;
    for (const auto& item : items) {
        for (const auto& id : item.stages) {
            if (spec.find_segment(id)) covered.insert(id);
        }
    }
    MetricPair m;
    m.items_count = static_cast<int>(items.size());
    m.stages_covered = static_cast<int>(covered.size());
    return m;
}

namespace {

Bindings direct_bindings(const InnovationInput& input, const ProcessSpec& spec) {
    std::vector<std::string> names;
    for (const auto& seg : spec.segments) names.push_back(seg.name);
    return {
        {"process_name", spec.name},
        {"stage_list", text::join(names, ", ")},
        {"innovation", input.text},
        {"context", input.context},
        {"segment_name", ""},
        {"segment_description", ""},
    };
}

} // namespace

RoundRecord run_round_a(int round, const InnovationInput& input, const ProcessSpec& spec,
                        Gateway& gateway, const PromptRegistry& registry, PipelineConfig config) {
    validate_process_spec(spec);
    config.prompt_variant = static_cast<std::size_t>(round - 1);
    std::size_t count = registry.variant_count(PromptRole::Direct);
    if (count == 0) throw UnknownTemplate("direct", 0);
    std::size_t variant = config.prompt_variant % count;

    RoundRecord rec;
    rec.round = round;
    rec.method = Method::A;
    rec.variant = variant;

    auto req = config.request(PromptRole::Direct,
                              registry.render(PromptRole::Direct, variant,
                                              direct_bindings(input, spec)));
    rec.transcript_keys.push_back(digest(req));
    auto reply = gateway.complete(req).text;
    rec.items = parse_items(reply, spec, gateway, config, &rec.transcript_keys);
    rec.metrics = count_metrics(rec.items, spec);
    return rec;
}

RoundRecord run_round_b(int round, const InnovationInput& input, const ProcessSpec& spec,
                        Gateway& gateway, const PromptRegistry& registry, PipelineConfig config) {
    config.prompt_variant = static_cast<std::size_t>(round - 1);
    std::size_t count = registry.variant_count(PromptRole::Apply);
    if (count == 0) throw UnknownTemplate("apply", 0);

    RoundRecord rec;
    rec.round = round;
    rec.method = Method::B;
    rec.variant = config.prompt_variant % count;

    ScatterResult result = run_scatter(input, spec, gateway, registry, config);
    rec.transcript_keys = result.transcript_keys;

    if (result.verdict.is_global()) {
        // Early return: the generalized innovation is the single item, tagged
        // with every segment its text mentions.
        OptimizationItem item;
        item.description = result.generalized.text;
        for (const auto& seg : spec.segments) {
            if (mentions_segment(result.generalized.text, seg)) item.stages.push_back(seg.id);
        }
        rec.items.push_back(std::move(item));
    } else {
        OptimizationItem origin_item;
        origin_item.description = result.local.summary;
        origin_item.stages = {result.local.origin};
        rec.items.push_back(std::move(origin_item));

        for (const auto& app : result.applications) {
            if (!app.applicable) continue;
            std::vector<OptimizationItem> parsed;
            try {
                parsed = parse_items_text(app.adapted_text, spec);
            } catch (const MalformedOutput&) {
                // Free-form reply: keep it as a single item for the target.
            }
            if (parsed.empty()) {
                OptimizationItem item;
                item.description = text::first_line(app.adapted_text);
                if (item.description.empty()) item.description = text::trim(app.adapted_text);
                item.stages = {app.segment};
                rec.items.push_back(std::move(item));
                continue;
            }
            for (auto& item : parsed) {
                if (item.stages.empty()) item.stages = {app.segment};
                rec.items.push_back(std::move(item));
            }
        }
    }

    rec.metrics = count_metrics(rec.items, spec);
    return rec;
}

ExperimentTable ExperimentTable::from_rounds(std::vector<RoundRecord> records) {
    std::map<int, RoundPair> by_round;
    for (auto& rec : records) {
        auto& pair = by_round[rec.round];
        (rec.method == Method::A ? pair.a : pair.b) = std::move(rec);
    }
    ExperimentTable table;
    for (auto& [round, pair] : by_round) {
        if (pair.a.round != round || pair.b.round != round)
            throw ValidationError("round " + std::to_string(round) + " lacks an A/B pair");
        table.rows.push_back(std::move(pair));
    }
    if (!table.rows.empty()) {
        double n = static_cast<double>(table.rows.size());
        double ia = 0, sa = 0, ib = 0, sb = 0;
        for (const auto& row : table.rows) {
            ia += row.a.metrics.items_count;
            sa += row.a.metrics.stages_covered;
            ib += row.b.metrics.items_count;
            sb += row.b.metrics.stages_covered;
        }
        table.avg_a = {ia / n, sa / n};
        table.avg_b = {ib / n, sb / n};
    }
    return table;
}

ExperimentTable run_experiment(int n_rounds, const InnovationInput& input,
                               const ProcessSpec& spec, Gateway& gateway,
                               const PromptRegistry& registry, const PipelineConfig& config,
                               const std::function<void(const RoundRecord&)>& on_record) {
    if (n_rounds < 1) throw ValidationError("rounds must be >= 1");
    validate_process_spec(spec);

    std::vector<RoundRecord> records;
    records.reserve(static_cast<std::size_t>(n_rounds) * 2);
    for (int round = 1; round <= n_rounds; ++round) {
        RoundRecord a = run_round_a(round, input, spec, gateway, registry, config);
        if (on_record) on_record(a);
        records.push_back(std::move(a));
        RoundRecord b = run_round_b(round, input, spec, gateway, registry, config);
        if (on_record) on_record(b);
        records.push_back(std::move(b));
    }
    return ExperimentTable::from_rounds(std::move(records));
}

} // namespace scatter
