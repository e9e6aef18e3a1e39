#include "scatter/json_io.hpp"

#include <fstream>
#include <sstream>

#include "scatter/errors.hpp"
#include "scatter/text.hpp"

namespace {
bool text_is_blank(const std::string& s) { return scatter::text::trim(s).empty(); }
} // namespace

namespace scatter {

void to_json(json& j, const Segment& s) {
    j = json{{"id", s.id},
             {"name", s.name},
             {"description", s.description},
             {"markers", s.markers}};
    if (s.content) j["content"] = *s.content;
}

void from_json(const json& j, Segment& s) {
    j.at("id").get_to(s.id);
    j.at("name").get_to(s.name);
    s.description = j.value("description", "");
    s.markers.clear();
    for (const auto& m : j.at("markers")) s.markers.insert(m.get<std::string>());
    if (j.contains("content") && !j["content"].is_null())
        s.content = j["content"].get<std::string>();
    else
        s.content.reset();
}

void to_json(json& j, const ProcessSpec& s) {
    j = json{{"name", s.name}, {"mode", to_string(s.mode)}, {"segments", s.segments}};
}

void from_json(const json& j, ProcessSpec& s) {
    j.at("name").get_to(s.name);
    s.mode = process_mode_from_string(j.at("mode").get<std::string>());
    s.segments = j.at("segments").get<std::vector<Segment>>();
}

void to_json(json& j, const InnovationInput& v) {
    j = json{{"text", v.text}, {"context", v.context}};
    if (v.declared_origin) j["origin"] = *v.declared_origin;
}

void from_json(const json& j, InnovationInput& v) {
    j.at("text").get_to(v.text);
    j.at("context").get_to(v.context);
    if (j.contains("origin") && !j["origin"].is_null())
        v.declared_origin = j["origin"].get<std::string>();
    else
        v.declared_origin.reset();
}

void to_json(json& j, const LocalInnovation& v) {
    j = json{{"summary", v.summary},
             {"origin", v.origin},
             {"coupling_before", v.coupling_before}};
}

void from_json(const json& j, LocalInnovation& v) {
    j.at("summary").get_to(v.summary);
    j.at("origin").get_to(v.origin);
    j.at("coupling_before").get_to(v.coupling_before);
}

void to_json(json& j, const GeneralizedInnovation& v) {
    j = json{{"text", v.text},
             {"coupling_after", v.coupling_after},
             {"attempts", v.attempts},
             {"reduced", v.reduced}};
}

void from_json(const json& j, GeneralizedInnovation& v) {
    j.at("text").get_to(v.text);
    j.at("coupling_after").get_to(v.coupling_after);
    j.at("attempts").get_to(v.attempts);
    j.at("reduced").get_to(v.reduced);
}

void to_json(json& j, const ScopeVerdict& v) {
    j = json{{"kind", v.is_global() ? "GLOBAL" : "LOCAL"}, {"rationale", v.rationale}};
    if (!v.is_global()) j["segment"] = v.segment;
}

void from_json(const json& j, ScopeVerdict& v) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "GLOBAL") {
        v = ScopeVerdict::global(j.value("rationale", ""));
    } else if (kind == "LOCAL") {
        v = ScopeVerdict::local(j.at("segment").get<std::string>(), j.value("rationale", ""));
    } else {
        throw ValidationError("unknown scope verdict kind: " + kind);
    }
}

void to_json(json& j, const SegmentApplication& v) {
    j = json{{"segment", v.segment},
             {"adapted_text", v.adapted_text},
             {"applicable", v.applicable},
             {"similarity", v.similarity}};
}

void from_json(const json& j, SegmentApplication& v) {
    j.at("segment").get_to(v.segment);
    j.at("adapted_text").get_to(v.adapted_text);
    j.at("applicable").get_to(v.applicable);
    j.at("similarity").get_to(v.similarity);
}

void to_json(json& j, const ScatterResult& v) {
    j = json{{"input", v.input},
             {"local", v.local},
             {"generalized", v.generalized},
             {"verdict", v.verdict},
             {"applications", v.applications},
             {"transcript_keys", v.transcript_keys}};
}

void from_json(const json& j, ScatterResult& v) {
    j.at("input").get_to(v.input);
    j.at("local").get_to(v.local);
    j.at("generalized").get_to(v.generalized);
    j.at("verdict").get_to(v.verdict);
    j.at("applications").get_to(v.applications);
    j.at("transcript_keys").get_to(v.transcript_keys);
}

void to_json(json& j, const OptimizationItem& v) {
    j = json{{"description", v.description}, {"stages", v.stages}};
}

void from_json(const json& j, OptimizationItem& v) {
    j.at("description").get_to(v.description);
    j.at("stages").get_to(v.stages);
}

void to_json(json& j, const MetricPair& v) {
    j = json{{"items_count", v.items_count}, {"stages_covered", v.stages_covered}};
}

void from_json(const json& j, MetricPair& v) {
    j.at("items_count").get_to(v.items_count);
    j.at("stages_covered").get_to(v.stages_covered);
}

void to_json(json& j, const RoundRecord& v) {
    j = json{{"round", v.round},
             {"method", to_string(v.method)},
             {"variant", v.variant},
             {"items", v.items},
             {"metrics", v.metrics},
             {"transcript_keys", v.transcript_keys}};
}

void from_json(const json& j, RoundRecord& v) {
    j.at("round").get_to(v.round);
    v.method = method_from_string(j.at("method").get<std::string>());
    j.at("variant").get_to(v.variant);
    j.at("items").get_to(v.items);
    j.at("metrics").get_to(v.metrics);
    j.at("transcript_keys").get_to(v.transcript_keys);
}

void to_json(json& j, const ExperimentTable& v) {
    json rows = json::array();
    for (const auto& row : v.rows) rows.push_back(json{{"a", row.a}, {"b", row.b}});
    j = json{{"rows", rows},
             {"avg_a", {{"items", v.avg_a.items}, {"stages", v.avg_a.stages}}},
             {"avg_b", {{"items", v.avg_b.items}, {"stages", v.avg_b.stages}}}};
}

void from_json(const json& j, ExperimentTable& v) {
    std::vector<RoundRecord> records;
    for (const auto& row : j.at("rows")) {
        records.push_back(row.at("a").get<RoundRecord>());
        records.push_back(row.at("b").get<RoundRecord>());
    }
    v = ExperimentTable::from_rounds(std::move(records));
}

static json parse_file(const std::filesystem::path& path, const std::string& what) {
    std::ifstream in(path);
    if (!in) throw ValidationError(what + " not found: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return json::parse(buf.str());
    } catch (const json::exception& e) {
        throw ValidationError(what + " is not valid JSON (" + path.string() + "): " + e.what());
    }
}

ProcessSpec load_process_file(const std::filesystem::path& path) {
    json j = parse_file(path, "process spec");
    ProcessSpec spec;
    try {
        from_json(j, spec);
    } catch (const json::exception& e) {
        throw ValidationError("process spec has wrong shape (" + path.string() + "): " + e.what());
    }
    validate_process_spec(spec);
    return spec;
}

InnovationInput load_innovation_file(const std::filesystem::path& path) {
    json j = parse_file(path, "innovation file");
    InnovationInput input;
    try {
        from_json(j, input);
    } catch (const json::exception& e) {
        throw ValidationError("innovation file has wrong shape (" + path.string() +
                              "): " + e.what());
    }
    if (input.text.empty() || input.context.empty())
        throw ValidationError("innovation text and context must be non-empty: " + path.string());
    return input;
}

std::string round_record_line(const RoundRecord& record) {
    json j = record;
    return j.dump() + "\n";
}

std::vector<RoundRecord> load_rounds_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("rounds file not found: " + path.string());
    std::vector<RoundRecord> records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text_is_blank(line)) continue;
        try {
            records.push_back(json::parse(line).get<RoundRecord>());
        } catch (const json::exception& e) {
            throw ValidationError("bad round record at " + path.string() + ":" +
                                  std::to_string(lineno) + ": " + e.what());
        }
    }
    return records;
}

std::string pretty(const json& j) { return j.dump(2) + "\n"; }

} // namespace scatter
