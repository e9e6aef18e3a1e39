#include "scatter/core.hpp"

#include <unordered_set>

#include "scatter/errors.hpp"
#include "scatter/text.hpp"

namespace scatter {

std::string to_string(ProcessMode mode) {
    return mode == ProcessMode::Temporal ? "temporal" : "spatial";
}

ProcessMode process_mode_from_string(const std::string& s) {
    if (s == "temporal") return ProcessMode::Temporal;
    if (s == "spatial") return ProcessMode::Spatial;
    throw BadMode(s);
}

const Segment* ProcessSpec::find_segment(const std::string& id) const {
    for (const auto& seg : segments) {
        if (seg.id == id) return &seg;
    }
    return nullptr;
}

std::size_t ProcessSpec::segment_index(const std::string& id) const {
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (segments[i].id == id) return i;
    }
    throw ValidationError("unknown segment id: " + id);
}

ScopeVerdict ScopeVerdict::local(std::string segment_id, std::string rationale) {
    return {Kind::Local, std::move(segment_id), std::move(rationale)};
}

ScopeVerdict ScopeVerdict::global(std::string rationale) {
    return {Kind::Global, "", std::move(rationale)};
}

const ProcessSpec& validate_process_spec(const ProcessSpec& spec) {
    if (spec.segments.size() < 2) throw TooFewSegments(spec.segments.size());

    std::unordered_set<std::string> seen;
    for (const auto& seg : spec.segments) {
        if (!text::is_slug(seg.id))
            throw ValidationError("segment id is not a lowercase slug: '" + seg.id + "'");
        if (!seen.insert(seg.id).second) throw DuplicateSegmentId(seg.id);
        if (seg.markers.empty()) throw EmptyMarkers(seg.id);
        for (const auto& m : seg.markers) {
            if (m.empty() || text::contains_whitespace(m))
                throw ValidationError("bad marker '" + m + "' in segment " + seg.id);
        }
    }
    return spec;
}

ProcessSpec builtin_lifecycle_fixture() {
    ProcessSpec spec;
    spec.name = "smart-contract-lifecycle";
    spec.mode = ProcessMode::Temporal;
    spec.segments = {
        {"deployment", "deployment",
         "The contract bytecode is published to the chain and its address is established.",
         {"deployment", "deploy", "constructor"}, std::nullopt},
        {"instantiation", "instantiation",
         "Contract state is initialized and instance parameters are bound.",
         {"instantiation", "instantiate", "instance"}, std::nullopt},
        {"invocation", "invocation",
         "Callers execute contract functions; state transitions are recorded on chain.",
         {"invocation", "invoke", "execution", "call"}, std::nullopt},
        {"termination", "termination",
         "The contract is retired and remaining funds or state are settled.",
         {"termination", "terminate", "destruct"}, std::nullopt},
        {"validation", "validation",
         "Outcomes are checked against expectations and recorded for audit.",
         {"validation", "validate", "verify"}, std::nullopt},
    };
    return spec;
}

InnovationInput builtin_embedded_innovation() {
    InnovationInput input;
    input.text =
        "Use an embedded smart contract: combine the deployment and the first invocation into a "
        "single step so the contract is live and already executing after one transaction.";
    input.context =
        "A standard smart contract passes through deployment, instantiation, invocation, "
        "termination, and validation as separate on-chain interactions, each paying its own "
        "transaction overhead.";
    return input;
}

} // namespace scatter
