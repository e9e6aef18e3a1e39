#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace scatter {

enum class ProcessMode { Temporal, Spatial };

std::string to_string(ProcessMode mode);
ProcessMode process_mode_from_string(const std::string& s); // throws BadMode

// One unit of a process: a stage in temporal mode, a part in spatial mode.
// Markers are the declared vocabulary used by the lexical coupling and
// similarity scores; they are part of the process definition, not inferred.
struct Segment {
    std::string id;          // lowercase slug, unique within a process
    std::string name;        // human-readable label
    std::string description;
    std::set<std::string> markers;
    std::optional<std::string> content;
};

struct ProcessSpec {
    std::string name;
    ProcessMode mode = ProcessMode::Temporal;
    std::vector<Segment> segments; // ordered, length >= 2

    const Segment* find_segment(const std::string& id) const;
    std::size_t segment_index(const std::string& id) const; // throws ValidationError if absent
};

// The user's raw innovation plus the baseline it deviates from.
struct InnovationInput {
    std::string text;
    std::string context;
    std::optional<std::string> declared_origin; // segment id
};

// Extracted core change, tied to its origin segment.
struct LocalInnovation {
    std::string summary;
    std::string origin;     // segment id
    double coupling_before = 0.0;
};

// Abstracted innovation after the generalization step.
struct GeneralizedInnovation {
    std::string text;
    double coupling_after = 0.0;
    int attempts = 0;
    bool reduced = false; // coupling_after < coupling_before, strictly
};

struct ScopeVerdict {
    enum class Kind { Local, Global };
    Kind kind = Kind::Local;
    std::string segment; // set iff kind == Local
    std::string rationale;

    static ScopeVerdict local(std::string segment_id, std::string rationale);
    static ScopeVerdict global(std::string rationale);
    bool is_global() const { return kind == Kind::Global; }
};

struct SegmentApplication {
    std::string segment;      // target segment id
    std::string adapted_text; // backend output, or skip rationale when not applied
    bool applicable = false;
    double similarity = 0.0;  // origin-vs-target similarity estimate
};

struct ScatterResult {
    InnovationInput input;
    LocalInnovation local;
    GeneralizedInnovation generalized;
    ScopeVerdict verdict;
    std::vector<SegmentApplication> applications;
    std::vector<std::string> transcript_keys; // request digests, in issue order
};

// Returns spec unchanged iff every invariant holds; throws DuplicateSegmentId,
// EmptyMarkers, TooFewSegments, BadMode or ValidationError otherwise.
const ProcessSpec& validate_process_spec(const ProcessSpec& spec);

// Canonical 5-stage smart-contract lifecycle used by the shipped experiment:
// deployment, instantiation, invocation, termination, validation.
ProcessSpec builtin_lifecycle_fixture();

// The running example: an embedded contract folding deployment and the
// first invocation into one step.
InnovationInput builtin_embedded_innovation();

} // namespace scatter
