#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "scatter/core.hpp"
#include "scatter/errors.hpp"
#include "scatter/json_io.hpp"

using namespace scatter;

namespace {

const std::filesystem::path kDataDir = SCATTER_DATA_DIR;

Segment seg(std::string id, std::set<std::string> markers = {"m"}) {
    Segment s;
    s.id = id;
    s.name = id;
    s.markers = std::move(markers);
    return s;
}

ProcessSpec two_stage() {
    ProcessSpec spec;
    spec.name = "toy";
    spec.mode = ProcessMode::Temporal;
    spec.segments = {seg("alpha"), seg("beta")};
    return spec;
}

} // namespace

TEST_SUITE("core") {

TEST_CASE("lifecycle fixture has the five stages in order and validates") {
    ProcessSpec spec = builtin_lifecycle_fixture();
    REQUIRE(spec.segments.size() == 5);
    const char* expected[] = {"deployment", "instantiation", "invocation", "termination",
                              "validation"};
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(spec.segments[i].id == expected[i]);
        CHECK(spec.segments[i].markers.count(spec.segments[i].id) == 1);
    }
    CHECK(spec.mode == ProcessMode::Temporal);
    CHECK_NOTHROW(validate_process_spec(spec));
}

TEST_CASE("duplicate segment ids are rejected") {
    ProcessSpec spec = two_stage();
    spec.segments.push_back(seg("alpha"));
    CHECK_THROWS_AS(validate_process_spec(spec), DuplicateSegmentId);
}

TEST_CASE("a single-segment process is rejected") {
    ProcessSpec spec = two_stage();
    spec.segments.pop_back();
    CHECK_THROWS_AS(validate_process_spec(spec), TooFewSegments);
}

TEST_CASE("empty marker sets are rejected") {
    ProcessSpec spec = two_stage();
    spec.segments[1].markers.clear();
    CHECK_THROWS_AS(validate_process_spec(spec), EmptyMarkers);
}

TEST_CASE("whitespace-bearing markers are rejected") {
    ProcessSpec spec = two_stage();
    spec.segments[0].markers.insert("two words");
    CHECK_THROWS_AS(validate_process_spec(spec), ValidationError);
}

TEST_CASE("non-slug segment ids are rejected") {
    for (const char* bad : {"", "Upper", "has space", "-leading"}) {
        ProcessSpec spec = two_stage();
        spec.segments[0].id = bad;
        CAPTURE(bad);
        CHECK_THROWS_AS(validate_process_spec(spec), ValidationError);
    }
}

TEST_CASE("unknown mode strings are rejected") {
    CHECK_THROWS_AS(process_mode_from_string("sideways"), BadMode);
    CHECK(process_mode_from_string("temporal") == ProcessMode::Temporal);
    CHECK(process_mode_from_string("spatial") == ProcessMode::Spatial);
}

TEST_CASE("core types round-trip losslessly through JSON") {
    ProcessSpec spec = builtin_lifecycle_fixture();
    spec.segments[2].content = "stage body";
    json j1 = spec;
    json j2 = j1.get<ProcessSpec>();
    CHECK(j1 == j2);

    InnovationInput input = builtin_embedded_innovation();
    input.declared_origin = "termination";
    CHECK(json(input) == json(json(input).get<InnovationInput>()));

    ScatterResult result;
    result.input = input;
    result.local = {"summary text", "deployment", 1.0 / 3.0};
    result.generalized = {"general text", 0.0, 2, true};
    result.verdict = ScopeVerdict::local("deployment", "backend verdict");
    result.applications = {{"termination", "adapted", true, 0.25},
                           {"validation", "skipped: gate", false, 0.125}};
    result.transcript_keys = {"aa", "bb"};
    CHECK(json(result) == json(json(result).get<ScatterResult>()));

    ScopeVerdict global = ScopeVerdict::global("mentions everything");
    CHECK(json(global) == json(json(global).get<ScopeVerdict>()));
}

TEST_CASE("shipped fixture files match the builtins") {
    ProcessSpec from_file = load_process_file(kDataDir / "fixtures" / "lifecycle.json");
    CHECK(json(from_file) == json(builtin_lifecycle_fixture()));
    InnovationInput inn = load_innovation_file(kDataDir / "fixtures" / "innovation_embedded.json");
    CHECK(json(inn) == json(builtin_embedded_innovation()));
}

TEST_CASE("desk fixture file loads and is spatial") {
    ProcessSpec desk = load_process_file(kDataDir / "fixtures" / "desk.json");
    CHECK(desk.mode == ProcessMode::Spatial);
    CHECK(desk.segments.size() == 3);
}

TEST_CASE("missing process file reports a validation error") {
    CHECK_THROWS_WITH_AS(load_process_file("nonexistent.json"),
                         doctest::Contains("process spec not found"), ValidationError);
}

TEST_CASE("innovation file requires non-empty text and context") {
    auto dir = std::filesystem::temp_directory_path() / "scatter_core_test";
    std::filesystem::create_directories(dir);
    auto path = dir / "empty_innovation.json";
    {
        std::ofstream out(path);
        out << R"({"text": "", "context": "c"})";
    }
    CHECK_THROWS_AS(load_innovation_file(path), ValidationError);
}

TEST_CASE("segment lookup helpers") {
    ProcessSpec spec = builtin_lifecycle_fixture();
    CHECK(spec.find_segment("invocation") != nullptr);
    CHECK(spec.find_segment("nope") == nullptr);
    CHECK(spec.segment_index("validation") == 4);
    CHECK_THROWS_AS(spec.segment_index("nope"), ValidationError);
}

} // TEST_SUITE
