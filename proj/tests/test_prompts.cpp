#include <doctest.h>

#include <filesystem>
#include <set>

#include "scatter/errors.hpp"
#include "scatter/prompts.hpp"

using namespace scatter;

namespace {

Bindings demo_bindings() {
    return {
        {"innovation", "merge the first two steps"},
        {"context", "every step runs separately"},
        {"segment_name", "termination"},
        {"segment_description", "the contract is retired"},
        {"process_name", "smart-contract-lifecycle"},
        {"stage_list", "deployment, instantiation, invocation, termination, validation"},
    };
}

} // namespace

TEST_SUITE("prompts") {

TEST_CASE("defaults ship 20 variants per role") {
    auto reg = PromptRegistry::with_defaults();
    for (PromptRole role : kAllRoles) {
        CAPTURE(to_string(role));
        CHECK(reg.variant_count(role) == 20);
    }
}

TEST_CASE("render substitutes every placeholder") {
    auto reg = PromptRegistry::with_defaults();
    auto out = reg.render(PromptRole::Apply, 0, demo_bindings());
    CHECK(out.find("termination") != std::string::npos);
    CHECK(out.find("merge the first two steps") != std::string::npos);
    CHECK(out.find("{{") == std::string::npos);
    CHECK(out.find("}}") == std::string::npos);
}

TEST_CASE("unknown variants are rejected") {
    auto reg = PromptRegistry::with_defaults();
    CHECK_THROWS_AS(reg.render(PromptRole::Diff, 99, demo_bindings()), UnknownTemplate);
}

TEST_CASE("missing bindings name the placeholder") {
    auto reg = PromptRegistry::with_defaults();
    auto bindings = demo_bindings();
    bindings.erase("innovation");
    try {
        reg.render(PromptRole::Gen, 0, bindings);
        FAIL("expected MissingBinding");
    } catch (const MissingBinding& e) {
        CHECK(e.name() == "innovation");
    }
}

TEST_CASE("registering extra variants is additive") {
    auto reg = PromptRegistry::with_defaults();
    reg.add(PromptRole::Gen, "Strip stage colour from: {{innovation}}");
    reg.add(PromptRole::Gen, "Make this idea portable: {{innovation}}");
    reg.add(PromptRole::Gen, "Abstract away the origin of: {{innovation}}");
    CHECK(reg.variant_count(PromptRole::Gen) == 23);
    CHECK(reg.render(PromptRole::Gen, 22, demo_bindings()).find("portable") ==
          std::string::npos);
}

TEST_CASE("render is pure") {
    auto reg = PromptRegistry::with_defaults();
    for (PromptRole role : kAllRoles) {
        CHECK(reg.render(role, 7, demo_bindings()) == reg.render(role, 7, demo_bindings()));
    }
}

TEST_CASE("distinct variants render distinct prompts under identical bindings") {
    auto reg = PromptRegistry::with_defaults();
    for (PromptRole role : kAllRoles) {
        std::set<std::string> rendered;
        for (std::size_t v = 0; v < reg.variant_count(role); ++v)
            rendered.insert(reg.render(role, v, demo_bindings()));
        CAPTURE(to_string(role));
        CHECK(rendered.size() == reg.variant_count(role));
    }
}

TEST_CASE("bodies may only reference declared placeholders") {
    PromptRegistry reg;
    CHECK_THROWS_AS(reg.add(PromptRole::Diff, "hello {{bogus}}"), ValidationError);
    CHECK_THROWS_AS(reg.add(PromptRole::Diff, "hello {{innovation"), ValidationError);
    CHECK_NOTHROW(reg.add(PromptRole::Diff, "plain body without placeholders"));
}

TEST_CASE("template directory save/load round-trips") {
    namespace fs = std::filesystem;
    auto reg = PromptRegistry::with_defaults();
    auto dir = fs::temp_directory_path() / "scatter_prompt_roundtrip";
    fs::remove_all(dir);
    reg.save_directory(dir);

    auto loaded = PromptRegistry::load_directory(dir);
    for (PromptRole role : kAllRoles) {
        REQUIRE(loaded.variant_count(role) == reg.variant_count(role));
        for (std::size_t v = 0; v < reg.variant_count(role); ++v)
            CHECK(loaded.body(role, v) == reg.body(role, v));
    }
    CHECK(loaded.content_digest() == reg.content_digest());

    SUBCASE("a gap in variant numbering is rejected") {
        fs::remove(dir / "gen.3.prompt");
        CHECK_THROWS_AS(PromptRegistry::load_directory(dir), ValidationError);
    }
}

TEST_CASE("loading a missing directory fails cleanly") {
    CHECK_THROWS_AS(PromptRegistry::load_directory("no/such/dir"), ValidationError);
}

TEST_CASE("content digest tracks edits") {
    auto a = PromptRegistry::with_defaults();
    auto b = PromptRegistry::with_defaults();
    CHECK(a.content_digest() == b.content_digest());
    b.add(PromptRole::Scope, "extra variant");
    CHECK(a.content_digest() != b.content_digest());
    CHECK(a.content_digest().size() == 64);
}

TEST_CASE("lead-in tables are unique and align with the shipped templates") {
    CHECK(apply_lead_ins().size() == 20);
    CHECK(direct_lead_ins().size() == 20);
    std::set<std::string> uniq_apply(apply_lead_ins().begin(), apply_lead_ins().end());
    std::set<std::string> uniq_direct(direct_lead_ins().begin(), direct_lead_ins().end());
    CHECK(uniq_apply.size() == 20);
    CHECK(uniq_direct.size() == 20);

    auto reg = PromptRegistry::with_defaults();
    for (std::size_t v = 0; v < 20; ++v) {
        CHECK(reg.body(PromptRole::Apply, v).rfind(apply_lead_ins()[v], 0) == 0);
        CHECK(reg.body(PromptRole::Direct, v).rfind(direct_lead_ins()[v], 0) == 0);
    }
}

} // TEST_SUITE
