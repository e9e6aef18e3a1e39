#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace scatter {

// The five prompting roles. diff/gen/apply drive the pipeline steps,
// scope asks the LOCAL-or-GLOBAL question, direct is the baseline arm.
enum class PromptRole { Diff, Gen, Scope, Apply, Direct };

constexpr std::array<PromptRole, 5> kAllRoles = {
    PromptRole::Diff, PromptRole::Gen, PromptRole::Scope, PromptRole::Apply, PromptRole::Direct};

std::string to_string(PromptRole role);
PromptRole prompt_role_from_string(const std::string& s); // throws ValidationError

struct PromptTemplate {
    PromptRole role = PromptRole::Diff;
    std::size_t variant = 0;
    std::string body; // text with {{placeholder}} slots
};

using Bindings = std::map<std::string, std::string>;

// Placeholder names a template body may reference.
const std::vector<std::string>& declared_placeholders();

// Per-variant lead-in phrases of the shipped apply/direct templates. Each is
// unique across variants, which is what keys the default rulebook's
// per-round dispatch; the apply phrases end right before {{segment_name}}.
const std::vector<std::string>& apply_lead_ins();
const std::vector<std::string>& direct_lead_ins();

// Immutable after construction; renders are pure, so concurrent use is safe.
class PromptRegistry {
public:
    // Registry pre-populated with the shipped phrasings (20 per role).
    static PromptRegistry with_defaults();

    // Loads <role>.<variant>.prompt files; variant indices per role must be
    // contiguous from 0. Throws ValidationError on gaps, unknown roles,
    // or bodies referencing undeclared placeholders.
    static PromptRegistry load_directory(const std::filesystem::path& dir);

    // Materializes the registry as <role>.<variant>.prompt files.
    void save_directory(const std::filesystem::path& dir) const;

    // Appends a variant for the role; returns its index.
    std::size_t add(PromptRole role, std::string body);

    std::size_t variant_count(PromptRole role) const;

    // Substitutes every placeholder; throws UnknownTemplate / MissingBinding.
    std::string render(PromptRole role, std::size_t variant, const Bindings& bindings) const;

    const std::string& body(PromptRole role, std::size_t variant) const;

    // Stable digest over (role, variant, body) triples, for run manifests.
    std::string content_digest() const;

private:
    std::array<std::vector<std::string>, 5> bodies_;
};

} // namespace scatter
