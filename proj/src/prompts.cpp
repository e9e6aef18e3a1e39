#include "scatter/prompts.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "scatter/errors.hpp"
#include "sha256.hpp"

namespace scatter {

std::string to_string(PromptRole role) {
    switch (role) {
        case PromptRole::Diff: return "diff";
        case PromptRole::Gen: return "gen";
        case PromptRole::Scope: return "scope";
        case PromptRole::Apply: return "apply";
        case PromptRole::Direct: return "direct";
    }
    return "diff";
}

PromptRole prompt_role_from_string(const std::string& s) {
    for (PromptRole r : kAllRoles) {
        if (to_string(r) == s) return r;
    }
    throw ValidationError("unknown prompt role: " + s);
}

const std::vector<std::string>& declared_placeholders() {
    static const std::vector<std::string> names = {
        "innovation", "context",      "segment_name",
        "stage_list", "process_name", "segment_description",
    };
    return names;
}

namespace {

// Extracts {{name}} placeholder names in order of appearance.
std::vector<std::string> scan_placeholders(const std::string& body) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while ((pos = body.find("{{", pos)) != std::string::npos) {
        std::size_t end = body.find("}}", pos + 2);
        if (end == std::string::npos)
            throw ValidationError("unterminated placeholder in template body");
        out.push_back(body.substr(pos + 2, end - pos - 2));
        pos = end + 2;
    }
    return out;
}

const std::vector<std::string>& diff_instructions() {
    static const std::vector<std::string> v = {
        "Compare the proposed innovation with the original situation and isolate the essential "
        "change.",
        "Contrast the new idea against the baseline and state the single change that matters.",
        "Read both texts and extract the core novelty the user introduced.",
        "Identify what actually changed between the baseline and the proposal.",
        "Diff the innovation against its context and name the key modification.",
        "Work out the fundamental difference the proposal introduces over the baseline.",
        "Determine the central change separating the new approach from the original.",
        "Pin down the one modification that distinguishes the proposal from the context.",
        "Examine the two descriptions and distill the core contribution of the new idea.",
        "Set the proposal against the baseline and isolate the novel step.",
        "Find the essential delta between the original process and the new idea.",
        "Tell apart the proposal and the baseline: what is the decisive change?",
        "Strip away everything shared with the baseline and report the remaining novelty.",
        "Locate the heart of the change the user is proposing relative to the context.",
        "From the two texts below, surface the core improvement being introduced.",
        "Judge what is genuinely new in the proposal compared with the original setup.",
        "Weigh the proposal against its context and summarize the key innovation.",
        "Extract the defining change: what does the proposal do that the baseline does not?",
        "Name the single most important modification the innovation makes to the baseline.",
        "Boil the proposal down to the one change it introduces over the original.",
    };
    return v;
}

const std::vector<std::string>& gen_instructions() {
    static const std::vector<std::string> v = {
        "Rewrite the change below so it no longer refers to the {{segment_name}} stage or any "
        "stage-specific detail.",
        "Abstract this improvement away from the {{segment_name}} stage: remove every mention of "
        "it.",
        "Generalize the following change by stripping out references tied to the {{segment_name}} "
        "stage.",
        "Restate the improvement in stage-neutral terms, dropping anything specific to "
        "{{segment_name}}.",
        "Lift this change out of the {{segment_name}} stage: phrase it so it could apply "
        "anywhere.",
        "Remove the wording specific to {{segment_name}} and keep only the transferable idea.",
        "Make the change below context-independent; it currently leans on the {{segment_name}} "
        "stage.",
        "Decouple the improvement from the {{segment_name}} stage and express the underlying "
        "principle.",
        "Turn this stage-bound change into a general rule free of {{segment_name}} references.",
        "Reword the improvement so nothing in it points at the {{segment_name}} stage.",
        "Produce a stage-agnostic version of the change; today it is tied to {{segment_name}}.",
        "Extract the general principle behind this change, leaving the {{segment_name}} details "
        "behind.",
        "Phrase the improvement so a reader could not tell it began in the {{segment_name}} "
        "stage.",
        "Strip the change of its {{segment_name}} anchoring and keep the reusable core.",
        "Recast the improvement in general terms, with no trace of the {{segment_name}} stage.",
        "Untie this change from the {{segment_name}} stage and state it as a broad guideline.",
        "Write the stage-free form of the improvement below; it originated in {{segment_name}}.",
        "Translate the change into wording that applies to any stage, not just {{segment_name}}.",
        "Give the generalized form of this improvement, free of {{segment_name}} vocabulary.",
        "Condense the change to its transferable essence, omitting all {{segment_name}} "
        "specifics.",
    };
    return v;
}

const std::vector<std::string>& scope_instructions() {
    static const std::vector<std::string> v = {
        "Decide whether the improvement below still belongs to a single stage of "
        "{{process_name}} or already spans the whole process.",
        "Judge the reach of this change within {{process_name}}: one stage, or the process as a "
        "whole?",
        "Assess whether this improvement is confined to one stage of {{process_name}} or applies "
        "across it.",
        "Is the change below still tied to a single stage of {{process_name}}, or is it already "
        "process-wide?",
        "Evaluate the scope of this improvement inside {{process_name}}: stage-bound or "
        "everywhere?",
        "Determine if the following change concerns just one stage of {{process_name}} or all of "
        "them.",
        "Tell whether this improvement targets a single stage of {{process_name}} or the entire "
        "flow.",
        "Classify the change below: specific to one stage of {{process_name}}, or general to the "
        "process?",
        "State whether this improvement lives in one stage of {{process_name}} or stretches over "
        "all stages.",
        "Does the change below remain anchored to a single stage of {{process_name}}, or has it "
        "outgrown it?",
        "Weigh whether this improvement concerns one stage of {{process_name}} or the full "
        "pipeline.",
        "Decide if the following change is stage-local within {{process_name}} or already "
        "covers the process.",
        "Gauge the breadth of this improvement in {{process_name}}: single stage or whole "
        "process?",
        "Settle whether the change below addresses one stage of {{process_name}} or every stage "
        "at once.",
        "Review this improvement and say if it is limited to one stage of {{process_name}} or "
        "not.",
        "Consider the change below: does it belong to a particular stage of {{process_name}} or "
        "to all?",
        "Examine whether this improvement stays within one stage of {{process_name}} or crosses "
        "stages.",
        "Establish if the change is scoped to a single stage of {{process_name}} or spans the "
        "process.",
        "Resolve whether this improvement applies to exactly one stage of {{process_name}} or "
        "more broadly.",
        "Appraise the change below: one stage of {{process_name}}, or the process end to end?",
    };
    return v;
}

// Shared output contract for the item-producing roles. The harness parses
// exactly this shape.
constexpr const char* kItemBlockFooter =
    "Answer with one fenced code block and nothing else. The block must contain a JSON "
    "array; each element is an object with a \"description\" string and a \"stages\" array "
    "of stage names from: {{stage_list}}.";

std::string diff_body(const std::string& instruction) {
    return instruction +
           " The process is {{process_name}} with stages: {{stage_list}}.\n"
           "\n"
           "Proposal:\n"
           "{{innovation}}\n"
           "\n"
           "Baseline:\n"
           "{{context}}\n"
           "\n"
           "Reply with exactly two lines:\n"
           "SUMMARY: <the core change in one sentence>\n"
           "ORIGIN: <the stage it starts from, one of: {{stage_list}}>\n";
}

std::string gen_body(const std::string& instruction) {
    return instruction +
           "\n"
           "\n"
           "Change:\n"
           "{{innovation}}\n"
           "\n"
           "Answer with the rewritten change only.\n";
}

std::string scope_body(const std::string& instruction) {
    return instruction +
           " Stages: {{stage_list}}.\n"
           "\n"
           "Improvement:\n"
           "{{innovation}}\n"
           "\n"
           "Answer 'LOCAL: <stage>' if it is still tied to one stage, or 'GLOBAL' if it already "
           "covers the process.\n";
}

std::string apply_body(const std::string& lead_in) {
    return lead_in +
           "{{segment_name}} stage of {{process_name}}. Stage description: "
           "{{segment_description}}\n"
           "\n"
           "Improvement:\n"
           "{{innovation}}\n"
           "\n"
           "If the improvement cannot reasonably work for this stage, answer NOT-APPLICABLE.\n"
           "Otherwise: " +
           kItemBlockFooter + "\n";
}

std::string direct_body(const std::string& lead_in) {
    return lead_in +
           " for the {{process_name}} process.\n"
           "\n"
           "Innovation:\n"
           "{{innovation}}\n"
           "\n"
           "Original context:\n"
           "{{context}}\n"
           "\n" +
           kItemBlockFooter + "\n";
}

} // namespace

const std::vector<std::string>& apply_lead_ins() {
    static const std::vector<std::string> v = {
        "Adapt this general improvement for the ",
        "Apply the generalized change to the ",
        "Translate this improvement into the ",
        "Rework the innovation so it fits the ",
        "Specialize the general idea for the ",
        "Carry this improvement over to the ",
        "Instantiate the generalized innovation in the ",
        "Port the abstract improvement to the ",
        "Tailor the generalized change to the ",
        "Project this innovation onto the ",
        "Transfer the general improvement into the ",
        "Realize the abstract idea within the ",
        "Fit the generalized optimization to the ",
        "Recast this improvement for the ",
        "Transplant the general change into the ",
        "Embed the generalized idea in the ",
        "Shape the abstract improvement around the ",
        "Localize the generalized innovation to the ",
        "Bring the general optimization into the ",
        "Graft the generalized improvement onto the ",
    };
    return v;
}

const std::vector<std::string>& direct_lead_ins() {
    static const std::vector<std::string> v = {
        "Propose generalized improvements inspired by this innovation",
        "Enumerate the distinct optimizations this innovation suggests",
        "List every improvement idea that follows from this innovation",
        "Suggest candidate enhancements motivated by this innovation",
        "Derive further optimizations from this innovation",
        "Identify follow-on improvements implied by this innovation",
        "Outline additional refinements this innovation points to",
        "Generate improvement proposals based on this innovation",
        "Recommend further optimizations building on this innovation",
        "Describe candidate optimizations stemming from this innovation",
        "Catalogue possible improvements arising from this innovation",
        "Draft a set of enhancements that extend this innovation",
        "Brainstorm further improvements around this innovation",
        "Work out follow-up optimizations from this innovation",
        "Sketch additional improvement ideas prompted by this innovation",
        "Spell out further enhancements suggested by this innovation",
        "Lay out candidate improvements drawn from this innovation",
        "Compile a list of optimizations rooted in this innovation",
        "Map out further improvement options opened by this innovation",
        "Put together enhancement proposals derived from this innovation",
    };
    return v;
}

PromptRegistry PromptRegistry::with_defaults() {
    PromptRegistry reg;
    for (const auto& s : diff_instructions()) reg.add(PromptRole::Diff, diff_body(s));
    for (const auto& s : gen_instructions()) reg.add(PromptRole::Gen, gen_body(s));
    for (const auto& s : scope_instructions()) reg.add(PromptRole::Scope, scope_body(s));
    for (const auto& s : apply_lead_ins()) reg.add(PromptRole::Apply, apply_body(s));
    for (const auto& s : direct_lead_ins()) reg.add(PromptRole::Direct, direct_body(s));
    return reg;
}

std::size_t PromptRegistry::add(PromptRole role, std::string body) {
    const auto& declared = declared_placeholders();
    for (const auto& name : scan_placeholders(body)) {
        if (std::find(declared.begin(), declared.end(), name) == declared.end())
            throw ValidationError("template references undeclared placeholder: " + name);
    }
    auto& list = bodies_[static_cast<std::size_t>(role)];
    list.push_back(std::move(body));
    return list.size() - 1;
}

std::size_t PromptRegistry::variant_count(PromptRole role) const {
    return bodies_[static_cast<std::size_t>(role)].size();
}

const std::string& PromptRegistry::body(PromptRole role, std::size_t variant) const {
    const auto& list = bodies_[static_cast<std::size_t>(role)];
    if (variant >= list.size()) throw UnknownTemplate(to_string(role), variant);
    return list[variant];
}

std::string PromptRegistry::render(PromptRole role, std::size_t variant,
                                   const Bindings& bindings) const {
    const std::string& tmpl = body(role, variant);
    std::string out;
    out.reserve(tmpl.size());
    std::size_t pos = 0;
    while (pos < tmpl.size()) {
        std::size_t open = tmpl.find("{{", pos);
        if (open == std::string::npos) {
            out.append(tmpl, pos, std::string::npos);
            break;
        }
        out.append(tmpl, pos, open - pos);
        std::size_t close = tmpl.find("}}", open + 2);
        std::string name = tmpl.substr(open + 2, close - open - 2);
        auto it = bindings.find(name);
        if (it == bindings.end()) throw MissingBinding(name);
        out += it->second;
        pos = close + 2;
    }
    return out;
}

PromptRegistry PromptRegistry::load_directory(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir))
        throw ValidationError("template directory not found: " + dir.string());

    std::map<PromptRole, std::map<std::size_t, std::string>> found;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".prompt") continue;
        std::string stem = entry.path().stem().string(); // "<role>.<variant>"
        auto dot = stem.find('.');
        if (dot == std::string::npos)
            throw ValidationError("bad template filename: " + entry.path().filename().string());
        PromptRole role = prompt_role_from_string(stem.substr(0, dot));
        std::size_t variant = 0;
        try {
            variant = std::stoul(stem.substr(dot + 1));
        } catch (const std::exception&) {
            throw ValidationError("bad variant index in filename: " +
                                  entry.path().filename().string());
        }
        std::ifstream in(entry.path());
        std::ostringstream buf;
        buf << in.rdbuf();
        if (!found[role].emplace(variant, buf.str()).second)
            throw ValidationError("duplicate template file for " + stem);
    }

    PromptRegistry reg;
    for (auto& [role, variants] : found) {
        std::size_t expected = 0;
        for (auto& [variant, content] : variants) {
            if (variant != expected)
                throw ValidationError("variant indices for role '" + to_string(role) +
                                      "' are not contiguous from 0 (missing " +
                                      std::to_string(expected) + ")");
            reg.add(role, std::move(content));
            ++expected;
        }
    }
    return reg;
}

void PromptRegistry::save_directory(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    for (PromptRole role : kAllRoles) {
        for (std::size_t v = 0; v < variant_count(role); ++v) {
            auto path = dir / (to_string(role) + "." + std::to_string(v) + ".prompt");
            std::ofstream out(path);
            out << body(role, v);
            if (!out) throw ValidationError("cannot write template file: " + path.string());
        }
    }
}

std::string PromptRegistry::content_digest() const {
    std::string blob;
    for (PromptRole role : kAllRoles) {
        for (std::size_t v = 0; v < variant_count(role); ++v) {
            blob += to_string(role);
            blob += '\x1f';
            blob += std::to_string(v);
            blob += '\x1f';
            blob += body(role, v);
            blob += '\x1e';
        }
    }
    return detail::sha256_hex(blob);
}

} // namespace scatter
