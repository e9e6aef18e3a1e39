#include <json.hpp>

#include "scatter/core.hpp"
#include "scatter/gateway.hpp"
#include "scatter/prompts.hpp"
#include "scatter/reference.hpp"

namespace scatter {

using nlohmann::json;

const std::array<ReferenceRound, 20>& reference_rounds() {
    static const std::array<ReferenceRound, 20> rows = {{
        {5, 1, 7, 5}, {4, 2, 6, 5}, {5, 2, 5, 4}, {6, 3, 6, 4}, {6, 1, 7, 4},
        {7, 1, 7, 5}, {5, 2, 6, 4}, {5, 2, 6, 4}, {8, 1, 6, 4}, {5, 2, 6, 5},
        {6, 2, 6, 4}, {7, 3, 6, 5}, {8, 2, 7, 4}, {4, 1, 6, 3}, {5, 3, 5, 3},
        {8, 1, 6, 4}, {6, 2, 8, 3}, {7, 2, 7, 5}, {5, 1, 7, 3}, {8, 3, 6, 4},
    }};
    return rows;
}

namespace {

std::string fenced_items(const json& records) {
    return "```\n" + records.dump(2) + "\n```\n";
}

json record(std::string description, std::vector<std::string> stages) {
    return json{{"description", std::move(description)}, {"stages", std::move(stages)}};
}

// Method A reply for one phrasing: `items` proposals, the first `stages` of
// them each tagging a distinct early stage, the rest piling onto the first.
std::string direct_reply(const ProcessSpec& spec, int round, int items, int stages) {
    json arr = json::array();
    for (int j = 0; j < items; ++j) {
        const Segment& seg = spec.segments[static_cast<std::size_t>(j < stages ? j : 0)];
        arr.push_back(record("Streamline the " + seg.name +
                                 " step by folding its adjacent bookkeeping into one pass "
                                 "(phrasing " +
                                 std::to_string(round) + ", proposal " + std::to_string(j + 1) +
                                 ")",
                             {seg.id}));
    }
    return fenced_items(arr);
}

// Apply reply for one (phrasing, target): the lead record merges the target
// with its neighbour; `extras` additional records keep the same stage tag.
std::string apply_reply(const ProcessSpec& spec, int round, std::size_t target_idx, int extras) {
    const Segment& target = spec.segments[target_idx];
    const Segment& partner = target_idx + 1 < spec.segments.size()
                                 ? spec.segments[target_idx + 1]
                                 : spec.segments[target_idx - 1];
    json arr = json::array();
    arr.push_back(record("Merge the " + target.name + " step with the " + partner.name +
                             " step so both complete as one combined operation (phrasing " +
                             std::to_string(round) + ")",
                         {target.id}));
    for (int k = 0; k < extras; ++k) {
        arr.push_back(record("Consolidate " + target.name +
                                 " retries into the combined step as well (phrasing " +
                                 std::to_string(round) + ", extra " + std::to_string(k + 1) + ")",
                             {target.id}));
    }
    return fenced_items(arr);
}

} // namespace

MockRulebook default_mock_rulebook() {
    const ProcessSpec lifecycle = builtin_lifecycle_fixture();
    const auto& rows = reference_rounds();
    MockRulebook book;

    // Pipeline steps 1-3 for the embedded-contract demo. The diff pattern
    // keys on the user's innovation text, the gen pattern on the extracted
    // summary, the scope pattern on the generalized text.
    book.push_back({"diff", "deployment and the first invocation",
                    "SUMMARY: Merge contract deployment with the first invocation so both "
                    "complete in a single on-chain step.\n"
                    "ORIGIN: deployment"});
    book.push_back({"gen", "Merge contract deployment with the first invocation",
                    "Merge any lifecycle step with the immediately following step so the pair "
                    "completes as one combined operation."});
    book.push_back({"scope", "Merge any lifecycle step with the immediately following step",
                    "LOCAL: deployment"});

    // Desk demo (spatial mode): surface-coating innovation, origin = surface.
    book.push_back({"diff", "ceramic",
                    "SUMMARY: Apply a ceramic-infused coating to the desk surface for "
                    "durability.\n"
                    "ORIGIN: surface"});
    book.push_back({"gen", "ceramic",
                    "Apply a protective hard-wearing layer to any part so wear resistance "
                    "improves."});
    book.push_back({"scope", "hard-wearing layer", "LOCAL: surface"});
    book.push_back({"apply", "legs",
                    "```\n[{\"description\": \"Coat the legs with the protective layer to "
                    "resist scuffing.\", \"stages\": [\"legs\"]}]\n```\n"});

    // One direct rule per phrasing (Method A) and one apply rule per
    // (phrasing, target) pair (Method B step 4), laid out so the parsed
    // metrics land on the reference rows.
    for (int round = 1; round <= 20; ++round) {
        const ReferenceRound& row = rows[static_cast<std::size_t>(round - 1)];
        std::size_t v = static_cast<std::size_t>(round - 1);

        book.push_back({"direct", direct_lead_ins()[v],
                        direct_reply(lifecycle, round, row.a_items, row.a_stages)});

        int applicable = row.b_stages - 1; // origin item covers the first stage
        int extras = row.b_items - 1 - applicable;
        for (std::size_t t = 1; t < lifecycle.segments.size(); ++t) {
            std::string pattern = apply_lead_ins()[v] + lifecycle.segments[t].name;
            bool applied = static_cast<int>(t) <= applicable;
            std::string reply = applied ? apply_reply(lifecycle, round, t, t == 1 ? extras : 0)
                                        : "NOT-APPLICABLE";
            book.push_back({"apply", std::move(pattern), std::move(reply)});
        }
    }
    return book;
}

} // namespace scatter
