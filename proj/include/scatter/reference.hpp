#pragma once

#include <array>

namespace scatter {

// Per-round metric pairs of the shipped 20-round reference experiment.
// The default mock rulebook is laid out to reproduce exactly these rows,
// and the shipped replay cassette is a recording of that run.
struct ReferenceRound {
    int a_items;
    int a_stages;
    int b_items;
    int b_stages;
};

const std::array<ReferenceRound, 20>& reference_rounds();

} // namespace scatter
