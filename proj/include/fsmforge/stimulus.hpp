#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fsmforge/exec.hpp"

namespace fsmforge::sim {

/// Reproducible random input stream: one PRNG draw per input per cycle,
/// masked to the input width, inputs in declared order. The generator
/// algorithm is pinned so streams survive releases.
struct Stimulus {
    std::uint64_t seed = 0;
    std::string algorithm;  // e.g. "mt19937_64/v1"
    std::vector<Port> inputs;
    std::vector<Valuation> cycles;
};

inline constexpr const char* kStimulusAlgorithm = "mt19937_64/v1";

Stimulus gen_stimuli(std::uint64_t seed, std::size_t cycles, const std::vector<Port>& inputs);

}  // namespace fsmforge::sim
