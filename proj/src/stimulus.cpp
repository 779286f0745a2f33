#include "fsmforge/stimulus.hpp"

#include <random>

namespace fsmforge::sim {

Stimulus gen_stimuli(std::uint64_t seed, std::size_t cycles, const std::vector<Port>& inputs) {
    Stimulus stim;
    stim.seed = seed;
    stim.algorithm = kStimulusAlgorithm;
    stim.inputs = inputs;
    stim.cycles.reserve(cycles);
    // mt19937_64 output is pinned by the standard, so streams are identical
    // across platforms; std distributions are not, so values are masked raw
    // draws.
    std::mt19937_64 rng(seed);
    for (std::size_t c = 0; c < cycles; ++c) {
        Valuation v;
        for (const auto& p : inputs) v[p.name] = rng() & ir::width_mask(p.width);
        stim.cycles.push_back(std::move(v));
    }
    return stim;
}

}  // namespace fsmforge::sim
