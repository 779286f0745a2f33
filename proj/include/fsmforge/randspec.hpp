#pragma once

#include <cstdint>

#include "fsmforge/spec.hpp"

namespace fsmforge::ir {

struct GenBounds {
    std::size_t max_states = 8;
    std::size_t max_inputs = 3;
    std::size_t max_outputs = 2;
    std::size_t max_registers = 2;
    std::size_t max_transitions_per_state = 4;
};

/// Deterministic random FSM for property suites ("genspec/v1": mt19937_64
/// with modulo draws in a fixed order). Every state is reachable from the
/// initial one (random arborescence plus extra edges); the last transition
/// of every non-terminal state is always-true so behavior is total; the
/// result always validates cleanly.
FsmSpec gen_random_spec(std::uint64_t seed, const GenBounds& bounds = {});

}  // namespace fsmforge::ir
