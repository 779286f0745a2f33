#include "fsmforge/randspec.hpp"

#include <random>

namespace fsmforge::ir {

namespace {

// Modulo draws keep the stream identical across platforms (std
// distributions are not pinned by the standard).
std::uint64_t draw(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

ExprPtr random_const(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi);

// A comparison that is both satisfiable and refutable for a width-w
// unsigned operand, so generated guards are never constant.
ExprPtr comparison_leaf(std::mt19937_64& rng, const std::string& name, int width) {
    std::uint64_t max = width_mask(width);
    switch (draw(rng, 6)) {
        case 0: return Expr::binary(BinOp::Eq, Expr::ref(name), random_const(rng, 0, max));
        case 1: return Expr::binary(BinOp::Neq, Expr::ref(name), random_const(rng, 0, max));
        case 2: return Expr::binary(BinOp::Lt, Expr::ref(name), random_const(rng, 1, max));
        case 3: return Expr::binary(BinOp::Gt, Expr::ref(name), random_const(rng, 0, max - 1));
        case 4: return Expr::binary(BinOp::Le, Expr::ref(name), random_const(rng, 0, max - 1));
        default: return Expr::binary(BinOp::Ge, Expr::ref(name), random_const(rng, 1, max));
    }
}

ExprPtr random_const(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
    std::uint64_t v = lo + draw(rng, hi - lo + 1);
    return Expr::constant(v, natural_width(v));
}

}  // namespace

FsmSpec gen_random_spec(std::uint64_t seed, const GenBounds& bounds) {
    if (bounds.max_states < 1)
        throw ContractError("E_ARGS", "bounds must allow at least one state");
    std::mt19937_64 rng(seed);
    FsmSpec spec;
    spec.name = "fsm_" + std::to_string(seed);
    spec.clock.name = "clk";
    spec.clock.edge = draw(rng, 2) ? ClockEdge::Falling : ClockEdge::Rising;
    spec.reset.name = "rst";
    spec.reset.active = draw(rng, 2) ? ResetActive::Low : ResetActive::High;
    spec.reset.kind = draw(rng, 2) ? ResetKind::Asynchronous : ResetKind::Synchronous;
    spec.encoding = draw(rng, 2) ? Encoding::Onehot : Encoding::Binary;

    std::size_t n_states = 1 + draw(rng, bounds.max_states);
    std::size_t n_inputs = 1 + draw(rng, bounds.max_inputs);
    std::size_t n_outputs = 1 + draw(rng, bounds.max_outputs);
    std::size_t n_registers = draw(rng, bounds.max_registers + 1);

    for (std::size_t i = 0; i < n_inputs; ++i)
        spec.inputs.push_back({"in" + std::to_string(i), 1 + static_cast<int>(draw(rng, 3))});
    for (std::size_t i = 0; i < n_outputs; ++i)
        spec.outputs.push_back({"out" + std::to_string(i), 1 + static_cast<int>(draw(rng, 3))});
    for (std::size_t i = 0; i < n_registers; ++i) {
        int width = 1 + static_cast<int>(draw(rng, 4));
        spec.registers.push_back(
            {"r" + std::to_string(i), width, draw(rng, width_mask(width) + 1)});
    }

    for (std::size_t i = 0; i < n_states; ++i) {
        StateDef s;
        s.name = "S" + std::to_string(i);
        for (const auto& o : spec.outputs)
            if (draw(rng, 4) != 0)  // 3/4 of outputs get a Moore constant
                s.moore.emplace_back(o.name, draw(rng, width_mask(o.width) + 1));
        spec.states.push_back(std::move(s));
    }
    spec.initial = spec.states[0].name;

    // Referencable (name, width) pool for guards and action values.
    std::vector<std::pair<std::string, int>> refs;
    for (const auto& s : spec.inputs) refs.emplace_back(s.name, s.width);
    for (const auto& r : spec.registers) refs.emplace_back(r.name, r.width);

    auto random_guard = [&]() -> ExprPtr {
        const auto& [name, width] = refs[draw(rng, refs.size())];
        ExprPtr leaf = comparison_leaf(rng, name, width);
        if (draw(rng, 3) == 0) {
            const auto& [name2, width2] = refs[draw(rng, refs.size())];
            ExprPtr leaf2 = comparison_leaf(rng, name2, width2);
            return Expr::binary(draw(rng, 2) ? BinOp::Or : BinOp::And, leaf, leaf2);
        }
        return leaf;
    };

    auto random_action_value = [&](int dest_width) -> ExprPtr {
        switch (draw(rng, 3)) {
            case 0: return random_const(rng, 0, width_mask(dest_width));
            case 1: return Expr::ref(refs[draw(rng, refs.size())].first);
            default:
                return Expr::binary(BinOp::Add, Expr::ref(refs[draw(rng, refs.size())].first),
                                    Expr::constant(1, 1));
        }
    };

    auto maybe_actions = [&](Transition& t) {
        if (draw(rng, 4) != 0) return;  // 1/4 of transitions carry an action
        if (!spec.registers.empty() && draw(rng, 2) == 0) {
            const auto& r = spec.registers[draw(rng, spec.registers.size())];
            t.actions.emplace_back(r.name, random_action_value(r.width));
        } else {
            const auto& o = spec.outputs[draw(rng, spec.outputs.size())];
            t.actions.emplace_back(o.name, random_action_value(o.width));
        }
    };

    // Spanning arborescence from the initial state: state i>0 is entered
    // from some earlier state, so everything stays reachable. Parents with
    // a full transition list are probed forward; pigeonhole guarantees a
    // free slot.
    const std::size_t cap = bounds.max_transitions_per_state;
    for (std::size_t i = 1; i < n_states; ++i) {
        std::size_t parent = draw(rng, i);
        while (spec.states[parent].transitions.size() >= cap) parent = (parent + 1) % i;
        Transition t;
        t.guard = random_guard();
        t.target = spec.states[i].name;
        maybe_actions(t);
        spec.states[parent].transitions.push_back(std::move(t));
    }

    // Extra edges up to the per-state cap, then an always-true tail so
    // non-terminal states always take some transition.
    for (std::size_t i = 0; i < n_states; ++i) {
        auto& transitions = spec.states[i].transitions;
        std::size_t room = cap - transitions.size();
        std::size_t extra = room == 0 ? 0 : draw(rng, room + 1);
        for (std::size_t j = 0; j < extra; ++j) {
            Transition t;
            t.guard = random_guard();
            t.target = spec.states[draw(rng, n_states)].name;
            maybe_actions(t);
            transitions.push_back(std::move(t));
        }
        if (!transitions.empty()) transitions.back().guard = Expr::always_true();
    }

    return spec;
}

}  // namespace fsmforge::ir
