#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fsmforge/netlist.hpp"
#include "fsmforge/spec.hpp"

namespace fsmforge::sim {

using Valuation = std::map<std::string, std::uint64_t>;

struct Port {
    std::string name;
    int width = 1;
    bool operator==(const Port&) const = default;
};

struct PortSignature {
    std::vector<Port> inputs;
    std::vector<Port> outputs;
    bool operator==(const PortSignature&) const = default;
};

/// Observable internals of a model, captured before the clock edge.
struct Internals {
    std::string state_name;
    std::uint64_t state_code = 0;
    Valuation registers;
};

/// Uniform cycle-accurate interface over the IR interpreter and parsed
/// netlists. Instances are single-owner mutable state; independent models
/// never share anything.
class ExecModel {
public:
    virtual ~ExecModel() = default;

    virtual void reset() = 0;
    /// Applies one clock cycle: computes the outputs visible during the
    /// cycle from (current state, inputs), then advances state and
    /// registers. Missing input names throw ContractError(E_UNBOUND).
    virtual Valuation step(const Valuation& inputs) = 0;
    virtual const PortSignature& ports() const = 0;
    virtual Internals internals() const = 0;
};

/// Reference interpreter directly over a validated FsmSpec. Transition
/// semantics: first guard matching (inputs, registers) wins; outputs are
/// the state's Moore constants (absent entries read 0) overridden by the
/// taken transition's Mealy actions; register actions see pre-update
/// values; no matching guard holds the state.
std::unique_ptr<ExecModel> interpret(const ir::FsmSpec& spec);

/// Executable view of a parsed emitted-Verilog module.
std::unique_ptr<ExecModel> netlist_model(codegen::NetlistModel model);

}  // namespace fsmforge::sim
