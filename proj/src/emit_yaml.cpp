#include <sstream>

#include "fsmforge/emit.hpp"

namespace fsmforge::codegen {

namespace {

// Every string scalar is double-quoted so YAML implicit typing can never
// turn OFF/ON/YES/NO/TRUE/FALSE/NULL (any case) into booleans or nulls.
std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

Result<std::string> emit_yaml(const ir::FsmSpec& spec) {
    if (!ir::validate(spec).empty())
        throw ContractError("E_EMIT_INTERNAL", "emit_yaml requires a validated spec");

    // The target YAML schema models a synchronous rising-edge FSM; flag
    // anything it cannot express instead of guessing an encoding.
    std::vector<Diagnostic> diags;
    if (spec.reset.kind == ir::ResetKind::Asynchronous)
        diags.push_back(make_error("E_YAML_UNREPRESENTABLE",
                                   "asynchronous reset has no equivalent in the YAML schema",
                                   "/reset/kind"));
    if (spec.clock.edge == ir::ClockEdge::Falling)
        diags.push_back(make_error("E_YAML_UNREPRESENTABLE",
                                   "falling-edge clock has no equivalent in the YAML schema",
                                   "/clock/edge"));
    if (!diags.empty()) return Result<std::string>::failure(std::move(diags));

    std::ostringstream out;
    out << "fsm:\n";
    out << "  name: " << quoted(spec.name) << "\n";
    out << "  clk: " << quoted(spec.clock.name) << "\n";
    out << "  rst: " << quoted(spec.reset.name) << "\n";
    out << "  rst_active: " << quoted(spec.reset.active == ir::ResetActive::High ? "high" : "low")
        << "\n";
    out << "  encoding: " << quoted(ir::encoding_name(spec.encoding)) << "\n";
    out << "  initial: " << quoted(spec.initial) << "\n";
    out << "  inputs:\n";
    for (const auto& s : spec.inputs)
        out << "    " << quoted(s.name) << ": " << s.width << "\n";
    out << "  outputs:\n";
    for (const auto& s : spec.outputs)
        out << "    " << quoted(s.name) << ": " << s.width << "\n";
    if (!spec.registers.empty()) {
        out << "  registers:\n";
        for (const auto& r : spec.registers)
            out << "    " << quoted(r.name) << ": {width: " << r.width
                << ", reset: " << r.reset_value << "}\n";
    }
    out << "  states:\n";
    for (const auto& s : spec.states) {
        out << "    " << quoted(s.name) << ":\n";
        if (!s.moore.empty()) {
            out << "      moore:\n";
            for (const auto& [name, value] : s.moore)
                out << "        " << quoted(name) << ": " << value << "\n";
        }
        if (!s.transitions.empty()) {
            out << "      transitions:\n";
            for (const auto& t : s.transitions) {
                out << "        - when: " << quoted(ir::to_string(t.guard)) << "\n";
                out << "          to: " << quoted(t.target) << "\n";
                if (!t.actions.empty()) {
                    out << "          do:\n";
                    for (const auto& [dest, value] : t.actions)
                        out << "            - " << quoted("<" + dest + " = " + ir::to_string(value) + ">")
                            << "\n";
                }
            }
        }
    }
    return Result<std::string>::success(out.str());
}

}  // namespace fsmforge::codegen
