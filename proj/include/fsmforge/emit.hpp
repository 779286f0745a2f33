#pragma once

#include <optional>
#include <string>

#include "fsmforge/encode.hpp"
#include "fsmforge/spec.hpp"

namespace fsmforge::codegen {

/// Overrides applied on top of a spec before emission. Unset fields keep
/// the spec's values.
struct EmitOptions {
    std::optional<std::string> clock_name;
    std::optional<std::string> reset_name;
    std::optional<ir::ResetActive> reset_active;
    std::optional<ir::ResetKind> reset_kind;
    std::optional<ir::ClockEdge> clock_edge;
    std::optional<ir::Encoding> encoding;
    bool header = true;  // false omits the tool/version comment (reproducible output)
};

/// Applies the option overrides and re-validates. Diagnostics when an
/// override is not a valid identifier or collides with a declared signal.
Result<ir::FsmSpec> apply_emit_options(const ir::FsmSpec& spec, const EmitOptions& opts);

/// Compiles a validated spec to synthesizable Verilog in three-block style:
/// a sequential state/register block, a combinational next-state block
/// (full case, first-match if/else per transition order, explicit default),
/// and a combinational output block (Moore values then Mealy overrides).
/// Byte-deterministic. Throws ContractError(E_EMIT_INTERNAL) if the spec
/// or the option overrides do not validate.
std::string emit_verilog(const ir::FsmSpec& spec, const EmitOptions& opts = {});

/// Converts a validated spec to fsm2sv-style YAML. All state names and
/// string scalars are emitted double-quoted so YAML implicit typing can
/// never reinterpret them (OFF/ON/YES/NO/...). Features with no YAML
/// equivalent (asynchronous reset, falling-edge clock) yield
/// E_YAML_UNREPRESENTABLE naming the feature.
Result<std::string> emit_yaml(const ir::FsmSpec& spec);

}  // namespace fsmforge::codegen
