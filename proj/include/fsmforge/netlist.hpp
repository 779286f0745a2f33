#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fsmforge/diag.hpp"
#include "fsmforge/expr.hpp"
#include "fsmforge/spec.hpp"

namespace fsmforge::codegen {

struct NetlistPort {
    std::string name;
    int width = 1;
    bool operator==(const NetlistPort&) const = default;
};

/// One statement of a combinational block: blocking assignment, if/else
/// chain, or a full case with default.
struct VStmt {
    enum class Kind { Assign, If, Case };
    Kind kind = Kind::Assign;

    // Assign
    std::string lhs;
    ir::ExprPtr rhs;

    // If: (condition, body) per branch; a null condition is the final else.
    std::vector<std::pair<ir::ExprPtr, std::vector<VStmt>>> branches;

    // Case
    ir::ExprPtr subject;
    std::vector<std::pair<std::uint64_t, std::vector<VStmt>>> arms;  // label value -> body
    std::vector<VStmt> default_arm;
};

/// Executable closed form of one emitted Verilog module: ports, the state
/// register, and the combinational decision trees. Built only by
/// parse_emitted_verilog.
struct NetlistModel {
    std::string module_name;

    std::string clock_name;
    ir::ClockEdge clock_edge = ir::ClockEdge::Rising;
    std::string reset_name;
    ir::ResetActive reset_active = ir::ResetActive::High;
    ir::ResetKind reset_kind = ir::ResetKind::Synchronous;

    std::vector<NetlistPort> inputs;  // excludes clock and reset
    std::vector<NetlistPort> outputs;

    std::vector<std::pair<std::string, std::uint64_t>> localparams;  // declaration order
    std::map<std::string, int> net_widths;  // every declared net: ports, regs, localparams

    /// Registers updated by the sequential block, in assignment order.
    /// state_reg names the one reset to a state localparam.
    std::vector<std::string> clocked_regs;
    std::string state_reg;
    std::map<std::string, std::uint64_t> reset_values;
    std::map<std::string, std::string> next_of;  // clocked reg -> comb next-value net

    std::vector<std::vector<VStmt>> comb_blocks;  // in source order

    std::uint64_t localparam_value(const std::string& name) const;
    /// Localparam name holding `code`; empty when none matches.
    std::string state_name_of(std::uint64_t code) const;
};

/// Parses exactly the dialect emit_verilog produces. Constructs outside the
/// subset yield E_SUBSET naming the construct; token or grammar errors yield
/// E_VPARSE. Both carry "line:column" in the diagnostic path.
Result<NetlistModel> parse_emitted_verilog(const std::string& text);

}  // namespace fsmforge::codegen
