#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "fsmforge/emit.hpp"
#include "fsmforge/version.hpp"

namespace fsmforge::codegen {

using ir::BinOp;
using ir::Expr;
using ir::ExprPtr;
using ir::UnOp;

namespace {

// Verilog operator tokens. Bitwise forms keep the evaluation width rules
// aligned with eval_expr; precedence ordering matches the IR grammar, so the
// same minimal-parenthesis placement is correct.
const char* verilog_token(BinOp op) {
    switch (op) {
        case BinOp::And: return "&";
        case BinOp::Or: return "|";
        case BinOp::Xor: return "^";
        default: return ir::bin_op_token(op);
    }
}

int precedence(BinOp op) {
    switch (op) {
        case BinOp::Or: return 1;
        case BinOp::Xor: return 2;
        case BinOp::And: return 3;
        case BinOp::Eq:
        case BinOp::Neq: return 4;
        case BinOp::Lt:
        case BinOp::Gt:
        case BinOp::Le:
        case BinOp::Ge: return 5;
        case BinOp::Add:
        case BinOp::Sub: return 6;
    }
    return 0;
}

void print_verilog(const ExprPtr& e, std::string& out, int parent_prec, bool right_side) {
    switch (e->kind()) {
        case Expr::Kind::Const:
            out += std::to_string(e->width());
            out += "'d";
            out += std::to_string(e->value());
            return;
        case Expr::Kind::Ref:
            out += e->name();
            return;
        case Expr::Kind::Unary: {
            out += e->un_op() == UnOp::LogicNot ? '!' : '~';
            bool need = e->lhs()->kind() == Expr::Kind::Binary;
            if (need) out += '(';
            print_verilog(e->lhs(), out, 100, false);
            if (need) out += ')';
            return;
        }
        case Expr::Kind::Binary: {
            int prec = precedence(e->bin_op());
            bool need = prec < parent_prec || (prec == parent_prec && right_side);
            if (need) out += '(';
            print_verilog(e->lhs(), out, prec, false);
            out += ' ';
            out += verilog_token(e->bin_op());
            out += ' ';
            print_verilog(e->rhs(), out, prec, true);
            if (need) out += ')';
            return;
        }
    }
}

std::string verilog_expr(const ExprPtr& e) {
    std::string s;
    print_verilog(e, s, 0, false);
    return s;
}

std::string sized_literal(std::uint64_t value, int width) {
    return std::to_string(width) + "'d" + std::to_string(value);
}

std::string range_decl(int width) {
    return width > 1 ? "[" + std::to_string(width - 1) + ":0] " : "";
}

/// Picks names for the state register, localparams, and next-value suffix
/// that cannot collide with declared signals.
struct Naming {
    std::string state_reg;
    std::string next_suffix;
    std::vector<std::string> state_params;  // by state index

    Naming(const ir::FsmSpec& spec) {
        std::set<std::string> taken{spec.clock.name, spec.reset.name};
        for (const auto& s : spec.inputs) taken.insert(s.name);
        for (const auto& s : spec.outputs) taken.insert(s.name);
        for (const auto& r : spec.registers) taken.insert(r.name);

        for (const auto& s : spec.states) {
            std::string candidate = "S_" + s.name;
            while (taken.count(candidate)) candidate = "S" + candidate;
            taken.insert(candidate);
            state_params.push_back(candidate);
        }

        state_reg = "state";
        while (taken.count(state_reg)) state_reg = "fsm_" + state_reg;
        taken.insert(state_reg);

        next_suffix = "_next";
        auto suffix_free = [&] {
            if (taken.count(state_reg + next_suffix)) return false;
            for (const auto& r : spec.registers)
                if (taken.count(r.name + next_suffix)) return false;
            return true;
        };
        while (!suffix_free()) next_suffix += "_";
    }
};

class VerilogWriter {
public:
    VerilogWriter(const ir::FsmSpec& spec, const EncodingMap& enc, bool header)
        : spec_(spec), enc_(enc), names_(spec), header_(header) {}

    std::string write() {
        if (header_) line("// Generated by fsmforge " + std::string(kVersion));
        emit_module_header();
        emit_localparams();
        emit_declarations();
        emit_sequential_block();
        emit_next_state_block();
        emit_output_block();
        line("endmodule");
        return out_.str();
    }

private:
    void line(const std::string& s = "") { out_ << s << "\n"; }

    void emit_module_header() {
        line("module " + spec_.name + " (");
        std::vector<std::string> ports;
        ports.push_back("  input  wire " + spec_.clock.name);
        ports.push_back("  input  wire " + spec_.reset.name);
        for (const auto& s : spec_.inputs)
            ports.push_back("  input  wire " + range_decl(s.width) + s.name);
        for (const auto& s : spec_.outputs)
            ports.push_back("  output reg  " + range_decl(s.width) + s.name);
        for (std::size_t i = 0; i < ports.size(); ++i)
            line(ports[i] + (i + 1 < ports.size() ? "," : ""));
        line(");");
        line();
    }

    void emit_localparams() {
        for (std::size_t i = 0; i < spec_.states.size(); ++i)
            line("  localparam " + range_decl(enc_.state_width) + names_.state_params[i] + " = " +
                 sized_literal(enc_.assignments[i].second, enc_.state_width) + ";");
        line();
    }

    void emit_declarations() {
        line("  reg " + range_decl(enc_.state_width) + names_.state_reg + ";");
        line("  reg " + range_decl(enc_.state_width) + names_.state_reg + names_.next_suffix + ";");
        for (const auto& r : spec_.registers) {
            line("  reg " + range_decl(r.width) + r.name + ";");
            line("  reg " + range_decl(r.width) + r.name + names_.next_suffix + ";");
        }
        line();
    }

    std::string reset_condition() const {
        return spec_.reset.active == ir::ResetActive::High ? spec_.reset.name
                                                           : "!" + spec_.reset.name;
    }

    void emit_sequential_block() {
        std::string sensitivity =
            (spec_.clock.edge == ir::ClockEdge::Rising ? "posedge " : "negedge ") +
            spec_.clock.name;
        if (spec_.reset.kind == ir::ResetKind::Asynchronous)
            sensitivity += (spec_.reset.active == ir::ResetActive::High ? " or posedge "
                                                                        : " or negedge ") +
                           spec_.reset.name;
        line("  always @(" + sensitivity + ") begin");
        line("    if (" + reset_condition() + ") begin");
        std::size_t initial_idx = *spec_.state_index(spec_.initial);
        line("      " + names_.state_reg + " <= " + names_.state_params[initial_idx] + ";");
        for (const auto& r : spec_.registers)
            line("      " + r.name + " <= " + sized_literal(r.reset_value, r.width) + ";");
        line("    end else begin");
        line("      " + names_.state_reg + " <= " + names_.state_reg + names_.next_suffix + ";");
        for (const auto& r : spec_.registers)
            line("      " + r.name + " <= " + r.name + names_.next_suffix + ";");
        line("    end");
        line("  end");
        line();
    }

    // Emits the first-match if/else chain of one state's transitions. The
    // body writer receives the transition; empty branches keep priority
    // ordering intact.
    void emit_transition_chain(const std::vector<ir::Transition>& transitions,
                               const std::string& indent,
                               const std::function<void(const ir::Transition&)>& body) {
        for (std::size_t j = 0; j < transitions.size(); ++j) {
            const auto& t = transitions[j];
            bool last = j + 1 == transitions.size();
            if (j == 0) {
                if (last && t.guard->is_const_true()) {
                    body(t);
                    return;
                }
                line(indent + "if (" + verilog_expr(t.guard) + ") begin");
            } else if (last && t.guard->is_const_true()) {
                line(indent + "end else begin");
            } else {
                line(indent + "end else if (" + verilog_expr(t.guard) + ") begin");
            }
            body(t);
            if (last) line(indent + "end");
        }
    }

    void emit_next_state_block() {
        line("  always @(*) begin");
        line("    " + names_.state_reg + names_.next_suffix + " = " + names_.state_reg + ";");
        for (const auto& r : spec_.registers)
            line("    " + r.name + names_.next_suffix + " = " + r.name + ";");
        line("    case (" + names_.state_reg + ")");
        for (std::size_t i = 0; i < spec_.states.size(); ++i) {
            const auto& s = spec_.states[i];
            line("      " + names_.state_params[i] + ": begin");
            emit_transition_chain(s.transitions, "        ", [&](const ir::Transition& t) {
                std::size_t target_idx = *spec_.state_index(t.target);
                line("          " + names_.state_reg + names_.next_suffix + " = " +
                     names_.state_params[target_idx] + ";");
                for (const auto& [dest, value] : t.actions)
                    if (spec_.find_register(dest))
                        line("          " + dest + names_.next_suffix + " = " +
                             verilog_expr(value) + ";");
            });
            line("      end");
        }
        line("      default: begin");
        line("        " + names_.state_reg + names_.next_suffix + " = " +
             names_.state_params[*spec_.state_index(spec_.initial)] + ";");
        line("      end");
        line("    endcase");
        line("  end");
        line();
    }

    void emit_output_block() {
        if (spec_.outputs.empty()) return;
        line("  always @(*) begin");
        for (const auto& o : spec_.outputs)
            line("    " + o.name + " = " + sized_literal(0, o.width) + ";");
        line("    case (" + names_.state_reg + ")");
        for (std::size_t i = 0; i < spec_.states.size(); ++i) {
            const auto& s = spec_.states[i];
            line("      " + names_.state_params[i] + ": begin");
            for (const auto& [out_name, value] : s.moore)
                line("        " + out_name + " = " +
                     sized_literal(value, spec_.find_output(out_name)->width) + ";");
            emit_transition_chain(s.transitions, "        ", [&](const ir::Transition& t) {
                for (const auto& [dest, value] : t.actions)
                    if (spec_.find_output(dest))
                        line("          " + dest + " = " + verilog_expr(value) + ";");
            });
            line("      end");
        }
        line("      default: begin");
        line("      end");
        line("    endcase");
        line("  end");
        line();
    }

    const ir::FsmSpec& spec_;
    const EncodingMap& enc_;
    Naming names_;
    bool header_;
    std::ostringstream out_;
};

}  // namespace

Result<ir::FsmSpec> apply_emit_options(const ir::FsmSpec& spec, const EmitOptions& opts) {
    ir::FsmSpec merged = spec;
    if (opts.clock_name) merged.clock.name = *opts.clock_name;
    if (opts.clock_edge) merged.clock.edge = *opts.clock_edge;
    if (opts.reset_name) merged.reset.name = *opts.reset_name;
    if (opts.reset_active) merged.reset.active = *opts.reset_active;
    if (opts.reset_kind) merged.reset.kind = *opts.reset_kind;
    if (opts.encoding) merged.encoding = *opts.encoding;
    auto diags = ir::validate(merged);
    if (!diags.empty()) return Result<ir::FsmSpec>::failure(std::move(diags));
    return Result<ir::FsmSpec>::success(std::move(merged));
}

std::string emit_verilog(const ir::FsmSpec& spec, const EmitOptions& opts) {
    auto merged = apply_emit_options(spec, opts);
    if (!merged.ok())
        throw ContractError("E_EMIT_INTERNAL",
                            "spec does not validate: " + merged.diagnostics.front().code + " " +
                                merged.diagnostics.front().message);
    EncodingMap enc = encode_states(*merged, merged->encoding);
    return VerilogWriter(*merged, enc, opts.header).write();
}

}  // namespace fsmforge::codegen
