#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fsmforge/diag.hpp"
#include "fsmforge/expr.hpp"

namespace fsmforge::ir {

enum class ClockEdge { Rising, Falling };
enum class ResetActive { High, Low };
enum class ResetKind { Synchronous, Asynchronous };
enum class Encoding { Binary, Onehot };

struct ClockSpec {
    std::string name = "clk";
    ClockEdge edge = ClockEdge::Rising;
    bool operator==(const ClockSpec&) const = default;
};

struct ResetSpec {
    std::string name = "rst";
    ResetActive active = ResetActive::High;
    ResetKind kind = ResetKind::Synchronous;
    bool operator==(const ResetSpec&) const = default;
};

struct SignalDecl {
    std::string name;
    int width = 1;
    bool operator==(const SignalDecl&) const = default;
};

struct RegisterDecl {
    std::string name;
    int width = 1;
    std::uint64_t reset_value = 0;
    bool operator==(const RegisterDecl&) const = default;
};

/// One guarded edge. Actions assign Mealy outputs and register updates,
/// keyed by destination name (kept sorted for canonical form).
struct Transition {
    ExprPtr guard;  // never null; always-true for unconditional edges
    std::string target;
    std::vector<std::pair<std::string, ExprPtr>> actions;

    bool operator==(const Transition& o) const;
};

struct StateDef {
    std::string name;
    std::vector<std::pair<std::string, std::uint64_t>> moore;  // output -> constant, sorted
    std::vector<Transition> transitions;  // evaluated in listed order, first match wins

    bool operator==(const StateDef&) const = default;
};

struct FsmSpec {
    std::string name;
    ClockSpec clock;
    ResetSpec reset;
    std::vector<SignalDecl> inputs;
    std::vector<SignalDecl> outputs;
    std::vector<RegisterDecl> registers;
    std::string initial;
    Encoding encoding = Encoding::Binary;
    std::vector<StateDef> states;

    bool operator==(const FsmSpec&) const = default;

    std::optional<std::size_t> state_index(const std::string& state_name) const;
    const SignalDecl* find_output(const std::string& output_name) const;
    const RegisterDecl* find_register(const std::string& register_name) const;
    /// Widths of every name a guard or action value may reference.
    WidthMap reference_widths() const;
    std::size_t transition_count() const;
};

/// Parses and fully validates a JSON IR document. Never partially succeeds:
/// the returned spec satisfies every invariant, or at least one diagnostic
/// explains why (E_JSON, E_SCHEMA, E_EXPR, plus all validate codes).
Result<FsmSpec> parse_ir(const std::string& text);

/// Structural invariant check; empty iff the spec is valid. Deterministic
/// and order-stable.
std::vector<Diagnostic> validate(const FsmSpec& spec);

/// Quality warnings (W_UNREACHABLE, W_DEAD_TRANSITION, W_NO_EXIT,
/// W_WIDTH_TRUNCATE). Requires a spec that validates cleanly.
std::vector<Diagnostic> lint(const FsmSpec& spec);

/// Canonical JSON form: schema-ordered keys, sorted action/moore maps,
/// two-space indent, trailing newline. parse_ir(serialize(s)) == s.
std::string serialize(const FsmSpec& spec);

bool is_valid_identifier(const std::string& name);
bool is_reserved_word(const std::string& name);

const char* encoding_name(Encoding e);

}  // namespace fsmforge::ir
