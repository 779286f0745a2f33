#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fsmforge/exec.hpp"
#include "fsmforge/stimulus.hpp"

namespace fsmforge::sim {

/// One simulated cycle as recorded for repair feedback: the stimulus, the
/// reference model's view, and the DUT outputs.
struct TraceEntry {
    std::size_t cycle = 0;
    Valuation inputs;
    Valuation ref_outputs;
    Valuation ref_registers;
    std::string ref_state;
    Valuation dut_outputs;
};

/// The most recent cycles (at most `capacity`) ending at the mismatching
/// cycle. Empty iff the verdict is PASS.
struct ErrorTrace {
    std::vector<TraceEntry> entries;
    std::size_t mismatch_cycle = 0;
    std::string signal;
    std::uint64_t expected = 0;
    std::uint64_t actual = 0;
};

inline constexpr std::size_t kDefaultTraceCapacity = 16;

struct Verdict {
    enum class Kind { Pass, Mismatch, CompileError };
    Kind kind = Kind::Pass;
    ErrorTrace trace;                     // Mismatch only
    std::vector<Diagnostic> diagnostics;  // CompileError only

    bool passed() const { return kind == Kind::Pass; }

    static Verdict pass() { return Verdict{}; }
    static Verdict mismatch(ErrorTrace t) {
        return Verdict{Kind::Mismatch, std::move(t), {}};
    }
    static Verdict compile_error(std::vector<Diagnostic> diags) {
        return Verdict{Kind::CompileError, {}, std::move(diags)};
    }
};

const char* verdict_name(Verdict::Kind kind);

/// Resets both models, steps them in lockstep over the stimulus, and halts
/// at the first cycle where any output differs. Reference internals are
/// ring-buffered every cycle; on mismatch the last <= capacity cycles become
/// the error trace. Throws ContractError(E_PORT_MISMATCH) when the two
/// models' signatures differ.
Verdict difftest(ExecModel& reference, ExecModel& dut, const Stimulus& stim,
                 std::size_t trace_capacity = kDefaultTraceCapacity);

/// Stable tabular rendering: one row per cycle with the inputs, reference
/// state/registers/outputs and DUT outputs; the mismatching DUT cell is the
/// only value wrapped in asterisks. Ends with the
/// "MISMATCH cycle=... signal=... expected=... actual=..." summary line.
std::string format_trace(const ErrorTrace& trace);

}  // namespace fsmforge::sim
