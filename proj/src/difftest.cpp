#include "fsmforge/difftest.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace fsmforge::sim {

const char* verdict_name(Verdict::Kind kind) {
    switch (kind) {
        case Verdict::Kind::Pass: return "PASS";
        case Verdict::Kind::Mismatch: return "MISMATCH";
        case Verdict::Kind::CompileError: return "COMPILE_ERROR";
    }
    return "?";
}

Verdict difftest(ExecModel& reference, ExecModel& dut, const Stimulus& stim,
                 std::size_t trace_capacity) {
    if (!(reference.ports() == dut.ports())) {
        std::string msg = "reference and DUT port signatures differ";
        throw ContractError("E_PORT_MISMATCH", msg);
    }

    reference.reset();
    dut.reset();

    std::deque<TraceEntry> ring;
    for (std::size_t cycle = 0; cycle < stim.cycles.size(); ++cycle) {
        const Valuation& in = stim.cycles[cycle];
        Internals ref_view = reference.internals();
        Valuation ref_out = reference.step(in);
        Valuation dut_out = dut.step(in);

        TraceEntry entry{cycle, in, ref_out, ref_view.registers, ref_view.state_name, dut_out};
        ring.push_back(std::move(entry));
        if (ring.size() > trace_capacity) ring.pop_front();

        for (const auto& port : reference.ports().outputs) {
            std::uint64_t expected = ref_out.at(port.name);
            std::uint64_t actual = dut_out.at(port.name);
            if (expected != actual) {
                ErrorTrace trace;
                trace.entries.assign(ring.begin(), ring.end());
                trace.mismatch_cycle = cycle;
                trace.signal = port.name;
                trace.expected = expected;
                trace.actual = actual;
                return Verdict::mismatch(std::move(trace));
            }
        }
    }
    return Verdict::pass();
}

namespace {

std::string pad_left(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

}  // namespace

std::string format_trace(const ErrorTrace& trace) {
    if (trace.entries.empty()) return "(empty trace)\n";

    const TraceEntry& first = trace.entries.front();
    std::vector<std::string> headers{"cycle"};
    for (const auto& [name, _] : first.inputs) headers.push_back(name);
    headers.push_back("state");
    for (const auto& [name, _] : first.ref_registers) headers.push_back(name);
    std::size_t ref_out_col = headers.size();
    for (const auto& [name, _] : first.ref_outputs) headers.push_back("ref:" + name);
    std::size_t dut_out_col = headers.size();
    for (const auto& [name, _] : first.dut_outputs) headers.push_back("dut:" + name);

    std::vector<std::vector<std::string>> rows;
    for (const auto& e : trace.entries) {
        std::vector<std::string> row{std::to_string(e.cycle)};
        for (const auto& [_, v] : e.inputs) row.push_back(std::to_string(v));
        row.push_back(e.ref_state);
        for (const auto& [_, v] : e.ref_registers) row.push_back(std::to_string(v));
        for (const auto& [_, v] : e.ref_outputs) row.push_back(std::to_string(v));
        std::size_t col = dut_out_col;
        for (const auto& [name, v] : e.dut_outputs) {
            bool marked = e.cycle == trace.mismatch_cycle && name == trace.signal;
            row.push_back(marked ? "*" + std::to_string(v) + "*" : std::to_string(v));
            ++col;
        }
        rows.push_back(std::move(row));
    }
    (void)ref_out_col;

    std::vector<std::size_t> widths(headers.size());
    for (std::size_t i = 0; i < headers.size(); ++i) widths[i] = headers[i].size();
    for (const auto& row : rows)
        for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());

    std::ostringstream out;
    auto emit_row = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << " | ";
            out << pad_left(row[i], widths[i]);
        }
        out << "\n";
    };
    emit_row(headers);
    for (std::size_t i = 0; i < headers.size(); ++i) {
        if (i) out << "-+-";
        out << std::string(widths[i], '-');
    }
    out << "\n";
    for (const auto& row : rows) emit_row(row);
    out << "MISMATCH cycle=" << trace.mismatch_cycle << " signal=" << trace.signal
        << " expected=" << trace.expected << " actual=" << trace.actual << "\n";
    return out.str();
}

}  // namespace fsmforge::sim
