#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fsmforge/difftest.hpp"

namespace fsmforge::sim {

/// Command templates for an external simulator. Placeholders {workdir},
/// {dut}, {ref}, {test}, {main} and {exe} are substituted with absolute
/// paths before invocation. An empty compile_argv skips the compile step.
struct ToolConfig {
    std::string name;
    std::vector<std::string> compile_argv;
    std::vector<std::string> run_argv;
    int timeout_ms = 60000;
};

ToolConfig iverilog_config();
ToolConfig verilator_config();

/// The four generated sources, each as (file name, content).
struct ExternalFiles {
    std::string dut_name = "dut.v";
    std::string dut;
    std::string ref_name = "ref.cpp";
    std::string ref;
    std::string test_name = "test.cpp";
    std::string test;
    std::string main_name = "main.cpp";
    std::string main;
};

struct ProcessResult {
    int exit_code = 0;
    std::string out;
    std::string err;
    bool timed_out = false;
};

/// Runs a command with captured stdout/stderr and a wall-clock timeout.
/// Throws ContractError(E_TOOL_MISSING) when the executable cannot be
/// resolved.
ProcessResult run_process(const std::vector<std::string>& argv,
                          const std::filesystem::path& cwd, int timeout_ms);

/// Parses one generated main program's output: "TRACE cycle=<n> in.<x>=<v>
/// ... state=<s> reg.<r>=<v> ... ref.<o>=<v> ... dut.<o>=<v>" lines feeding
/// the error trace, and the "MISMATCH cycle=<n> signal=<s> expected=<v>
/// actual=<v>" marker deciding the verdict.
Verdict parse_sim_output(const std::string& output);

/// Writes the files into workdir, compiles and runs the configured tool.
/// Nonzero compile exit maps to COMPILE_ERROR carrying the tool output
/// verbatim; a mismatch marker in the run output maps to MISMATCH; PASS
/// otherwise. Throws ContractError(E_TOOL_MISSING) or
/// ContractError(E_TIMEOUT).
Verdict run_external_sim(const std::filesystem::path& workdir, const ExternalFiles& files,
                         const ToolConfig& tool);

}  // namespace fsmforge::sim
