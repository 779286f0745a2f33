#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fsmforge/backend.hpp"
#include "fsmforge/benchio.hpp"
#include "fsmforge/external.hpp"
#include "fsmforge/spec.hpp"

namespace fsmforge::agent {

enum class AgentRole { FsmExtractor, Verifier, Coder, Tester, Fixer, Judger };
const char* agent_role_name(AgentRole role);

enum class Phase { Extract, Verify, Codegen, Test, Judge, Fix, Done, FailedBudget };
const char* phase_name(Phase phase);

enum class FaultSide { ReferenceModel, Dut, Undetermined };

struct FaultAttribution {
    FaultSide side = FaultSide::Undetermined;
    std::string rationale;
};

/// Append-only audit log; one entry per budget action (backend call or
/// simulation run).
struct TranscriptEntry {
    AgentRole role = AgentRole::FsmExtractor;
    std::string action;  // "llm" | "difftest" | "external_sim"
    std::string request_digest;
    std::string response_digest;
    std::int64_t timestamp_ms = 0;
};

struct PipelineConfig {
    std::uint64_t budget = 20;              // actions per generation round
    std::uint64_t max_ir_regenerations = 3; // Extract<->Verify loop bound
    std::vector<std::uint64_t> stimulus_seeds = {1, 2};
    std::size_t cycles = 1000;
    std::size_t trace_capacity = 16;
    double temperature = 0.0;

    enum class Mode { Native, External } mode = Mode::Native;
    sim::ToolConfig tool;              // external mode only
    std::filesystem::path workdir;     // external mode scratch space
};

struct PipelineResult {
    bench::RunRecord record;
    std::vector<Phase> phases;  // every phase entry, in order
    std::vector<TranscriptEntry> transcript;
};

/// Drives the whole workflow for one problem: Extract -> Verify (regenerate
/// on reject, bounded) -> Codegen -> Test, with compile errors routed
/// straight to Fix and mismatches through Judge first. Every backend call
/// and every simulation run consumes one budget action; running out of
/// budget ends the run with a budget-exhausted verdict. Never throws for
/// flow reasons; infrastructure failures land in RunRecord.error.
PipelineResult run_pipeline(const bench::BenchProblem& problem, ChatBackend& backend,
                            const PipelineConfig& config);

struct VerifyOutcome {
    bool accepted = false;
    std::string reason;                    // verbatim REJECT reason
    std::vector<Diagnostic> diagnostics;   // structural gate findings
    int backend_calls = 0;
};

/// Structural gate (parse_ir) first, without the LLM; only structurally
/// valid documents reach the semantic ACCEPT/REJECT check. Throws
/// ContractError(E_CONTRACT) when the reply is unparseable after one
/// re-ask.
VerifyOutcome verify_ir(const std::string& ir_document, const std::string& description,
                        ChatBackend& backend, double temperature = 0.0);

/// Test-artifact set: a second, independent reference IR in native mode, or
/// the three verification sources in external mode.
struct TestArtifacts {
    std::optional<ir::FsmSpec> reference_spec;   // native mode
    std::optional<sim::ExternalFiles> files;     // external mode (dut filled by caller)
    int backend_calls = 0;
};

Result<TestArtifacts> build_test_artifacts(const std::string& description, ChatBackend& backend,
                                           PipelineConfig::Mode mode, double temperature = 0.0);

/// Prompts the backend with the rendered trace and both models; replies
/// starting with DUT/REFERENCE map to the corresponding side. Anything
/// unparseable after one re-ask falls back to blaming the DUT with
/// Undetermined recorded in the rationale.
FaultAttribution judge(const std::string& trace_text, const std::string& dut_ir,
                       const std::string& reference_text, ChatBackend& backend,
                       double temperature = 0.0);

/// One Fixer invocation: returns the full replacement artifact text. The
/// caller re-runs the structural gates and re-invokes on failure.
std::string fix(const std::string& artifact_kind, const std::string& artifact,
                const std::string& evidence, ChatBackend& backend, double temperature = 0.0);

/// Deterministic per-problem stimulus seeds from (global seed, problem id).
std::vector<std::uint64_t> derive_seeds(std::uint64_t global_seed, const std::string& problem_id,
                                        std::size_t count);

}  // namespace fsmforge::agent
