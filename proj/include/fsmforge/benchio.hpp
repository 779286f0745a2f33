#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fsmforge/metrics.hpp"
#include "fsmforge/spec.hpp"

namespace fsmforge::bench {

/// One benchmark entry: <root>/<id>/{prompt.txt, ref.v, test.v} plus an
/// optional ir.json reference spec.
struct BenchProblem {
    std::string id;
    std::string description;
    std::string reference_source;
    std::string testbench_source;
    std::optional<ir::FsmSpec> reference_ir;
};

enum class RunVerdict { Pass, FunctionalFail, SyntaxError, BudgetExhausted };

const char* run_verdict_name(RunVerdict v);
std::optional<RunVerdict> run_verdict_from(const std::string& name);

/// Outcome of one generation attempt, one JSON line in a results file.
struct RunRecord {
    std::string problem_id;
    std::uint64_t attempt = 0;
    RunVerdict verdict = RunVerdict::FunctionalFail;
    std::uint64_t iterations = 0;
    std::uint64_t syntax_error_iterations = 0;
    std::string transcript;  // transcript id or file path
    std::string error;       // optional machine failure detail (E_TOOL_MISSING, ...)

    bool operator==(const RunRecord&) const = default;
};

struct LoadedBenchmark {
    std::vector<BenchProblem> problems;  // sorted by id
    std::vector<Diagnostic> diagnostics;
};

/// Loads every complete problem under root, sorted by id regardless of
/// directory enumeration order. Incomplete subdirectories produce
/// E_INCOMPLETE diagnostics instead of being skipped silently; a missing
/// root produces E_NO_ROOT.
LoadedBenchmark load_benchmark(const std::filesystem::path& root);

std::string run_record_to_json(const RunRecord& rec);
Result<RunRecord> run_record_from_json(const std::string& line);

/// Reads a JSON-lines results file; blank lines are ignored.
Result<std::vector<RunRecord>> load_results(const std::filesystem::path& path);

/// Appends records to a JSON-lines results file through a single writer.
void append_results(const std::filesystem::path& path, const std::vector<RunRecord>& records);

struct DifficultyBucket {
    std::size_t problems = 0;
    std::size_t passed = 0;  // problems whose first attempt passed
    double pass_at_1 = 0.0;
};

/// Summary over a results file: pass@k for each requested k (expectation
/// over problems), the Eq-style syntax error rate, and, when difficulty
/// classes are supplied, the per-difficulty pass@1 breakdown.
struct BenchReport {
    std::size_t problems = 0;
    std::size_t attempts_per_problem = 0;
    std::vector<std::pair<std::uint64_t, double>> pass_at;
    double syntax_error_rate = 0.0;
    std::map<std::string, DifficultyBucket> by_difficulty;
};

BenchReport make_report(const std::vector<RunRecord>& records,
                        const std::vector<std::uint64_t>& ks,
                        const std::map<std::string, Difficulty>& difficulty_of = {});

}  // namespace fsmforge::bench
