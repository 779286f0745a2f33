#include "fsmforge/benchio.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fsmforge::bench {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

const char* run_verdict_name(RunVerdict v) {
    switch (v) {
        case RunVerdict::Pass: return "pass";
        case RunVerdict::FunctionalFail: return "functional_fail";
        case RunVerdict::SyntaxError: return "syntax_error";
        case RunVerdict::BudgetExhausted: return "budget_exhausted";
    }
    return "?";
}

std::optional<RunVerdict> run_verdict_from(const std::string& name) {
    if (name == "pass") return RunVerdict::Pass;
    if (name == "functional_fail") return RunVerdict::FunctionalFail;
    if (name == "syntax_error") return RunVerdict::SyntaxError;
    if (name == "budget_exhausted") return RunVerdict::BudgetExhausted;
    return std::nullopt;
}

namespace {

std::optional<std::string> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

LoadedBenchmark load_benchmark(const fs::path& root) {
    LoadedBenchmark result;
    std::error_code ec;
    if (!fs::is_directory(root, ec)) {
        result.diagnostics.push_back(
            make_error("E_NO_ROOT", "benchmark root '" + root.string() + "' is not a directory",
                       ""));
        return result;
    }

    std::vector<std::string> ids;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (entry.is_directory()) ids.push_back(entry.path().filename().string());
    }
    std::sort(ids.begin(), ids.end());

    for (const auto& id : ids) {
        const fs::path dir = root / id;
        auto prompt = read_file(dir / "prompt.txt");
        auto ref = read_file(dir / "ref.v");
        auto test = read_file(dir / "test.v");
        std::vector<std::string> missing;
        if (!prompt) missing.push_back("prompt.txt");
        if (!ref) missing.push_back("ref.v");
        if (!test) missing.push_back("test.v");
        if (!missing.empty()) {
            std::string names;
            for (const auto& m : missing) names += (names.empty() ? "" : ", ") + m;
            result.diagnostics.push_back(
                make_error("E_INCOMPLETE", "problem '" + id + "' is missing: " + names, "/" + id));
            continue;
        }
        BenchProblem p;
        p.id = id;
        p.description = std::move(*prompt);
        p.reference_source = std::move(*ref);
        p.testbench_source = std::move(*test);
        if (auto ir_text = read_file(dir / "ir.json")) {
            auto parsed = ir::parse_ir(*ir_text);
            if (parsed.ok()) {
                p.reference_ir = std::move(*parsed);
            } else {
                for (auto d : parsed.diagnostics) {
                    d.path = "/" + id + "/ir.json" + d.path;
                    result.diagnostics.push_back(std::move(d));
                }
            }
        }
        result.problems.push_back(std::move(p));
    }
    return result;
}

std::string run_record_to_json(const RunRecord& rec) {
    ordered_json j;
    j["problem"] = rec.problem_id;
    j["attempt"] = rec.attempt;
    j["verdict"] = run_verdict_name(rec.verdict);
    j["iterations"] = rec.iterations;
    j["syntax_error_iterations"] = rec.syntax_error_iterations;
    j["transcript"] = rec.transcript;
    if (!rec.error.empty()) j["error"] = rec.error;
    return j.dump();
}

Result<RunRecord> run_record_from_json(const std::string& line) {
    ordered_json j;
    try {
        j = ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        return Result<RunRecord>::failure(make_error("E_JSON", e.what(), ""));
    }
    RunRecord rec;
    try {
        rec.problem_id = j.at("problem").get<std::string>();
        rec.attempt = j.at("attempt").get<std::uint64_t>();
        auto verdict = run_verdict_from(j.at("verdict").get<std::string>());
        if (!verdict)
            return Result<RunRecord>::failure(
                make_error("E_SCHEMA", "unknown verdict value", "/verdict"));
        rec.verdict = *verdict;
        rec.iterations = j.at("iterations").get<std::uint64_t>();
        rec.syntax_error_iterations = j.at("syntax_error_iterations").get<std::uint64_t>();
        rec.transcript = j.value("transcript", "");
        rec.error = j.value("error", "");
    } catch (const nlohmann::json::exception& e) {
        return Result<RunRecord>::failure(make_error("E_SCHEMA", e.what(), ""));
    }
    if (rec.syntax_error_iterations > rec.iterations)
        return Result<RunRecord>::failure(make_error(
            "E_SCHEMA", "syntax_error_iterations exceeds iterations", "/syntax_error_iterations"));
    return Result<RunRecord>::success(std::move(rec));
}

Result<std::vector<RunRecord>> load_results(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return Result<std::vector<RunRecord>>::failure(
            make_error("E_NO_ROOT", "cannot open '" + path.string() + "'", ""));
    std::vector<RunRecord> records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto rec = run_record_from_json(line);
        if (!rec.ok()) {
            auto diags = rec.diagnostics;
            for (auto& d : diags) d.path = "line " + std::to_string(lineno);
            return Result<std::vector<RunRecord>>::failure(std::move(diags));
        }
        records.push_back(std::move(*rec));
    }
    return Result<std::vector<RunRecord>>::success(std::move(records));
}

void append_results(const fs::path& path, const std::vector<RunRecord>& records) {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    for (const auto& rec : records) out << run_record_to_json(rec) << "\n";
}

BenchReport make_report(const std::vector<RunRecord>& records,
                        const std::vector<std::uint64_t>& ks,
                        const std::map<std::string, Difficulty>& difficulty_of) {
    BenchReport report;
    std::map<std::string, std::vector<const RunRecord*>> by_problem;
    for (const auto& rec : records) by_problem[rec.problem_id].push_back(&rec);

    report.problems = by_problem.size();
    for (auto& [id, group] : by_problem) {
        std::sort(group.begin(), group.end(),
                  [](const RunRecord* a, const RunRecord* b) { return a->attempt < b->attempt; });
        report.attempts_per_problem = std::max(report.attempts_per_problem, group.size());
    }

    for (std::uint64_t k : ks) {
        double sum = 0.0;
        std::size_t counted = 0;
        for (const auto& [id, group] : by_problem) {
            std::uint64_t n = group.size();
            if (k > n) continue;  // not enough attempts for this k
            std::uint64_t c = 0;
            for (const auto* rec : group)
                if (rec->verdict == RunVerdict::Pass) ++c;
            sum += pass_at_k(n, c, k);
            ++counted;
        }
        report.pass_at.emplace_back(k, counted ? sum / static_cast<double>(counted) : 0.0);
    }

    std::vector<std::vector<IterationCounts>> per_problem;
    for (const auto& [id, group] : by_problem) {
        std::vector<IterationCounts> counts;
        for (const auto* rec : group)
            if (rec->iterations >= 1)
                counts.push_back({rec->iterations, rec->syntax_error_iterations});
        if (!counts.empty()) per_problem.push_back(std::move(counts));
    }
    report.syntax_error_rate = per_problem.empty() ? 0.0 : syntax_error_rate(per_problem);

    if (!difficulty_of.empty()) {
        for (const auto& [id, group] : by_problem) {
            auto it = difficulty_of.find(id);
            std::string bucket =
                it == difficulty_of.end() ? "unclassified" : difficulty_name(it->second);
            auto& entry = report.by_difficulty[bucket];
            ++entry.problems;
            if (!group.empty() && group.front()->verdict == RunVerdict::Pass) ++entry.passed;
        }
        for (auto& [name, entry] : report.by_difficulty)
            entry.pass_at_1 = entry.problems
                                  ? static_cast<double>(entry.passed) /
                                        static_cast<double>(entry.problems)
                                  : 0.0;
    }
    return report;
}

}  // namespace fsmforge::bench
