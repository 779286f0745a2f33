#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fsmforge/benchio.hpp"
#include "fsmforge/difftest.hpp"
#include "fsmforge/emit.hpp"
#include "fsmforge/exec.hpp"
#include "fsmforge/external.hpp"
#include "fsmforge/netlist.hpp"
#include "fsmforge/pipeline.hpp"
#include "fsmforge/randspec.hpp"
#include "fsmforge/version.hpp"

namespace {

namespace fs = std::filesystem;
using namespace fsmforge;
using ordered_json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;  // validation failure, mismatch, ...
constexpr int kExitUsage = 2;   // I/O or usage errors

struct GlobalFlags {
    bool json = false;
    bool quiet = false;
    std::uint64_t seed = 0;
};

std::optional<std::string> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// temp file + rename, so readers never observe partial output
bool atomic_write(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) return false;
        out << content;
        if (!out) return false;
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    return !ec;
}

ordered_json diag_json(const Diagnostic& d) {
    return ordered_json{{"severity", severity_name(d.severity)},
                        {"code", d.code},
                        {"path", d.path},
                        {"message", d.message}};
}

void print_diags(const std::vector<Diagnostic>& diags, std::ostream& out) {
    for (const auto& d : diags)
        out << severity_name(d.severity) << " " << d.code << " "
            << (d.path.empty() ? "-" : d.path) << " " << d.message << "\n";
}

std::string format4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

// Loads an executable model from an IR document (.json) or emitted Verilog
// (anything else). Returns nullptr after printing diagnostics.
std::unique_ptr<sim::ExecModel> load_model(const fs::path& path) {
    auto text = read_file(path);
    if (!text) {
        std::cerr << "error: cannot read '" << path.string() << "'\n";
        return nullptr;
    }
    if (path.extension() == ".json") {
        auto spec = ir::parse_ir(*text);
        if (!spec.ok()) {
            print_diags(spec.diagnostics, std::cerr);
            return nullptr;
        }
        return sim::interpret(*spec);
    }
    auto netlist = codegen::parse_emitted_verilog(*text);
    if (!netlist.ok()) {
        print_diags(netlist.diagnostics, std::cerr);
        return nullptr;
    }
    return sim::netlist_model(std::move(*netlist));
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

int cmd_validate(const fs::path& ir_path, const GlobalFlags& flags) {
    auto text = read_file(ir_path);
    if (!text) {
        std::cerr << "error: cannot read '" << ir_path.string() << "'\n";
        return kExitUsage;
    }
    auto spec = ir::parse_ir(*text);
    std::vector<Diagnostic> diags = spec.diagnostics;
    if (spec.ok()) {
        auto warnings = ir::lint(*spec);
        diags.insert(diags.end(), warnings.begin(), warnings.end());
    }
    if (flags.json) {
        ordered_json doc{{"ok", spec.ok()}, {"diagnostics", ordered_json::array()}};
        for (const auto& d : diags) doc["diagnostics"].push_back(diag_json(d));
        std::cout << doc.dump(2) << "\n";
    } else if (!flags.quiet) {
        print_diags(diags, spec.ok() ? std::cout : std::cerr);
    }
    return spec.ok() ? kExitOk : kExitDomain;
}

// ---------------------------------------------------------------------------
// compile
// ---------------------------------------------------------------------------

int cmd_compile(const fs::path& ir_path, const fs::path& out_path,
                const codegen::EmitOptions& opts, bool yaml, const GlobalFlags& flags) {
    auto text = read_file(ir_path);
    if (!text) {
        std::cerr << "error: cannot read '" << ir_path.string() << "'\n";
        return kExitUsage;
    }
    auto spec = ir::parse_ir(*text);
    if (!spec.ok()) {
        print_diags(spec.diagnostics, std::cerr);
        return kExitDomain;
    }
    auto merged = codegen::apply_emit_options(*spec, opts);
    if (!merged.ok()) {
        print_diags(merged.diagnostics, std::cerr);
        return kExitDomain;
    }
    std::string output;
    if (yaml) {
        auto y = codegen::emit_yaml(*merged);
        if (!y.ok()) {
            print_diags(y.diagnostics, std::cerr);
            return kExitDomain;
        }
        output = *y;
    } else {
        codegen::EmitOptions emit_only;  // overrides already merged into the spec
        emit_only.header = opts.header;
        output = codegen::emit_verilog(*merged, emit_only);
    }
    if (!atomic_write(out_path, output)) {
        std::cerr << "error: cannot write '" << out_path.string() << "'\n";
        return kExitUsage;
    }
    if (flags.json) {
        ordered_json doc{{"ok", true},
                         {"output", out_path.string()},
                         {"bytes", output.size()},
                         {"format", yaml ? "yaml" : "verilog"}};
        std::cout << doc.dump(2) << "\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

int cmd_simulate(const fs::path& path, std::size_t cycles, std::uint64_t seed,
                 const GlobalFlags& flags) {
    auto model = load_model(path);
    if (!model) return kExitUsage;
    sim::Stimulus stim = sim::gen_stimuli(seed, cycles, model->ports().inputs);
    model->reset();

    ordered_json rows = ordered_json::array();
    std::vector<std::string> lines;
    for (std::size_t c = 0; c < cycles; ++c) {
        sim::Internals before = model->internals();
        sim::Valuation out = model->step(stim.cycles[c]);
        if (flags.json) {
            ordered_json row{{"cycle", c},
                             {"inputs", stim.cycles[c]},
                             {"state", before.state_name},
                             {"registers", before.registers},
                             {"outputs", out}};
            rows.push_back(std::move(row));
        } else {
            std::ostringstream line;
            line << c << ": state=" << before.state_name;
            for (const auto& [k, v] : stim.cycles[c]) line << " " << k << "=" << v;
            for (const auto& [k, v] : before.registers) line << " " << k << "=" << v;
            line << " ->";
            for (const auto& [k, v] : out) line << " " << k << "=" << v;
            lines.push_back(line.str());
        }
    }
    if (flags.json) {
        ordered_json doc{{"seed", seed}, {"algorithm", stim.algorithm}, {"cycles", rows}};
        std::cout << doc.dump(2) << "\n";
    } else if (!flags.quiet) {
        for (const auto& l : lines) std::cout << l << "\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// difftest
// ---------------------------------------------------------------------------

ordered_json trace_json(const sim::ErrorTrace& trace) {
    ordered_json entries = ordered_json::array();
    for (const auto& e : trace.entries)
        entries.push_back(ordered_json{{"cycle", e.cycle},
                                       {"inputs", e.inputs},
                                       {"state", e.ref_state},
                                       {"registers", e.ref_registers},
                                       {"ref_outputs", e.ref_outputs},
                                       {"dut_outputs", e.dut_outputs}});
    return ordered_json{{"entries", entries},
                        {"mismatch_cycle", trace.mismatch_cycle},
                        {"signal", trace.signal},
                        {"expected", trace.expected},
                        {"actual", trace.actual}};
}

int cmd_difftest(const fs::path& ref_path, const fs::path& dut_path, std::size_t cycles,
                 std::uint64_t seed, std::size_t capacity, const GlobalFlags& flags) {
    auto ref = load_model(ref_path);
    if (!ref) return kExitUsage;
    auto dut = load_model(dut_path);
    if (!dut) return kExitUsage;
    sim::Stimulus stim = sim::gen_stimuli(seed, cycles, ref->ports().inputs);
    sim::Verdict verdict;
    try {
        verdict = sim::difftest(*ref, *dut, stim, capacity);
    } catch (const ContractError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    if (flags.json) {
        ordered_json doc{{"verdict", sim::verdict_name(verdict.kind)},
                         {"seed", seed},
                         {"cycles", cycles}};
        if (verdict.kind == sim::Verdict::Kind::Mismatch)
            doc["trace"] = trace_json(verdict.trace);
        std::cout << doc.dump(2) << "\n";
    } else if (verdict.kind == sim::Verdict::Kind::Mismatch) {
        std::cout << sim::format_trace(verdict.trace);
    } else if (!flags.quiet) {
        std::cout << "PASS\n";
    }
    return verdict.passed() ? kExitOk : kExitDomain;
}

// ---------------------------------------------------------------------------
// score
// ---------------------------------------------------------------------------

struct ScoredProblem {
    std::string id;
    bench::FsmFeatures features;
    double score = 0.0;
    bench::Difficulty difficulty = bench::Difficulty::Easy;
};

Result<std::vector<ScoredProblem>> score_benchmark(const bench::LoadedBenchmark& loaded) {
    std::vector<ScoredProblem> scored;
    bench::FsmFeatures maxima;
    std::vector<std::pair<std::string, bench::FsmFeatures>> feats;
    for (const auto& p : loaded.problems) {
        if (!p.reference_ir) continue;  // scoring needs the IR's S and E
        auto f = bench::count_fsm_features(*p.reference_ir, p.reference_source);
        maxima.lines = std::max(maxima.lines, f.lines);
        maxima.states = std::max(maxima.states, f.states);
        maxima.transitions = std::max(maxima.transitions, f.transitions);
        feats.emplace_back(p.id, f);
    }
    for (const auto& [id, f] : feats) {
        ScoredProblem sp;
        sp.id = id;
        sp.features = f;
        sp.score = bench::complexity_score(f, maxima);
        sp.difficulty = bench::classify(sp.score);
        scored.push_back(std::move(sp));
    }
    return Result<std::vector<ScoredProblem>>::success(std::move(scored));
}

int cmd_score(const fs::path& root, const GlobalFlags& flags) {
    auto loaded = bench::load_benchmark(root);
    for (const auto& d : loaded.diagnostics)
        if (d.code == "E_NO_ROOT") {
            print_diags(loaded.diagnostics, std::cerr);
            return kExitUsage;
        }
    auto scored = score_benchmark(loaded);
    std::map<std::string, std::size_t> counts{{"easy", 0}, {"medium", 0}, {"hard", 0}};
    for (const auto& sp : *scored) ++counts[bench::difficulty_name(sp.difficulty)];

    if (flags.json) {
        ordered_json rows = ordered_json::array();
        for (const auto& sp : *scored)
            rows.push_back(ordered_json{{"id", sp.id},
                                        {"lines", sp.features.lines},
                                        {"states", sp.features.states},
                                        {"transitions", sp.features.transitions},
                                        {"score", sp.score},
                                        {"difficulty", bench::difficulty_name(sp.difficulty)}});
        ordered_json doc{{"problems", rows}, {"counts", counts}};
        if (!loaded.diagnostics.empty()) {
            doc["diagnostics"] = ordered_json::array();
            for (const auto& d : loaded.diagnostics) doc["diagnostics"].push_back(diag_json(d));
        }
        std::cout << doc.dump(2) << "\n";
    } else {
        print_diags(loaded.diagnostics, std::cerr);
        std::cout << "id lines states transitions score difficulty\n";
        for (const auto& sp : *scored)
            std::cout << sp.id << " " << sp.features.lines << " " << sp.features.states << " "
                      << sp.features.transitions << " " << format4(sp.score) << " "
                      << bench::difficulty_name(sp.difficulty) << "\n";
        std::cout << "counts: easy " << counts["easy"] << ", medium " << counts["medium"]
                  << ", hard " << counts["hard"] << "\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// metrics
// ---------------------------------------------------------------------------

std::map<std::string, bench::Difficulty> difficulty_map(const fs::path& bench_root) {
    std::map<std::string, bench::Difficulty> result;
    if (bench_root.empty()) return result;
    auto loaded = bench::load_benchmark(bench_root);
    auto scored = score_benchmark(loaded);
    for (const auto& sp : *scored) result[sp.id] = sp.difficulty;
    return result;
}

void print_report(const bench::BenchReport& report, const GlobalFlags& flags) {
    if (flags.json) {
        ordered_json doc{{"problems", report.problems},
                         {"attempts_per_problem", report.attempts_per_problem},
                         {"syntax_error_rate", report.syntax_error_rate}};
        ordered_json pass = ordered_json::object();
        for (const auto& [k, v] : report.pass_at) pass["pass@" + std::to_string(k)] = v;
        doc["pass_at"] = pass;
        if (!report.by_difficulty.empty()) {
            ordered_json buckets = ordered_json::object();
            for (const auto& [name, b] : report.by_difficulty)
                buckets[name] = ordered_json{
                    {"problems", b.problems}, {"passed", b.passed}, {"pass@1", b.pass_at_1}};
            doc["by_difficulty"] = buckets;
        }
        std::cout << doc.dump(2) << "\n";
        return;
    }
    std::cout << "problems: " << report.problems
              << "  attempts/problem: " << report.attempts_per_problem << "\n";
    for (const auto& [k, v] : report.pass_at)
        std::cout << "pass@" << k << ": " << format4(v) << "\n";
    std::cout << "syntax error rate: " << format4(report.syntax_error_rate) << "\n";
    if (!report.by_difficulty.empty()) {
        std::cout << "by difficulty (pass@1):\n";
        for (const auto& [name, b] : report.by_difficulty)
            std::cout << "  " << name << " " << b.passed << "/" << b.problems << " "
                      << format4(b.pass_at_1) << "\n";
    }
}

int cmd_metrics(const fs::path& results_path, const std::vector<std::uint64_t>& ks,
                const fs::path& bench_root, const GlobalFlags& flags) {
    auto records = bench::load_results(results_path);
    if (!records.ok()) {
        print_diags(records.diagnostics, std::cerr);
        return kExitUsage;
    }
    auto report = bench::make_report(*records, ks, difficulty_map(bench_root));
    print_report(report, flags);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// bench-run
// ---------------------------------------------------------------------------

struct BackendSpec {
    std::string kind;  // "http" | "script"
    fs::path script_path;
    agent::HttpBackendConfig http;
};

// script fixture forms: a flat response list shared across the whole run
// (forces --jobs 1), or {"problems": {id: [...]}, "repeat_last": bool} with
// one independent sequence per problem.
struct ScriptFixture {
    bool per_problem = false;
    std::vector<std::string> shared;
    bool shared_repeat_last = false;
    std::map<std::string, std::vector<std::string>> per_problem_responses;
    bool per_problem_repeat_last = false;
};

Result<ScriptFixture> load_script_fixture(const fs::path& path) {
    auto text = read_file(path);
    if (!text)
        return Result<ScriptFixture>::failure(
            make_error("E_NO_ROOT", "cannot open script '" + path.string() + "'", ""));
    ScriptFixture fixture;
    std::size_t start = text->find_first_not_of(" \t\r\n");
    if (start != std::string::npos && (*text)[start] == '{') {
        ordered_json doc;
        try {
            doc = ordered_json::parse(*text);
        } catch (const nlohmann::json::parse_error& e) {
            return Result<ScriptFixture>::failure(make_error("E_JSON", e.what(), ""));
        }
        if (doc.contains("problems")) {
            fixture.per_problem = true;
            fixture.per_problem_repeat_last = doc.value("repeat_last", false);
            for (auto it = doc["problems"].begin(); it != doc["problems"].end(); ++it) {
                std::vector<std::string> responses;
                for (const auto& r : it.value()) responses.push_back(r.get<std::string>());
                fixture.per_problem_responses[it.key()] = std::move(responses);
            }
            return Result<ScriptFixture>::success(std::move(fixture));
        }
    }
    auto backend = agent::ScriptedBackend::from_text(*text);
    if (!backend.ok()) return Result<ScriptFixture>::failure(backend.diagnostics);
    // Re-read the raw list so per-run backends can be instantiated later.
    ordered_json doc;
    if (start != std::string::npos && ((*text)[start] == '[' || (*text)[start] == '{')) {
        doc = ordered_json::parse(*text);
        if (doc.is_object()) {
            fixture.shared_repeat_last = doc.value("repeat_last", false);
            for (const auto& r : doc["responses"]) fixture.shared.push_back(r.get<std::string>());
        } else {
            for (const auto& r : doc) fixture.shared.push_back(r.get<std::string>());
        }
    } else {
        // plain-text form: split on "---" lines
        std::istringstream in(*text);
        std::string line, current;
        while (std::getline(in, line)) {
            if (line == "---") {
                fixture.shared.push_back(current);
                current.clear();
            } else {
                if (!current.empty()) current += "\n";
                current += line;
            }
        }
        if (!current.empty() || fixture.shared.empty()) fixture.shared.push_back(current);
    }
    return Result<ScriptFixture>::success(std::move(fixture));
}

void dump_transcript(const fs::path& dir, const bench::RunRecord& rec,
                     const std::vector<agent::TranscriptEntry>& transcript) {
    fs::create_directories(dir);
    ordered_json entries = ordered_json::array();
    for (const auto& e : transcript)
        entries.push_back(ordered_json{{"role", agent::agent_role_name(e.role)},
                                       {"action", e.action},
                                       {"request_digest", e.request_digest},
                                       {"response_digest", e.response_digest},
                                       {"timestamp_ms", e.timestamp_ms}});
    ordered_json doc{{"problem", rec.problem_id}, {"attempt", rec.attempt}, {"entries", entries}};
    std::ofstream out(dir / (rec.problem_id + "-" + std::to_string(rec.attempt) + ".json"),
                      std::ios::binary);
    out << doc.dump(2) << "\n";
}

int cmd_bench_run(const fs::path& root, const BackendSpec& backend_spec,
                  const agent::PipelineConfig& base_config, std::uint64_t attempts,
                  const std::vector<std::uint64_t>& ks, const fs::path& out_path,
                  std::size_t seeds_per_run, std::size_t jobs, const fs::path& transcripts_dir,
                  const GlobalFlags& flags) {
    auto loaded = bench::load_benchmark(root);
    for (const auto& d : loaded.diagnostics)
        if (d.code == "E_NO_ROOT") {
            print_diags(loaded.diagnostics, std::cerr);
            return kExitUsage;
        }
    if (!flags.quiet && !flags.json) print_diags(loaded.diagnostics, std::cerr);

    ScriptFixture fixture;
    if (backend_spec.kind == "script") {
        auto loaded_fixture = load_script_fixture(backend_spec.script_path);
        if (!loaded_fixture.ok()) {
            print_diags(loaded_fixture.diagnostics, std::cerr);
            return kExitUsage;
        }
        fixture = std::move(*loaded_fixture);
    } else if (backend_spec.http.base_url.empty()) {
        std::cerr << "error: http backend requires a base URL (--base-url or "
                     "FSMFORGE_LLM_BASE_URL)\n";
        return kExitUsage;
    }

    bool shared_script = backend_spec.kind == "script" && !fixture.per_problem;
    std::size_t effective_jobs = shared_script ? 1 : std::max<std::size_t>(1, jobs);

    struct Task {
        const bench::BenchProblem* problem;
        std::uint64_t attempt;
    };
    std::vector<Task> tasks;
    for (const auto& p : loaded.problems)
        for (std::uint64_t a = 0; a < attempts; ++a) tasks.push_back({&p, a});

    std::vector<bench::RunRecord> records(tasks.size());
    std::vector<std::vector<agent::TranscriptEntry>> transcripts(tasks.size());
    std::mutex shared_mutex;
    std::unique_ptr<agent::ScriptedBackend> shared_backend;
    if (shared_script)
        shared_backend = std::make_unique<agent::ScriptedBackend>(fixture.shared,
                                                                  fixture.shared_repeat_last);

    auto run_task = [&](std::size_t index) {
        const Task& task = tasks[index];
        agent::PipelineConfig config = base_config;
        config.stimulus_seeds =
            agent::derive_seeds(flags.seed + task.attempt, task.problem->id, seeds_per_run);
        if (config.mode == agent::PipelineConfig::Mode::External)
            config.workdir = base_config.workdir /
                             (task.problem->id + "-" + std::to_string(task.attempt));

        agent::PipelineResult result;
        if (backend_spec.kind == "script") {
            if (fixture.per_problem) {
                auto it = fixture.per_problem_responses.find(task.problem->id);
                std::vector<std::string> responses =
                    it == fixture.per_problem_responses.end() ? std::vector<std::string>{}
                                                              : it->second;
                agent::ScriptedBackend backend(std::move(responses),
                                               fixture.per_problem_repeat_last);
                result = agent::run_pipeline(*task.problem, backend, config);
            } else {
                std::lock_guard<std::mutex> lock(shared_mutex);
                result = agent::run_pipeline(*task.problem, *shared_backend, config);
            }
        } else {
            agent::HttpBackend backend(backend_spec.http);
            result = agent::run_pipeline(*task.problem, backend, config);
        }
        result.record.attempt = task.attempt;
        result.record.transcript =
            "t:" + agent::content_digest(task.problem->id + "#" + std::to_string(task.attempt));
        records[index] = std::move(result.record);
        transcripts[index] = std::move(result.transcript);
    };

    if (effective_jobs <= 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i) run_task(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        for (std::size_t w = 0; w < effective_jobs; ++w)
            workers.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1))
                    run_task(i);
            });
        for (auto& t : workers) t.join();
    }

    if (!out_path.empty()) bench::append_results(out_path, records);
    if (!transcripts_dir.empty())
        for (std::size_t i = 0; i < tasks.size(); ++i)
            dump_transcript(transcripts_dir, records[i], transcripts[i]);

    auto report = bench::make_report(records, ks, difficulty_map(root));
    print_report(report, flags);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FSM IR toolchain: compile, verify, score, and orchestrate"};
    app.set_version_flag("--version", std::string(kVersion));

    GlobalFlags flags;
    app.add_flag("--json", flags.json, "machine-readable JSON on stdout");
    app.add_flag("--quiet", flags.quiet, "suppress non-essential output");
    app.add_option("--seed", flags.seed, "global seed for derived randomness");

    // validate
    auto* validate = app.add_subcommand("validate", "Validate a JSON IR document");
    fs::path validate_path;
    validate->add_option("ir", validate_path, "IR file")->required();

    // compile
    auto* compile = app.add_subcommand("compile", "Compile IR to Verilog or YAML");
    fs::path compile_path, compile_out;
    codegen::EmitOptions emit_opts;
    bool yaml = false, no_header = false;
    std::string reset_active_str, reset_kind_str, clock_edge_str, encoding_str;
    std::string clock_override, reset_override;
    compile->add_option("ir", compile_path, "IR file")->required();
    compile->add_option("-o,--output", compile_out, "output file")->required();
    compile->add_option("--clock", clock_override, "clock signal name override");
    compile->add_option("--reset", reset_override, "reset signal name override");
    compile->add_option("--reset-active", reset_active_str, "high|low")
        ->check(CLI::IsMember({"high", "low"}));
    compile->add_option("--reset-kind", reset_kind_str, "sync|async")
        ->check(CLI::IsMember({"sync", "async"}));
    compile->add_option("--clock-edge", clock_edge_str, "rising|falling")
        ->check(CLI::IsMember({"rising", "falling"}));
    compile->add_option("--encoding", encoding_str, "binary|onehot")
        ->check(CLI::IsMember({"binary", "onehot"}));
    compile->add_flag("--yaml", yaml, "emit fsm2sv-style YAML instead of Verilog");
    compile->add_flag("--no-header", no_header, "omit the tool/version header comment");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Run a model on seeded random stimuli");
    fs::path simulate_path;
    std::size_t sim_cycles = 16;
    std::uint64_t sim_seed = 1;
    simulate->add_option("model", simulate_path, "IR (.json) or emitted Verilog")->required();
    simulate->add_option("--cycles", sim_cycles, "cycle count");
    simulate->add_option("--stim-seed", sim_seed, "stimulus seed");

    // difftest
    auto* diff = app.add_subcommand("difftest", "Compare two models cycle by cycle");
    fs::path ref_path, dut_path;
    std::size_t diff_cycles = 1000, diff_capacity = sim::kDefaultTraceCapacity;
    std::uint64_t diff_seed = 1;
    diff->add_option("ref", ref_path, "reference: IR (.json) or emitted Verilog")->required();
    diff->add_option("dut", dut_path, "DUT: IR (.json) or emitted Verilog")->required();
    diff->add_option("--cycles", diff_cycles, "cycle count");
    diff->add_option("--stim-seed", diff_seed, "stimulus seed");
    diff->add_option("--trace-capacity", diff_capacity, "error trace depth");

    // score
    auto* score = app.add_subcommand("score", "Score benchmark complexity (requires ir.json)");
    fs::path score_root;
    score->add_option("root", score_root, "benchmark root directory")->required();

    // metrics
    auto* metrics = app.add_subcommand("metrics", "Summarize a results JSON-lines file");
    fs::path metrics_results, metrics_bench;
    std::vector<std::uint64_t> metrics_ks{1};
    metrics->add_option("--results", metrics_results, "results .jsonl file")->required();
    metrics->add_option("--k", metrics_ks, "pass@k selection sizes");
    metrics->add_option("--bench", metrics_bench, "benchmark root for difficulty breakdown");

    // bench-run
    auto* bench_run = app.add_subcommand("bench-run", "Run the agent pipeline over a benchmark");
    fs::path bench_root, bench_out, bench_transcripts;
    std::string backend_arg = "http";
    agent::PipelineConfig pipeline_config;
    std::uint64_t attempts = 1;
    std::vector<std::uint64_t> bench_ks{1};
    std::size_t seeds_per_run = 2, jobs = 1;
    std::string mode_str = "native", tool_str = "iverilog";
    std::string model_name, base_url;
    bench_run->add_option("root", bench_root, "benchmark root directory")->required();
    bench_run->add_option("--backend", backend_arg, "http or script:<path>");
    bench_run->add_option("--budget", pipeline_config.budget, "agent actions per round");
    bench_run->add_option("--max-regens", pipeline_config.max_ir_regenerations,
                          "Extract<->Verify loop bound");
    bench_run->add_option("--attempts", attempts, "attempts per problem (n for pass@k)");
    bench_run->add_option("--k", bench_ks, "pass@k selection sizes");
    bench_run->add_option("--out", bench_out, "append RunRecords to this JSON-lines file");
    bench_run->add_option("--cycles", pipeline_config.cycles, "difftest cycles");
    bench_run->add_option("--stim-seeds", seeds_per_run, "stimulus seeds per candidate");
    bench_run->add_option("--trace-capacity", pipeline_config.trace_capacity,
                          "error trace depth");
    bench_run->add_option("--temperature", pipeline_config.temperature, "LLM temperature");
    bench_run->add_option("--jobs", jobs, "parallel problems");
    bench_run->add_option("--mode", mode_str, "native|external")
        ->check(CLI::IsMember({"native", "external"}));
    bench_run->add_option("--tool", tool_str, "external simulator: iverilog|verilator");
    bench_run->add_option("--workdir", pipeline_config.workdir, "external mode scratch dir");
    bench_run->add_option("--transcripts", bench_transcripts, "dump transcripts here");
    bench_run->add_option("--model", model_name, "backend model name");
    bench_run->add_option("--base-url", base_url, "backend base URL");

    app.require_subcommand(1);
    CLI11_PARSE(app, argc, argv);

    try {
        if (*validate) return cmd_validate(validate_path, flags);
        if (*compile) {
            if (!clock_override.empty()) emit_opts.clock_name = clock_override;
            if (!reset_override.empty()) emit_opts.reset_name = reset_override;
            if (reset_active_str == "high") emit_opts.reset_active = ir::ResetActive::High;
            if (reset_active_str == "low") emit_opts.reset_active = ir::ResetActive::Low;
            if (reset_kind_str == "sync") emit_opts.reset_kind = ir::ResetKind::Synchronous;
            if (reset_kind_str == "async") emit_opts.reset_kind = ir::ResetKind::Asynchronous;
            if (clock_edge_str == "rising") emit_opts.clock_edge = ir::ClockEdge::Rising;
            if (clock_edge_str == "falling") emit_opts.clock_edge = ir::ClockEdge::Falling;
            if (encoding_str == "binary") emit_opts.encoding = ir::Encoding::Binary;
            if (encoding_str == "onehot") emit_opts.encoding = ir::Encoding::Onehot;
            emit_opts.header = !no_header;
            return cmd_compile(compile_path, compile_out, emit_opts, yaml, flags);
        }
        if (*simulate) return cmd_simulate(simulate_path, sim_cycles, sim_seed, flags);
        if (*diff)
            return cmd_difftest(ref_path, dut_path, diff_cycles, diff_seed, diff_capacity, flags);
        if (*score) return cmd_score(score_root, flags);
        if (*metrics) return cmd_metrics(metrics_results, metrics_ks, metrics_bench, flags);
        if (*bench_run) {
            BackendSpec spec;
            if (backend_arg.rfind("script:", 0) == 0) {
                spec.kind = "script";
                spec.script_path = backend_arg.substr(7);
            } else if (backend_arg == "http") {
                spec.kind = "http";
                spec.http.model = model_name;
                const char* env_url = std::getenv("FSMFORGE_LLM_BASE_URL");
                const char* env_model = std::getenv("FSMFORGE_LLM_MODEL");
                spec.http.base_url = !base_url.empty() ? base_url : (env_url ? env_url : "");
                if (spec.http.model.empty() && env_model) spec.http.model = env_model;
            } else {
                std::cerr << "error: unknown backend '" << backend_arg << "'\n";
                return kExitUsage;
            }
            pipeline_config.mode = mode_str == "external"
                                       ? agent::PipelineConfig::Mode::External
                                       : agent::PipelineConfig::Mode::Native;
            pipeline_config.tool =
                tool_str == "verilator" ? sim::verilator_config() : sim::iverilog_config();
            if (pipeline_config.workdir.empty())
                pipeline_config.workdir = fs::temp_directory_path() / "fsmforge-bench";
            return cmd_bench_run(bench_root, spec, pipeline_config, attempts, bench_ks, bench_out,
                                 seeds_per_run, jobs, bench_transcripts, flags);
        }
    } catch (const ContractError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
