#include "fsmforge/pipeline.hpp"

#include <chrono>

#include <nlohmann/json.hpp>

#include "fsmforge/emit.hpp"
#include "fsmforge/exec.hpp"
#include "fsmforge/prompts.hpp"
#include "fsmforge/stimulus.hpp"

namespace fsmforge::agent {

using nlohmann::json;

const char* agent_role_name(AgentRole role) {
    switch (role) {
        case AgentRole::FsmExtractor: return "FSMExtractor";
        case AgentRole::Verifier: return "Verifier";
        case AgentRole::Coder: return "Coder";
        case AgentRole::Tester: return "Tester";
        case AgentRole::Fixer: return "Fixer";
        case AgentRole::Judger: return "Judger";
    }
    return "?";
}

const char* phase_name(Phase phase) {
    switch (phase) {
        case Phase::Extract: return "Extract";
        case Phase::Verify: return "Verify";
        case Phase::Codegen: return "Codegen";
        case Phase::Test: return "Test";
        case Phase::Judge: return "Judge";
        case Phase::Fix: return "Fix";
        case Phase::Done: return "Done";
        case Phase::FailedBudget: return "FailedBudget";
    }
    return "?";
}

std::string render_prompt(const std::string& tmpl,
                          const std::map<std::string, std::string>& slots) {
    std::string out = tmpl;
    for (const auto& [key, value] : slots) {
        const std::string pattern = "{" + key + "}";
        std::size_t pos = 0;
        while ((pos = out.find(pattern, pos)) != std::string::npos) {
            out.replace(pos, pattern.size(), value);
            pos += value.size();
        }
    }
    return out;
}

std::vector<std::uint64_t> derive_seeds(std::uint64_t global_seed, const std::string& problem_id,
                                        std::size_t count) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : problem_id) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    std::uint64_t base = hash ^ (global_seed * 0x9e3779b97f4a7c15ull);
    std::vector<std::uint64_t> seeds;
    seeds.reserve(count);
    for (std::size_t i = 0; i < count; ++i) seeds.push_back(base + i);
    return seeds;
}

namespace {

std::int64_t now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

// Re-ask context: the violating reply plus what was wrong with it.
std::vector<Message> reask_messages(const std::string& prompt, const std::string& bad_reply,
                                    const std::string& why) {
    return {
        {"user", prompt},
        {"assistant", bad_reply},
        {"user", "Your reply violated the output contract: " + why +
                     " Reply again following the contract exactly."},
    };
}

struct ParsedVerdict {
    bool ok = false;
    bool accepted = false;
    std::string reason;
};

ParsedVerdict parse_verifier_reply(const std::string& reply) {
    std::size_t start = reply.find_first_not_of(" \t\r\n");
    if (start == std::string::npos) return {};
    std::string body = reply.substr(start);
    if (body.rfind("ACCEPT", 0) == 0) return {true, true, ""};
    if (body.rfind("REJECT", 0) == 0) {
        std::string reason = body.substr(6);
        std::size_t colon = reason.find_first_not_of(": \t");
        reason = colon == std::string::npos ? "" : reason.substr(colon);
        std::size_t eol = reason.find('\n');
        if (eol != std::string::npos) reason = reason.substr(0, eol);
        return {true, false, reason};
    }
    return {};
}

std::optional<FaultAttribution> parse_judger_reply(const std::string& reply) {
    std::size_t start = reply.find_first_not_of(" \t\r\n");
    if (start == std::string::npos) return std::nullopt;
    std::string body = reply.substr(start);
    FaultSide side;
    std::size_t skip;
    if (body.rfind("DUT", 0) == 0) {
        side = FaultSide::Dut;
        skip = 3;
    } else if (body.rfind("REFERENCE", 0) == 0) {
        side = FaultSide::ReferenceModel;
        skip = 9;
    } else {
        return std::nullopt;
    }
    std::string rationale = body.substr(skip);
    std::size_t colon = rationale.find_first_not_of(": \t");
    rationale = colon == std::string::npos ? "" : rationale.substr(colon);
    std::size_t eol = rationale.find('\n');
    if (eol != std::string::npos) rationale = rationale.substr(0, eol);
    return FaultAttribution{side, rationale};
}

Result<sim::ExternalFiles> parse_external_files(const std::string& reply) {
    json doc;
    try {
        doc = json::parse(reply);
    } catch (const json::parse_error& e) {
        return Result<sim::ExternalFiles>::failure(make_error("E_JSON", e.what(), ""));
    }
    if (!doc.is_object() || !doc.contains("ref") || !doc.contains("test") ||
        !doc.contains("main") || !doc["ref"].is_string() || !doc["test"].is_string() ||
        !doc["main"].is_string())
        return Result<sim::ExternalFiles>::failure(make_error(
            "E_SCHEMA", "expected a JSON object with string fields ref, test, main", ""));
    sim::ExternalFiles files;
    files.ref = doc["ref"].get<std::string>();
    files.test = doc["test"].get<std::string>();
    files.main = doc["main"].get<std::string>();
    return Result<sim::ExternalFiles>::success(std::move(files));
}

std::string diags_text(const std::vector<Diagnostic>& diags) {
    std::string out;
    for (const auto& d : diags) {
        out += severity_name(d.severity);
        out += " ";
        out += d.code;
        if (!d.path.empty()) out += " at " + d.path;
        out += ": " + d.message + "\n";
    }
    return out;
}

bool ports_match(const ir::FsmSpec& a, const ir::FsmSpec& b) {
    auto sig = [](const ir::FsmSpec& s) {
        std::vector<std::pair<std::string, int>> v;
        for (const auto& p : s.inputs) v.emplace_back(p.name, p.width);
        v.emplace_back("\x01", 0);  // separator between inputs and outputs
        for (const auto& p : s.outputs) v.emplace_back(p.name, p.width);
        return v;
    };
    return sig(a) == sig(b);
}

class PipelineRunner {
public:
    PipelineRunner(const bench::BenchProblem& problem, ChatBackend& backend,
                   const PipelineConfig& config)
        : problem_(problem), backend_(backend), config_(config) {}

    PipelineResult run() {
        result_.record.problem_id = problem_.id;
        result_.record.transcript = "t:" + content_digest(problem_.id);
        try {
            loop();
        } catch (const ContractError& e) {
            // Backend exhaustion and similar machine failures end the run
            // but never abort a benchmark sweep.
            result_.record.error = e.code() + ": " + e.what();
            result_.record.verdict = bench::RunVerdict::FunctionalFail;
        }
        result_.record.iterations = iterations_;
        result_.record.syntax_error_iterations = syntax_errors_;
        return std::move(result_);
    }

private:
    enum class FixTarget { DutIr, TestArtifacts };

    // --- bookkeeping ------------------------------------------------------

    bool can_act() const { return actions_ < config_.budget; }

    void enter(Phase phase) { result_.phases.push_back(phase); }

    void finish(bench::RunVerdict verdict, const std::string& error = "") {
        result_.record.verdict = verdict;
        if (!error.empty()) result_.record.error = error;
        if (verdict == bench::RunVerdict::Pass) enter(Phase::Done);
        if (verdict == bench::RunVerdict::BudgetExhausted) enter(Phase::FailedBudget);
        done_ = true;
    }

    std::string ask(AgentRole role, const std::string& prompt,
                    const std::vector<Message>& context = {}) {
        ++actions_;
        std::vector<Message> messages =
            context.empty() ? std::vector<Message>{{"user", prompt}} : context;
        std::string reply = backend_.send("", messages, config_.temperature);
        result_.transcript.push_back({role, "llm", content_digest(prompt),
                                      content_digest(reply), now_ms()});
        return reply;
    }

    void note_sim_action(const std::string& kind, const std::string& request,
                         const std::string& response) {
        ++actions_;
        result_.transcript.push_back({AgentRole::Tester, kind, content_digest(request),
                                      content_digest(response), now_ms()});
    }

    // One failed attempt to produce the DUT-side artifact counts as a
    // syntax-error generation iteration.
    void count_failed_gate() {
        ++iterations_;
        ++syntax_errors_;
    }

    // --- main loop --------------------------------------------------------

    void loop() {
        Phase phase = Phase::Extract;
        while (!done_) {
            switch (phase) {
                case Phase::Extract: phase = do_extract(); break;
                case Phase::Verify: phase = do_verify(); break;
                case Phase::Codegen: phase = do_codegen(); break;
                case Phase::Test: phase = do_test(); break;
                case Phase::Judge: phase = do_judge(); break;
                case Phase::Fix: phase = do_fix(); break;
                default: return;
            }
        }
    }

    // Re-enters Extract if the regeneration bound allows; ends the run
    // otherwise.
    Phase regenerate(bool structural_failure) {
        ++regenerations_;
        if (regenerations_ > config_.max_ir_regenerations) {
            finish(structural_failure ? bench::RunVerdict::SyntaxError
                                      : bench::RunVerdict::FunctionalFail,
                   "IR regeneration bound exhausted");
            return Phase::Extract;
        }
        return Phase::Extract;
    }

    Phase do_extract() {
        enter(Phase::Extract);
        if (!can_act()) {
            finish(bench::RunVerdict::BudgetExhausted);
            return Phase::Extract;
        }
        std::string prompt =
            render_prompt(kExtractorPrompt, {{"description", problem_.description}});
        std::string reply = ask(AgentRole::FsmExtractor, prompt);
        auto json_ok = [](const std::string& text) {
            return json::accept(text);
        };
        if (!json_ok(reply)) {
            count_failed_gate();
            if (!can_act()) {
                finish(bench::RunVerdict::BudgetExhausted);
                return Phase::Extract;
            }
            reply = ask(AgentRole::FsmExtractor, prompt,
                        reask_messages(prompt, reply, "the reply is not valid JSON."));
            if (!json_ok(reply)) {
                count_failed_gate();
                return regenerate(/*structural_failure=*/true);
            }
        }
        ir_text_ = reply;
        return Phase::Verify;
    }

    Phase do_verify() {
        enter(Phase::Verify);
        // Structural gate runs first, without the LLM.
        auto parsed = ir::parse_ir(ir_text_);
        if (!parsed.ok()) {
            count_failed_gate();
            last_diagnostics_ = diags_text(parsed.diagnostics);
            return regenerate(/*structural_failure=*/true);
        }
        dut_spec_ = std::move(*parsed);
        ir_text_ = ir::serialize(*dut_spec_);

        if (!can_act()) {
            finish(bench::RunVerdict::BudgetExhausted);
            return Phase::Verify;
        }
        std::string prompt = render_prompt(
            kVerifierPrompt, {{"description", problem_.description}, {"ir", ir_text_}});
        std::string reply = ask(AgentRole::Verifier, prompt);
        ParsedVerdict verdict = parse_verifier_reply(reply);
        if (!verdict.ok) {
            if (!can_act()) {
                finish(bench::RunVerdict::BudgetExhausted);
                return Phase::Verify;
            }
            reply = ask(AgentRole::Verifier, prompt,
                        reask_messages(prompt, reply,
                                       "the reply must start with ACCEPT or REJECT."));
            verdict = parse_verifier_reply(reply);
            if (!verdict.ok) {
                finish(bench::RunVerdict::SyntaxError, "E_CONTRACT: verifier reply unparseable");
                return Phase::Verify;
            }
        }
        if (!verdict.accepted) {
            last_diagnostics_ = "Verifier rejected the IR: " + verdict.reason;
            return regenerate(/*structural_failure=*/false);
        }
        return Phase::Codegen;
    }

    Phase do_codegen() {
        enter(Phase::Codegen);
        // Deterministic: the Coder never calls the backend.
        try {
            verilog_ = codegen::emit_verilog(*dut_spec_, {});
        } catch (const ContractError& e) {
            // Toolchain rejection routes back to the extractor.
            last_diagnostics_ = e.what();
            count_failed_gate();
            return regenerate(/*structural_failure=*/true);
        }
        candidate_counted_ = false;
        return Phase::Test;
    }

    Phase do_test() {
        enter(Phase::Test);
        if (!candidate_counted_) {
            ++iterations_;
            candidate_counted_ = true;
        }
        if (config_.mode == PipelineConfig::Mode::Native) return test_native();
        return test_external();
    }

    Phase test_native() {
        if (!reference_spec_) {
            Phase next = build_native_reference();
            if (done_ || !reference_spec_) return next;
        }

        auto parsed = codegen::parse_emitted_verilog(verilog_);
        if (!parsed.ok()) {
            // The emitted code failed its own parser: a toolchain defect
            // surfaced as a compile error; route straight to Fix.
            ++syntax_errors_;
            last_verdict_ = sim::Verdict::compile_error(parsed.diagnostics);
            last_diagnostics_ = diags_text(parsed.diagnostics);
            fix_target_ = FixTarget::DutIr;
            return Phase::Fix;
        }
        auto dut = sim::netlist_model(std::move(*parsed));
        auto reference = sim::interpret(*reference_spec_);

        for (std::uint64_t seed : config_.stimulus_seeds) {
            if (!can_act()) {
                finish(bench::RunVerdict::BudgetExhausted);
                return Phase::Test;
            }
            sim::Stimulus stim =
                sim::gen_stimuli(seed, config_.cycles, reference->ports().inputs);
            sim::Verdict verdict;
            try {
                verdict = sim::difftest(*reference, *dut, stim, config_.trace_capacity);
            } catch (const ContractError& e) {
                // Port mismatch between reference and DUT: test-side defect.
                note_sim_action("difftest", "seed=" + std::to_string(seed), e.what());
                last_diagnostics_ = e.what();
                fix_target_ = FixTarget::TestArtifacts;
                return Phase::Fix;
            }
            note_sim_action("difftest", "seed=" + std::to_string(seed),
                            sim::verdict_name(verdict.kind));
            if (verdict.kind == sim::Verdict::Kind::Mismatch) {
                last_verdict_ = std::move(verdict);
                return Phase::Judge;
            }
        }
        finish(bench::RunVerdict::Pass);
        return Phase::Test;
    }

    Phase build_native_reference() {
        if (!can_act()) {
            finish(bench::RunVerdict::BudgetExhausted);
            return Phase::Test;
        }
        std::string prompt = render_prompt(kTesterPrompt, {{"description", problem_.description}});
        std::string reply = ask(AgentRole::Tester, prompt);
        auto gate = [&](const std::string& text) -> Result<ir::FsmSpec> {
            auto parsed = ir::parse_ir(text);
            if (!parsed.ok()) return parsed;
            if (!ports_match(*parsed, *dut_spec_))
                return Result<ir::FsmSpec>::failure(make_error(
                    "E_PORT_MISMATCH",
                    "reference ports do not match the design's declared inputs/outputs", ""));
            return parsed;
        };
        auto parsed = gate(reply);
        if (!parsed.ok()) {
            if (!can_act()) {
                finish(bench::RunVerdict::BudgetExhausted);
                return Phase::Test;
            }
            reply = ask(AgentRole::Tester, prompt,
                        reask_messages(prompt, reply,
                                       "the reply must be a valid FSM JSON document with the "
                                       "design's ports.\n" +
                                           diags_text(parsed.diagnostics)));
            parsed = gate(reply);
            if (!parsed.ok()) {
                last_diagnostics_ = diags_text(parsed.diagnostics);
                reference_text_ = reply;
                fix_target_ = FixTarget::TestArtifacts;
                return Phase::Fix;
            }
        }
        reference_spec_ = std::move(*parsed);
        reference_text_ = ir::serialize(*reference_spec_);
        return Phase::Test;
    }

    Phase test_external() {
        if (!external_files_) {
            Phase next = build_external_files();
            if (done_ || !external_files_) return next;
        }
        if (!can_act()) {
            finish(bench::RunVerdict::BudgetExhausted);
            return Phase::Test;
        }
        sim::ExternalFiles files = *external_files_;
        files.dut = verilog_;
        sim::Verdict verdict;
        try {
            verdict = sim::run_external_sim(config_.workdir, files, config_.tool);
        } catch (const ContractError& e) {
            note_sim_action("external_sim", config_.tool.name, e.code());
            finish(bench::RunVerdict::FunctionalFail, e.code() + ": " + e.what());
            return Phase::Test;
        }
        note_sim_action("external_sim", config_.tool.name, sim::verdict_name(verdict.kind));
        switch (verdict.kind) {
            case sim::Verdict::Kind::Pass:
                finish(bench::RunVerdict::Pass);
                return Phase::Test;
            case sim::Verdict::Kind::CompileError: {
                ++syntax_errors_;
                last_diagnostics_ = diags_text(verdict.diagnostics);
                last_verdict_ = std::move(verdict);
                // Compile errors route straight to the Fixer; mentions of
                // the DUT file indict the generated design, otherwise the
                // generated test sources are to blame.
                fix_target_ = last_diagnostics_.find("dut.v") != std::string::npos
                                  ? FixTarget::DutIr
                                  : FixTarget::TestArtifacts;
                return Phase::Fix;
            }
            case sim::Verdict::Kind::Mismatch:
                last_verdict_ = std::move(verdict);
                return Phase::Judge;
        }
        return Phase::Test;
    }

    Phase build_external_files() {
        if (!can_act()) {
            finish(bench::RunVerdict::BudgetExhausted);
            return Phase::Test;
        }
        std::string prompt =
            render_prompt(kTesterExternalPrompt, {{"description", problem_.description}});
        std::string reply = ask(AgentRole::Tester, prompt);
        auto parsed = parse_external_files(reply);
        if (!parsed.ok()) {
            if (!can_act()) {
                finish(bench::RunVerdict::BudgetExhausted);
                return Phase::Test;
            }
            reply = ask(AgentRole::Tester, prompt,
                        reask_messages(prompt, reply,
                                       "the reply must be a JSON object with string fields "
                                       "ref, test, main."));
            parsed = parse_external_files(reply);
            if (!parsed.ok()) {
                last_diagnostics_ = diags_text(parsed.diagnostics);
                reference_text_ = reply;
                fix_target_ = FixTarget::TestArtifacts;
                return Phase::Fix;
            }
        }
        external_files_ = std::move(*parsed);
        reference_text_ = reply;
        return Phase::Test;
    }

    Phase do_judge() {
        enter(Phase::Judge);
        std::string trace_text = sim::format_trace(last_verdict_.trace);
        if (!can_act()) {
            finish(bench::RunVerdict::BudgetExhausted);
            return Phase::Judge;
        }
        std::string prompt = render_prompt(kJudgerPrompt, {{"trace", trace_text},
                                                           {"ir", ir_text_},
                                                           {"reference", reference_text_}});
        std::string reply = ask(AgentRole::Judger, prompt);
        auto attribution = parse_judger_reply(reply);
        if (!attribution) {
            if (!can_act()) {
                finish(bench::RunVerdict::BudgetExhausted);
                return Phase::Judge;
            }
            reply = ask(AgentRole::Judger, prompt,
                        reask_messages(prompt, reply,
                                       "the reply must start with DUT or REFERENCE."));
            attribution = parse_judger_reply(reply);
        }
        if (!attribution) {
            // Undetermined falls back to blaming the DUT: its structural
            // gate is cheap to re-run.
            attribution = FaultAttribution{FaultSide::Dut, "undetermined"};
            result_.transcript.back().action = "llm(undetermined)";
        }
        last_diagnostics_ = trace_text + "\nJudger: " + reply;
        fix_target_ =
            attribution->side == FaultSide::ReferenceModel ? FixTarget::TestArtifacts
                                                           : FixTarget::DutIr;
        return Phase::Fix;
    }

    Phase do_fix() {
        enter(Phase::Fix);
        if (!can_act()) {
            finish(bench::RunVerdict::BudgetExhausted);
            return Phase::Fix;
        }
        const bool dut_side = fix_target_ == FixTarget::DutIr;
        std::string artifact = dut_side ? ir_text_ : reference_text_;
        std::string kind = dut_side ? "FSM JSON intermediate representation"
                                    : (config_.mode == PipelineConfig::Mode::Native
                                           ? "reference FSM JSON document"
                                           : "verification sources JSON object");
        std::string prompt = render_prompt(kFixerPrompt, {{"kind", kind},
                                                          {"artifact", artifact},
                                                          {"diagnostics", last_diagnostics_}});
        std::string reply = ask(AgentRole::Fixer, prompt);

        if (dut_side) {
            auto parsed = ir::parse_ir(reply);
            if (!parsed.ok()) {
                // Failed gate: consume the action and re-invoke fix.
                count_failed_gate();
                last_diagnostics_ = diags_text(parsed.diagnostics);
                return Phase::Fix;
            }
            dut_spec_ = std::move(*parsed);
            ir_text_ = ir::serialize(*dut_spec_);
            return Phase::Codegen;
        }

        if (config_.mode == PipelineConfig::Mode::Native) {
            auto parsed = ir::parse_ir(reply);
            if (parsed.ok() && !ports_match(*parsed, *dut_spec_)) {
                last_diagnostics_ = "E_PORT_MISMATCH: reference ports do not match the design";
                return Phase::Fix;
            }
            if (!parsed.ok()) {
                last_diagnostics_ = diags_text(parsed.diagnostics);
                return Phase::Fix;
            }
            reference_spec_ = std::move(*parsed);
            reference_text_ = ir::serialize(*reference_spec_);
        } else {
            auto parsed = parse_external_files(reply);
            if (!parsed.ok()) {
                last_diagnostics_ = diags_text(parsed.diagnostics);
                return Phase::Fix;
            }
            external_files_ = std::move(*parsed);
            reference_text_ = reply;
        }
        return Phase::Test;
    }

    const bench::BenchProblem& problem_;
    ChatBackend& backend_;
    const PipelineConfig& config_;

    PipelineResult result_;
    bool done_ = false;

    std::uint64_t actions_ = 0;
    std::uint64_t iterations_ = 0;
    std::uint64_t syntax_errors_ = 0;
    std::uint64_t regenerations_ = 0;

    std::string ir_text_;
    std::optional<ir::FsmSpec> dut_spec_;
    std::string verilog_;
    bool candidate_counted_ = false;

    std::optional<ir::FsmSpec> reference_spec_;       // native mode
    std::optional<sim::ExternalFiles> external_files_;  // external mode
    std::string reference_text_;

    sim::Verdict last_verdict_;
    std::string last_diagnostics_;
    FixTarget fix_target_ = FixTarget::DutIr;
};

}  // namespace

PipelineResult run_pipeline(const bench::BenchProblem& problem, ChatBackend& backend,
                            const PipelineConfig& config) {
    return PipelineRunner(problem, backend, config).run();
}

VerifyOutcome verify_ir(const std::string& ir_document, const std::string& description,
                        ChatBackend& backend, double temperature) {
    VerifyOutcome outcome;
    auto parsed = ir::parse_ir(ir_document);
    if (!parsed.ok()) {
        outcome.diagnostics = std::move(parsed.diagnostics);
        outcome.reason = "structural gate failed";
        return outcome;
    }
    std::string prompt = render_prompt(
        kVerifierPrompt, {{"description", description}, {"ir", ir::serialize(*parsed)}});
    std::string reply = backend.send("", {{"user", prompt}}, temperature);
    ++outcome.backend_calls;
    ParsedVerdict verdict = parse_verifier_reply(reply);
    if (!verdict.ok) {
        reply = backend.send(
            "", reask_messages(prompt, reply, "the reply must start with ACCEPT or REJECT."),
            temperature);
        ++outcome.backend_calls;
        verdict = parse_verifier_reply(reply);
        if (!verdict.ok)
            throw ContractError("E_CONTRACT", "verifier reply unparseable after one re-ask");
    }
    outcome.accepted = verdict.accepted;
    outcome.reason = verdict.reason;
    return outcome;
}

Result<TestArtifacts> build_test_artifacts(const std::string& description, ChatBackend& backend,
                                           PipelineConfig::Mode mode, double temperature) {
    if (description.empty())
        throw ContractError("E_ARGS", "build_test_artifacts requires a description");
    TestArtifacts artifacts;
    if (mode == PipelineConfig::Mode::Native) {
        std::string prompt = render_prompt(kTesterPrompt, {{"description", description}});
        std::string reply = backend.send("", {{"user", prompt}}, temperature);
        ++artifacts.backend_calls;
        auto parsed = ir::parse_ir(reply);
        if (!parsed.ok()) return Result<TestArtifacts>::failure(parsed.diagnostics);
        artifacts.reference_spec = std::move(*parsed);
    } else {
        std::string prompt = render_prompt(kTesterExternalPrompt, {{"description", description}});
        std::string reply = backend.send("", {{"user", prompt}}, temperature);
        ++artifacts.backend_calls;
        auto parsed = parse_external_files(reply);
        if (!parsed.ok()) return Result<TestArtifacts>::failure(parsed.diagnostics);
        artifacts.files = std::move(*parsed);
    }
    return Result<TestArtifacts>::success(std::move(artifacts));
}

FaultAttribution judge(const std::string& trace_text, const std::string& dut_ir,
                       const std::string& reference_text, ChatBackend& backend,
                       double temperature) {
    std::string prompt = render_prompt(
        kJudgerPrompt, {{"trace", trace_text}, {"ir", dut_ir}, {"reference", reference_text}});
    std::string reply = backend.send("", {{"user", prompt}}, temperature);
    auto attribution = parse_judger_reply(reply);
    if (!attribution) {
        reply = backend.send(
            "", reask_messages(prompt, reply, "the reply must start with DUT or REFERENCE."),
            temperature);
        attribution = parse_judger_reply(reply);
    }
    if (!attribution) return FaultAttribution{FaultSide::Dut, "undetermined"};
    return *attribution;
}

std::string fix(const std::string& artifact_kind, const std::string& artifact,
                const std::string& evidence, ChatBackend& backend, double temperature) {
    std::string prompt = render_prompt(
        kFixerPrompt,
        {{"kind", artifact_kind}, {"artifact", artifact}, {"diagnostics", evidence}});
    return backend.send("", {{"user", prompt}}, temperature);
}

}  // namespace fsmforge::agent
