#include "fsmforge/external.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace fsmforge::sim {

ToolConfig iverilog_config() {
    return ToolConfig{
        "iverilog",
        {"iverilog", "-o", "{exe}", "{dut}", "{ref}", "{test}", "{main}"},
        {"vvp", "{exe}"},
        60000,
    };
}

ToolConfig verilator_config() {
    return ToolConfig{
        "verilator",
        {"verilator", "--cc", "--exe", "--build", "-Mdir", "{workdir}/obj_dir", "-o", "{exe}",
         "{dut}", "{ref}", "{test}", "{main}"},
        {"{exe}"},
        60000,
    };
}

namespace {

std::string resolve_executable(const std::string& name) {
    if (name.find('/') != std::string::npos) {
        return access(name.c_str(), X_OK) == 0 ? name : "";
    }
    const char* path_env = std::getenv("PATH");
    if (!path_env) return "";
    std::istringstream paths(path_env);
    std::string dir;
    while (std::getline(paths, dir, ':')) {
        if (dir.empty()) continue;
        std::string candidate = dir + "/" + name;
        if (access(candidate.c_str(), X_OK) == 0) return candidate;
    }
    return "";
}

void drain(int fd, std::string& sink) {
    char buf[4096];
    ssize_t n;
    while ((n = read(fd, buf, sizeof buf)) > 0) sink.append(buf, static_cast<size_t>(n));
}

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv,
                          const std::filesystem::path& cwd, int timeout_ms) {
    if (argv.empty()) throw ContractError("E_TOOL_MISSING", "empty command line");
    std::string exe = resolve_executable(argv[0]);
    if (exe.empty())
        throw ContractError("E_TOOL_MISSING", "executable '" + argv[0] + "' not found");

    int out_pipe[2], err_pipe[2];
    if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0)
        throw ContractError("E_TOOL_MISSING", "pipe() failed");

    pid_t pid = fork();
    if (pid < 0) throw ContractError("E_TOOL_MISSING", "fork() failed");
    if (pid == 0) {
        if (!cwd.empty()) {
            if (chdir(cwd.c_str()) != 0) _exit(127);
        }
        dup2(out_pipe[1], STDOUT_FILENO);
        dup2(err_pipe[1], STDERR_FILENO);
        close(out_pipe[0]);
        close(out_pipe[1]);
        close(err_pipe[0]);
        close(err_pipe[1]);
        std::vector<char*> cargv;
        cargv.push_back(const_cast<char*>(exe.c_str()));
        for (std::size_t i = 1; i < argv.size(); ++i)
            cargv.push_back(const_cast<char*>(argv[i].c_str()));
        cargv.push_back(nullptr);
        execv(exe.c_str(), cargv.data());
        _exit(127);
    }

    close(out_pipe[1]);
    close(err_pipe[1]);

    ProcessResult result;
    auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    bool out_open = true, err_open = true;
    while (out_open || err_open) {
        auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
                             deadline - std::chrono::steady_clock::now())
                             .count();
        if (remaining <= 0) {
            kill(pid, SIGKILL);
            result.timed_out = true;
            break;
        }
        pollfd fds[2] = {{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}};
        fds[0].fd = out_open ? out_pipe[0] : -1;
        fds[1].fd = err_open ? err_pipe[0] : -1;
        int rc = poll(fds, 2, static_cast<int>(remaining));
        if (rc <= 0) continue;
        char buf[4096];
        if (out_open && (fds[0].revents & (POLLIN | POLLHUP))) {
            ssize_t n = read(out_pipe[0], buf, sizeof buf);
            if (n > 0)
                result.out.append(buf, static_cast<size_t>(n));
            else
                out_open = false;
        }
        if (err_open && (fds[1].revents & (POLLIN | POLLHUP))) {
            ssize_t n = read(err_pipe[0], buf, sizeof buf);
            if (n > 0)
                result.err.append(buf, static_cast<size_t>(n));
            else
                err_open = false;
        }
    }
    if (!result.timed_out) {
        drain(out_pipe[0], result.out);
        drain(err_pipe[0], result.err);
    }
    close(out_pipe[0]);
    close(err_pipe[0]);

    int status = 0;
    waitpid(pid, &status, 0);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
    return result;
}

namespace {

// "key=value" fields of a TRACE line; returns false on malformed input.
bool parse_fields(const std::string& line, std::vector<std::pair<std::string, std::string>>& out) {
    std::istringstream in(line);
    std::string token;
    in >> token;  // TRACE / MISMATCH
    while (in >> token) {
        auto eq = token.find('=');
        if (eq == std::string::npos) return false;
        out.emplace_back(token.substr(0, eq), token.substr(eq + 1));
    }
    return true;
}

}  // namespace

Verdict parse_sim_output(const std::string& output) {
    std::istringstream in(output);
    std::string line;
    std::vector<TraceEntry> entries;
    while (std::getline(in, line)) {
        if (line.rfind("TRACE ", 0) == 0) {
            std::vector<std::pair<std::string, std::string>> fields;
            if (!parse_fields(line, fields)) continue;
            TraceEntry e;
            for (const auto& [key, value] : fields) {
                if (key == "cycle")
                    e.cycle = std::strtoull(value.c_str(), nullptr, 10);
                else if (key == "state")
                    e.ref_state = value;
                else if (key.rfind("in.", 0) == 0)
                    e.inputs[key.substr(3)] = std::strtoull(value.c_str(), nullptr, 10);
                else if (key.rfind("reg.", 0) == 0)
                    e.ref_registers[key.substr(4)] = std::strtoull(value.c_str(), nullptr, 10);
                else if (key.rfind("ref.", 0) == 0)
                    e.ref_outputs[key.substr(4)] = std::strtoull(value.c_str(), nullptr, 10);
                else if (key.rfind("dut.", 0) == 0)
                    e.dut_outputs[key.substr(4)] = std::strtoull(value.c_str(), nullptr, 10);
            }
            entries.push_back(std::move(e));
        } else if (line.rfind("MISMATCH ", 0) == 0) {
            std::vector<std::pair<std::string, std::string>> fields;
            if (!parse_fields(line, fields)) continue;
            ErrorTrace trace;
            trace.entries = std::move(entries);
            for (const auto& [key, value] : fields) {
                if (key == "cycle")
                    trace.mismatch_cycle = std::strtoull(value.c_str(), nullptr, 10);
                else if (key == "signal")
                    trace.signal = value;
                else if (key == "expected")
                    trace.expected = std::strtoull(value.c_str(), nullptr, 10);
                else if (key == "actual")
                    trace.actual = std::strtoull(value.c_str(), nullptr, 10);
            }
            return Verdict::mismatch(std::move(trace));
        }
    }
    return Verdict::pass();
}

namespace {

std::string substitute(const std::string& tmpl,
                       const std::vector<std::pair<std::string, std::string>>& vars) {
    std::string out = tmpl;
    for (const auto& [key, value] : vars) {
        std::string pattern = "{" + key + "}";
        std::size_t pos;
        while ((pos = out.find(pattern)) != std::string::npos)
            out.replace(pos, pattern.size(), value);
    }
    return out;
}

}  // namespace

Verdict run_external_sim(const std::filesystem::path& workdir, const ExternalFiles& files,
                         const ToolConfig& tool) {
    std::filesystem::create_directories(workdir);
    auto write_file = [&](const std::string& name, const std::string& content) {
        std::ofstream out(workdir / name, std::ios::binary);
        out << content;
    };
    write_file(files.dut_name, files.dut);
    write_file(files.ref_name, files.ref);
    write_file(files.test_name, files.test);
    write_file(files.main_name, files.main);

    std::vector<std::pair<std::string, std::string>> vars = {
        {"workdir", workdir.string()},
        {"dut", (workdir / files.dut_name).string()},
        {"ref", (workdir / files.ref_name).string()},
        {"test", (workdir / files.test_name).string()},
        {"main", (workdir / files.main_name).string()},
        {"exe", (workdir / "sim_main").string()},
    };
    auto expand = [&](const std::vector<std::string>& argv) {
        std::vector<std::string> out;
        out.reserve(argv.size());
        for (const auto& a : argv) out.push_back(substitute(a, vars));
        return out;
    };

    if (!tool.compile_argv.empty()) {
        ProcessResult compile = run_process(expand(tool.compile_argv), workdir, tool.timeout_ms);
        if (compile.timed_out)
            throw ContractError("E_TIMEOUT", tool.name + " compile exceeded " +
                                                 std::to_string(tool.timeout_ms) + " ms");
        if (compile.exit_code != 0) {
            return Verdict::compile_error({make_error(
                "E_TOOL_COMPILE", compile.err.empty() ? compile.out : compile.err, "")});
        }
    }

    ProcessResult run = run_process(expand(tool.run_argv), workdir, tool.timeout_ms);
    if (run.timed_out)
        throw ContractError("E_TIMEOUT", tool.name + " simulation exceeded " +
                                             std::to_string(tool.timeout_ms) + " ms");
    Verdict verdict = parse_sim_output(run.out);
    if (verdict.passed() && run.exit_code != 0)
        return Verdict::compile_error({make_error(
            "E_TOOL_RUN",
            "simulation exited with code " + std::to_string(run.exit_code) + ": " +
                (run.err.empty() ? run.out : run.err),
            "")});
    return verdict;
}

}  // namespace fsmforge::sim
