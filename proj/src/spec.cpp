#include "fsmforge/spec.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace fsmforge::ir {

using ordered_json = nlohmann::ordered_json;

bool Transition::operator==(const Transition& o) const {
    if (!equal(guard, o.guard) || target != o.target) return false;
    if (actions.size() != o.actions.size()) return false;
    for (std::size_t i = 0; i < actions.size(); ++i) {
        if (actions[i].first != o.actions[i].first) return false;
        if (!equal(actions[i].second, o.actions[i].second)) return false;
    }
    return true;
}

std::optional<std::size_t> FsmSpec::state_index(const std::string& state_name) const {
    for (std::size_t i = 0; i < states.size(); ++i)
        if (states[i].name == state_name) return i;
    return std::nullopt;
}

const SignalDecl* FsmSpec::find_output(const std::string& output_name) const {
    for (const auto& s : outputs)
        if (s.name == output_name) return &s;
    return nullptr;
}

const RegisterDecl* FsmSpec::find_register(const std::string& register_name) const {
    for (const auto& r : registers)
        if (r.name == register_name) return &r;
    return nullptr;
}

WidthMap FsmSpec::reference_widths() const {
    WidthMap w;
    for (const auto& s : inputs) w[s.name] = s.width;
    for (const auto& r : registers) w[r.name] = r.width;
    return w;
}

std::size_t FsmSpec::transition_count() const {
    std::size_t n = 0;
    for (const auto& s : states) n += s.transitions.size();
    return n;
}

bool is_valid_identifier(const std::string& name) {
    if (name.empty()) return false;
    char c0 = name[0];
    if (!(std::isalpha(static_cast<unsigned char>(c0)) || c0 == '_')) return false;
    for (char c : name)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

bool is_reserved_word(const std::string& name) {
    // Verilog-2005 keywords.
    static const std::unordered_set<std::string> kReserved = {
        "always", "and", "assign", "automatic", "begin", "buf", "bufif0", "bufif1",
        "case", "casex", "casez", "cell", "cmos", "config", "deassign", "default",
        "defparam", "design", "disable", "edge", "else", "end", "endcase",
        "endconfig", "endfunction", "endgenerate", "endmodule", "endprimitive",
        "endspecify", "endtable", "endtask", "event", "for", "force", "forever",
        "fork", "function", "generate", "genvar", "highz0", "highz1", "if",
        "ifnone", "incdir", "include", "initial", "inout", "input", "instance",
        "integer", "join", "large", "liblist", "library", "localparam",
        "macromodule", "medium", "module", "nand", "negedge", "nmos", "nor",
        "noshowcancelled", "not", "notif0", "notif1", "or", "output", "parameter",
        "pmos", "posedge", "primitive", "pull0", "pull1", "pulldown", "pullup",
        "pulsestyle_ondetect", "pulsestyle_onevent", "rcmos", "real", "realtime",
        "reg", "release", "repeat", "rnmos", "rpmos", "rtran", "rtranif0",
        "rtranif1", "scalared", "showcancelled", "signed", "small", "specify",
        "specparam", "strong0", "strong1", "supply0", "supply1", "table", "task",
        "time", "tran", "tranif0", "tranif1", "tri", "tri0", "tri1", "triand",
        "trior", "trireg", "unsigned", "use", "uwire", "vectored", "wait", "wand",
        "weak0", "weak1", "while", "wire", "wor", "xnor", "xor",
    };
    return kReserved.count(name) > 0;
}

const char* encoding_name(Encoding e) {
    return e == Encoding::Binary ? "binary" : "onehot";
}

// ---------------------------------------------------------------------------
// JSON parsing
// ---------------------------------------------------------------------------

namespace {

constexpr int kMaxWidth = 64;

class IrReader {
public:
    Result<FsmSpec> read(const std::string& text) {
        ordered_json doc;
        try {
            doc = ordered_json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            return Result<FsmSpec>::failure(make_error("E_JSON", e.what(), ""));
        }
        FsmSpec spec;
        read_root(doc, spec);
        if (has_errors(diags_)) return Result<FsmSpec>::failure(std::move(diags_));
        auto vdiags = validate(spec);
        if (!vdiags.empty()) return Result<FsmSpec>::failure(std::move(vdiags));
        return Result<FsmSpec>::success(std::move(spec));
    }

private:
    std::vector<Diagnostic> diags_;

    void error(const std::string& code, const std::string& message, const std::string& path) {
        diags_.push_back(make_error(code, message, path));
    }

    void check_extra_keys(const ordered_json& obj, const std::set<std::string>& allowed,
                          const std::string& path) {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            if (!allowed.count(it.key()))
                error("E_SCHEMA", "unknown field '" + it.key() + "'", path + "/" + it.key());
        }
    }

    bool require(const ordered_json& obj, const char* key, const std::string& path) {
        if (!obj.contains(key)) {
            error("E_SCHEMA", std::string("missing required field '") + key + "'", path);
            return false;
        }
        return true;
    }

    std::string read_string(const ordered_json& obj, const char* key, const std::string& path,
                            const char* fallback = nullptr) {
        if (!obj.contains(key)) {
            if (fallback) return fallback;
            error("E_SCHEMA", std::string("missing required field '") + key + "'", path);
            return "";
        }
        const auto& v = obj[key];
        if (!v.is_string()) {
            error("E_SCHEMA", std::string("field '") + key + "' must be a string",
                  path + "/" + key);
            return fallback ? fallback : "";
        }
        return v.get<std::string>();
    }

    std::uint64_t read_uint(const ordered_json& v, const std::string& path) {
        if (!v.is_number_unsigned()) {
            error("E_SCHEMA", "expected an unsigned integer", path);
            return 0;
        }
        return v.get<std::uint64_t>();
    }

    int read_width(const ordered_json& obj, const std::string& path) {
        if (!obj.contains("width")) {
            error("E_SCHEMA", "missing required field 'width'", path);
            return 1;
        }
        std::uint64_t w = read_uint(obj["width"], path + "/width");
        if (w < 1 || w > kMaxWidth) {
            error("E_SCHEMA", "width must be in [1, 64]", path + "/width");
            return 1;
        }
        return static_cast<int>(w);
    }

    ExprPtr read_expr(const ordered_json& v, const std::string& path) {
        if (!v.is_string()) {
            error("E_SCHEMA", "expected an expression string", path);
            return Expr::always_true();
        }
        auto r = parse_expr(v.get<std::string>());
        if (!r.ok()) {
            for (auto d : r.diagnostics) {
                d.path = path;
                diags_.push_back(std::move(d));
            }
            return Expr::always_true();
        }
        return *r;
    }

    void read_root(const ordered_json& doc, FsmSpec& spec) {
        if (!doc.is_object()) {
            error("E_SCHEMA", "top-level document must be a JSON object", "");
            return;
        }
        check_extra_keys(doc,
                         {"name", "clock", "reset", "inputs", "outputs", "registers", "initial",
                          "encoding", "states"},
                         "");
        spec.name = read_string(doc, "name", "");
        if (doc.contains("clock")) read_clock(doc["clock"], spec.clock);
        if (doc.contains("reset")) read_reset(doc["reset"], spec.reset);
        if (doc.contains("inputs")) read_signals(doc["inputs"], "/inputs", spec.inputs);
        if (doc.contains("outputs")) read_signals(doc["outputs"], "/outputs", spec.outputs);
        if (doc.contains("registers")) read_registers(doc["registers"], spec.registers);
        spec.initial = read_string(doc, "initial", "");
        if (doc.contains("encoding")) {
            std::string e = read_string(doc, "encoding", "");
            if (e == "binary")
                spec.encoding = Encoding::Binary;
            else if (e == "onehot")
                spec.encoding = Encoding::Onehot;
            else
                error("E_SCHEMA", "encoding must be 'binary' or 'onehot'", "/encoding");
        }
        if (require(doc, "states", "")) read_states(doc["states"], spec);
    }

    void read_clock(const ordered_json& v, ClockSpec& clock) {
        if (!v.is_object()) {
            error("E_SCHEMA", "'clock' must be an object", "/clock");
            return;
        }
        check_extra_keys(v, {"name", "edge"}, "/clock");
        clock.name = read_string(v, "name", "/clock");
        std::string edge = read_string(v, "edge", "/clock", "rising");
        if (edge == "rising")
            clock.edge = ClockEdge::Rising;
        else if (edge == "falling")
            clock.edge = ClockEdge::Falling;
        else
            error("E_SCHEMA", "clock edge must be 'rising' or 'falling'", "/clock/edge");
    }

    void read_reset(const ordered_json& v, ResetSpec& reset) {
        if (!v.is_object()) {
            error("E_SCHEMA", "'reset' must be an object", "/reset");
            return;
        }
        check_extra_keys(v, {"name", "active", "kind"}, "/reset");
        reset.name = read_string(v, "name", "/reset");
        std::string active = read_string(v, "active", "/reset", "high");
        if (active == "high")
            reset.active = ResetActive::High;
        else if (active == "low")
            reset.active = ResetActive::Low;
        else
            error("E_SCHEMA", "reset active level must be 'high' or 'low'", "/reset/active");
        std::string kind = read_string(v, "kind", "/reset", "synchronous");
        if (kind == "synchronous")
            reset.kind = ResetKind::Synchronous;
        else if (kind == "asynchronous")
            reset.kind = ResetKind::Asynchronous;
        else
            error("E_SCHEMA", "reset kind must be 'synchronous' or 'asynchronous'", "/reset/kind");
    }

    void read_signals(const ordered_json& v, const std::string& path,
                      std::vector<SignalDecl>& out) {
        if (!v.is_array()) {
            error("E_SCHEMA", "expected an array of signal declarations", path);
            return;
        }
        for (std::size_t i = 0; i < v.size(); ++i) {
            const std::string ipath = path + "/" + std::to_string(i);
            if (!v[i].is_object()) {
                error("E_SCHEMA", "signal declaration must be an object", ipath);
                continue;
            }
            check_extra_keys(v[i], {"name", "width"}, ipath);
            SignalDecl d;
            d.name = read_string(v[i], "name", ipath);
            d.width = read_width(v[i], ipath);
            out.push_back(std::move(d));
        }
    }

    void read_registers(const ordered_json& v, std::vector<RegisterDecl>& out) {
        if (!v.is_array()) {
            error("E_SCHEMA", "'registers' must be an array", "/registers");
            return;
        }
        for (std::size_t i = 0; i < v.size(); ++i) {
            const std::string ipath = "/registers/" + std::to_string(i);
            if (!v[i].is_object()) {
                error("E_SCHEMA", "register declaration must be an object", ipath);
                continue;
            }
            check_extra_keys(v[i], {"name", "width", "reset"}, ipath);
            RegisterDecl d;
            d.name = read_string(v[i], "name", ipath);
            d.width = read_width(v[i], ipath);
            if (v[i].contains("reset")) d.reset_value = read_uint(v[i]["reset"], ipath + "/reset");
            out.push_back(std::move(d));
        }
    }

    void read_states(const ordered_json& v, FsmSpec& spec) {
        if (!v.is_array()) {
            error("E_SCHEMA", "'states' must be an array", "/states");
            return;
        }
        for (std::size_t i = 0; i < v.size(); ++i) {
            const std::string spath = "/states/" + std::to_string(i);
            if (!v[i].is_object()) {
                error("E_SCHEMA", "state must be an object", spath);
                continue;
            }
            check_extra_keys(v[i], {"name", "moore", "transitions"}, spath);
            StateDef s;
            s.name = read_string(v[i], "name", spath);
            if (v[i].contains("moore")) {
                const auto& m = v[i]["moore"];
                if (!m.is_object()) {
                    error("E_SCHEMA", "'moore' must be an object", spath + "/moore");
                } else {
                    for (auto it = m.begin(); it != m.end(); ++it)
                        s.moore.emplace_back(it.key(),
                                             read_uint(it.value(), spath + "/moore/" + it.key()));
                    std::sort(s.moore.begin(), s.moore.end());
                }
            }
            if (v[i].contains("transitions"))
                read_transitions(v[i]["transitions"], spath, s.transitions);
            spec.states.push_back(std::move(s));
        }
    }

    void read_transitions(const ordered_json& v, const std::string& spath,
                          std::vector<Transition>& out) {
        if (!v.is_array()) {
            error("E_SCHEMA", "'transitions' must be an array", spath + "/transitions");
            return;
        }
        for (std::size_t j = 0; j < v.size(); ++j) {
            const std::string tpath = spath + "/transitions/" + std::to_string(j);
            if (!v[j].is_object()) {
                error("E_SCHEMA", "transition must be an object", tpath);
                continue;
            }
            check_extra_keys(v[j], {"guard", "target", "actions"}, tpath);
            Transition t;
            t.guard = v[j].contains("guard") ? read_expr(v[j]["guard"], tpath + "/guard")
                                             : Expr::always_true();
            t.target = read_string(v[j], "target", tpath);
            if (v[j].contains("actions")) {
                const auto& a = v[j]["actions"];
                if (!a.is_object()) {
                    error("E_SCHEMA", "'actions' must be an object", tpath + "/actions");
                } else {
                    for (auto it = a.begin(); it != a.end(); ++it)
                        t.actions.emplace_back(it.key(),
                                               read_expr(it.value(), tpath + "/actions/" + it.key()));
                    std::sort(t.actions.begin(), t.actions.end(),
                              [](const auto& x, const auto& y) { return x.first < y.first; });
                }
            }
            out.push_back(std::move(t));
        }
    }
};

void collect_refs(const ExprPtr& e, std::vector<std::string>& out) {
    switch (e->kind()) {
        case Expr::Kind::Ref:
            out.push_back(e->name());
            return;
        case Expr::Kind::Unary:
            collect_refs(e->lhs(), out);
            return;
        case Expr::Kind::Binary:
            collect_refs(e->lhs(), out);
            collect_refs(e->rhs(), out);
            return;
        default:
            return;
    }
}

}  // namespace

Result<FsmSpec> parse_ir(const std::string& text) {
    return IrReader().read(text);
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

std::vector<Diagnostic> validate(const FsmSpec& spec) {
    std::vector<Diagnostic> diags;
    auto err = [&](const std::string& code, const std::string& msg, const std::string& path) {
        diags.push_back(make_error(code, msg, path));
    };

    auto check_name = [&](const std::string& name, const std::string& what,
                          const std::string& path) {
        if (!is_valid_identifier(name))
            err("E_BAD_IDENT", what + " '" + name + "' is not a valid HDL identifier", path);
        else if (is_reserved_word(name))
            err("E_RESERVED", what + " '" + name + "' is an HDL reserved word", path);
    };

    check_name(spec.name, "module name", "/name");
    check_name(spec.clock.name, "clock signal", "/clock/name");
    check_name(spec.reset.name, "reset signal", "/reset/name");

    // Signal namespace: clock, reset, inputs, outputs, registers.
    std::set<std::string> signal_names{spec.clock.name, spec.reset.name};
    if (spec.clock.name == spec.reset.name)
        err("E_DUP_SIGNAL", "clock and reset share the name '" + spec.clock.name + "'",
            "/reset/name");
    auto declare = [&](const std::string& name, const std::string& path) {
        if (!signal_names.insert(name).second)
            err("E_DUP_SIGNAL", "duplicate signal name '" + name + "'", path);
    };
    for (std::size_t i = 0; i < spec.inputs.size(); ++i) {
        const auto& s = spec.inputs[i];
        const std::string path = "/inputs/" + std::to_string(i) + "/name";
        check_name(s.name, "input", path);
        declare(s.name, path);
    }
    for (std::size_t i = 0; i < spec.outputs.size(); ++i) {
        const auto& s = spec.outputs[i];
        const std::string path = "/outputs/" + std::to_string(i) + "/name";
        check_name(s.name, "output", path);
        declare(s.name, path);
    }
    for (std::size_t i = 0; i < spec.registers.size(); ++i) {
        const auto& r = spec.registers[i];
        const std::string path = "/registers/" + std::to_string(i);
        check_name(r.name, "register", path + "/name");
        declare(r.name, path + "/name");
        if (r.reset_value > width_mask(r.width))
            err("E_RESET_WIDTH",
                "reset value " + std::to_string(r.reset_value) + " does not fit in " +
                    std::to_string(r.width) + " bits",
                path + "/reset");
    }

    if (spec.states.empty()) err("E_NO_STATES", "at least one state is required", "/states");

    std::set<std::string> state_names;
    for (std::size_t i = 0; i < spec.states.size(); ++i) {
        const auto& s = spec.states[i];
        const std::string path = "/states/" + std::to_string(i) + "/name";
        check_name(s.name, "state", path);
        if (!state_names.insert(s.name).second)
            err("E_DUP_STATE", "duplicate state name '" + s.name + "'", path);
    }

    if (!state_names.count(spec.initial))
        err("E_NO_INITIAL", "initial state '" + spec.initial + "' is not declared", "/initial");

    const WidthMap ref_widths = spec.reference_widths();
    auto check_expr_refs = [&](const ExprPtr& e, const std::string& path) -> bool {
        std::vector<std::string> refs;
        collect_refs(e, refs);
        bool ok = true;
        for (const auto& r : refs) {
            if (!ref_widths.count(r)) {
                err("E_UNRESOLVED_REF", "'" + r + "' is not a declared input or register", path);
                ok = false;
            }
        }
        return ok;
    };

    for (std::size_t i = 0; i < spec.states.size(); ++i) {
        const auto& s = spec.states[i];
        const std::string spath = "/states/" + std::to_string(i);
        for (const auto& [out_name, value] : s.moore) {
            const std::string mpath = spath + "/moore/" + out_name;
            const SignalDecl* out_decl = spec.find_output(out_name);
            if (!out_decl) {
                err("E_BAD_ASSIGN", "'" + out_name + "' is not a declared output", mpath);
            } else if (value > width_mask(out_decl->width)) {
                err("E_CONST_WIDTH",
                    "constant " + std::to_string(value) + " does not fit output '" + out_name +
                        "' (" + std::to_string(out_decl->width) + " bits)",
                    mpath);
            }
        }
        for (std::size_t j = 0; j < s.transitions.size(); ++j) {
            const auto& t = s.transitions[j];
            const std::string tpath = spath + "/transitions/" + std::to_string(j);
            if (!state_names.count(t.target))
                err("E_BAD_TARGET", "transition target '" + t.target + "' is not a declared state",
                    tpath + "/target");
            if (check_expr_refs(t.guard, tpath + "/guard")) {
                if (self_width(t.guard, ref_widths) != 1)
                    err("E_GUARD_WIDTH", "guard must be a 1-bit expression", tpath + "/guard");
            }
            for (const auto& [dest, value] : t.actions) {
                const std::string apath = tpath + "/actions/" + dest;
                if (!spec.find_register(dest) && !spec.find_output(dest))
                    err("E_BAD_ASSIGN", "'" + dest + "' is not a declared register or output",
                        apath);
                check_expr_refs(value, apath);
            }
        }
    }

    return diags;
}

// ---------------------------------------------------------------------------
// Lint
// ---------------------------------------------------------------------------

std::vector<Diagnostic> lint(const FsmSpec& spec) {
    std::vector<Diagnostic> diags;

    // Reachability over the transition graph, guards ignored.
    std::set<std::string> reachable;
    std::deque<std::string> work{spec.initial};
    reachable.insert(spec.initial);
    while (!work.empty()) {
        auto idx = spec.state_index(work.front());
        work.pop_front();
        if (!idx) continue;
        for (const auto& t : spec.states[*idx].transitions)
            if (reachable.insert(t.target).second) work.push_back(t.target);
    }

    const WidthMap ref_widths = spec.reference_widths();
    for (std::size_t i = 0; i < spec.states.size(); ++i) {
        const auto& s = spec.states[i];
        const std::string spath = "/states/" + std::to_string(i);
        if (!reachable.count(s.name))
            diags.push_back(make_warning(
                "W_UNREACHABLE", "state '" + s.name + "' is unreachable from the initial state",
                spath));
        if (s.transitions.empty())
            diags.push_back(
                make_warning("W_NO_EXIT", "state '" + s.name + "' has no outgoing transitions",
                             spath));
        bool shadowed = false;
        for (std::size_t j = 0; j < s.transitions.size(); ++j) {
            const auto& t = s.transitions[j];
            const std::string tpath = spath + "/transitions/" + std::to_string(j);
            if (shadowed)
                diags.push_back(make_warning(
                    "W_DEAD_TRANSITION",
                    "transition is unreachable: an earlier guard is always true", tpath));
            if (t.guard->is_const_true()) shadowed = true;
            for (const auto& [dest, value] : t.actions) {
                const SignalDecl* out_decl = spec.find_output(dest);
                const RegisterDecl* reg_decl = spec.find_register(dest);
                int dest_width = out_decl ? out_decl->width : reg_decl->width;
                if (self_width(value, ref_widths) > dest_width)
                    diags.push_back(make_warning(
                        "W_WIDTH_TRUNCATE",
                        "assignment to '" + dest + "' truncates a wider value to " +
                            std::to_string(dest_width) + " bits",
                        tpath + "/actions/" + dest));
            }
        }
    }
    return diags;
}

// ---------------------------------------------------------------------------
// Canonical serialization
// ---------------------------------------------------------------------------

std::string serialize(const FsmSpec& spec) {
    ordered_json doc;
    doc["name"] = spec.name;
    doc["clock"] = {{"name", spec.clock.name},
                    {"edge", spec.clock.edge == ClockEdge::Rising ? "rising" : "falling"}};
    doc["reset"] = {{"name", spec.reset.name},
                    {"active", spec.reset.active == ResetActive::High ? "high" : "low"},
                    {"kind", spec.reset.kind == ResetKind::Synchronous ? "synchronous"
                                                                       : "asynchronous"}};
    doc["inputs"] = ordered_json::array();
    for (const auto& s : spec.inputs)
        doc["inputs"].push_back({{"name", s.name}, {"width", s.width}});
    doc["outputs"] = ordered_json::array();
    for (const auto& s : spec.outputs)
        doc["outputs"].push_back({{"name", s.name}, {"width", s.width}});
    doc["registers"] = ordered_json::array();
    for (const auto& r : spec.registers)
        doc["registers"].push_back(
            {{"name", r.name}, {"width", r.width}, {"reset", r.reset_value}});
    doc["initial"] = spec.initial;
    doc["encoding"] = encoding_name(spec.encoding);
    doc["states"] = ordered_json::array();
    for (const auto& s : spec.states) {
        ordered_json js;
        js["name"] = s.name;
        js["moore"] = ordered_json::object();
        for (const auto& [name, value] : s.moore) js["moore"][name] = value;
        js["transitions"] = ordered_json::array();
        for (const auto& t : s.transitions) {
            ordered_json jt;
            jt["guard"] = to_string(t.guard);
            jt["target"] = t.target;
            jt["actions"] = ordered_json::object();
            for (const auto& [name, value] : t.actions) jt["actions"][name] = to_string(value);
            js["transitions"].push_back(std::move(jt));
        }
        doc["states"].push_back(std::move(js));
    }
    return doc.dump(2) + "\n";
}

}  // namespace fsmforge::ir
