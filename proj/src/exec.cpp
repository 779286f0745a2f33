#include "fsmforge/exec.hpp"

#include "fsmforge/encode.hpp"

namespace fsmforge::sim {

namespace {

class IrExec final : public ExecModel {
public:
    explicit IrExec(ir::FsmSpec spec)
        : spec_(std::move(spec)),
          enc_(codegen::encode_states(spec_, spec_.encoding)),
          widths_(spec_.reference_widths()) {
        for (const auto& s : spec_.inputs) sig_.inputs.push_back({s.name, s.width});
        for (const auto& s : spec_.outputs) sig_.outputs.push_back({s.name, s.width});
        reset();
    }

    void reset() override {
        state_ = *spec_.state_index(spec_.initial);
        regs_.clear();
        for (const auto& r : spec_.registers) regs_[r.name] = r.reset_value;
    }

    Valuation step(const Valuation& inputs) override {
        ir::Env env = regs_;
        for (const auto& p : sig_.inputs) {
            auto it = inputs.find(p.name);
            if (it == inputs.end())
                throw ContractError("E_UNBOUND", "missing input '" + p.name + "'");
            env[p.name] = it->second & ir::width_mask(p.width);
        }

        const ir::StateDef& st = spec_.states[state_];
        const ir::Transition* taken = nullptr;
        for (const auto& t : st.transitions) {
            if (ir::eval_expr(t.guard, env, widths_) != 0) {
                taken = &t;
                break;
            }
        }

        Valuation outputs;
        for (const auto& o : spec_.outputs) outputs[o.name] = 0;
        for (const auto& [name, value] : st.moore) outputs[name] = value;

        Valuation next_regs = regs_;
        if (taken) {
            for (const auto& [dest, value] : taken->actions) {
                if (const auto* out = spec_.find_output(dest)) {
                    outputs[dest] =
                        ir::eval_expr(value, env, widths_, out->width) & ir::width_mask(out->width);
                } else {
                    const auto* reg = spec_.find_register(dest);
                    next_regs[dest] =
                        ir::eval_expr(value, env, widths_, reg->width) & ir::width_mask(reg->width);
                }
            }
            state_ = *spec_.state_index(taken->target);
        }
        regs_ = std::move(next_regs);
        return outputs;
    }

    const PortSignature& ports() const override { return sig_; }

    Internals internals() const override {
        return Internals{spec_.states[state_].name, enc_.assignments[state_].second, regs_};
    }

private:
    ir::FsmSpec spec_;
    codegen::EncodingMap enc_;
    ir::WidthMap widths_;
    PortSignature sig_;
    std::size_t state_ = 0;
    Valuation regs_;
};

class NetlistExec final : public ExecModel {
public:
    explicit NetlistExec(codegen::NetlistModel model) : model_(std::move(model)) {
        for (const auto& p : model_.inputs) sig_.inputs.push_back({p.name, p.width});
        for (const auto& p : model_.outputs) sig_.outputs.push_back({p.name, p.width});
        for (const auto& [name, width] : model_.net_widths) widths_[name] = width;
        reset();
    }

    void reset() override {
        regs_.clear();
        for (const auto& [name, value] : model_.reset_values)
            regs_[name] = value & ir::width_mask(model_.net_widths.at(name));
    }

    Valuation step(const Valuation& inputs) override {
        ir::Env env;
        for (const auto& [name, value] : model_.localparams) env[name] = value;
        for (const auto& [name, value] : regs_) env[name] = value;
        for (const auto& p : model_.inputs) {
            auto it = inputs.find(p.name);
            if (it == inputs.end())
                throw ContractError("E_UNBOUND", "missing input '" + p.name + "'");
            env[p.name] = it->second & ir::width_mask(p.width);
        }

        for (const auto& block : model_.comb_blocks)
            for (const auto& st : block) exec_stmt(st, env);

        Valuation outputs;
        for (const auto& p : model_.outputs) {
            auto it = env.find(p.name);
            if (it == env.end())
                throw ContractError("E_UNBOUND", "output '" + p.name + "' was never assigned");
            outputs[p.name] = it->second;
        }

        Valuation next = regs_;
        for (const auto& [lhs, rhs] : model_.next_of) {
            auto it = env.find(rhs);
            if (it == env.end())
                throw ContractError("E_UNBOUND", "next value '" + rhs + "' was never assigned");
            next[lhs] = it->second & ir::width_mask(model_.net_widths.at(lhs));
        }
        regs_ = std::move(next);
        return outputs;
    }

    const PortSignature& ports() const override { return sig_; }

    Internals internals() const override {
        Internals in;
        auto it = regs_.find(model_.state_reg);
        in.state_code = it == regs_.end() ? 0 : it->second;
        in.state_name = model_.state_name_of(in.state_code);
        for (const auto& [name, value] : regs_)
            if (name != model_.state_reg) in.registers[name] = value;
        return in;
    }

private:
    void exec_stmt(const codegen::VStmt& s, ir::Env& env) {
        using Kind = codegen::VStmt::Kind;
        switch (s.kind) {
            case Kind::Assign: {
                int w = model_.net_widths.at(s.lhs);
                env[s.lhs] = ir::eval_expr(s.rhs, env, widths_, w) & ir::width_mask(w);
                return;
            }
            case Kind::If:
                for (const auto& [cond, body] : s.branches) {
                    if (!cond || ir::eval_expr(cond, env, widths_) != 0) {
                        for (const auto& st : body) exec_stmt(st, env);
                        return;
                    }
                }
                return;
            case Kind::Case: {
                std::uint64_t subject = ir::eval_expr(s.subject, env, widths_);
                for (const auto& [value, body] : s.arms) {
                    if (value == subject) {
                        for (const auto& st : body) exec_stmt(st, env);
                        return;
                    }
                }
                for (const auto& st : s.default_arm) exec_stmt(st, env);
                return;
            }
        }
    }

    codegen::NetlistModel model_;
    PortSignature sig_;
    ir::WidthMap widths_;
    Valuation regs_;
};

}  // namespace

std::unique_ptr<ExecModel> interpret(const ir::FsmSpec& spec) {
    if (!ir::validate(spec).empty())
        throw ContractError("E_EMIT_INTERNAL", "interpret requires a validated spec");
    return std::make_unique<IrExec>(spec);
}

std::unique_ptr<ExecModel> netlist_model(codegen::NetlistModel model) {
    return std::make_unique<NetlistExec>(std::move(model));
}

}  // namespace fsmforge::sim
