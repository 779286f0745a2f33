#include "fsmforge/netlist.hpp"

#include <cctype>
#include <charconv>
#include <set>
#include <unordered_set>

namespace fsmforge::codegen {

std::uint64_t NetlistModel::localparam_value(const std::string& name) const {
    for (const auto& [n, v] : localparams)
        if (n == name) return v;
    throw ContractError("E_UNBOUND", "no localparam '" + name + "'");
}

std::string NetlistModel::state_name_of(std::uint64_t code) const {
    for (const auto& [n, v] : localparams)
        if (v == code) return n;
    return "";
}

namespace {

struct VToken {
    enum class Kind { Ident, Number, Sized, Punct, End };
    Kind kind = Kind::End;
    std::string text;
    std::uint64_t number = 0;
    int size = 0;  // width for sized literals
    int line = 1;
    int col = 1;
};

class VLexer {
public:
    explicit VLexer(const std::string& text) : text_(text) {}

    // Tokenizes the whole input up front; errors carry line/column.
    Result<std::vector<VToken>> run() {
        std::vector<VToken> tokens;
        while (true) {
            skip_space_and_comments();
            if (pos_ >= text_.size()) {
                tokens.push_back({VToken::Kind::End, "", 0, 0, line_, col_});
                return Result<std::vector<VToken>>::success(std::move(tokens));
            }
            int line = line_, col = col_;
            char c = text_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::string ident;
                while (pos_ < text_.size() &&
                       (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                    ident += take();
                tokens.push_back({VToken::Kind::Ident, ident, 0, 0, line, col});
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c))) {
                std::uint64_t first = 0;
                std::string digits;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    digits += take();
                std::from_chars(digits.data(), digits.data() + digits.size(), first);
                if (pos_ < text_.size() && text_[pos_] == '\'') {
                    take();
                    if (pos_ >= text_.size() || (text_[pos_] != 'd' && text_[pos_] != 'D')) {
                        if (pos_ < text_.size() &&
                            std::string("bBoOhH").find(text_[pos_]) != std::string::npos)
                            return fail("E_SUBSET", "non-decimal literal base", line, col);
                        return fail("E_VPARSE", "expected 'd after literal size", line, col);
                    }
                    take();
                    std::string value_digits;
                    while (pos_ < text_.size() &&
                           std::isdigit(static_cast<unsigned char>(text_[pos_])))
                        value_digits += take();
                    if (value_digits.empty())
                        return fail("E_VPARSE", "sized literal missing digits", line, col);
                    std::uint64_t value = 0;
                    std::from_chars(value_digits.data(), value_digits.data() + value_digits.size(),
                                    value);
                    if (first < 1 || first > 64)
                        return fail("E_VPARSE", "literal size out of range", line, col);
                    tokens.push_back(
                        {VToken::Kind::Sized, digits + "'d" + value_digits, value,
                         static_cast<int>(first), line, col});
                } else {
                    tokens.push_back({VToken::Kind::Number, digits, first, 0, line, col});
                }
                continue;
            }
            static const char* two_char[] = {"<=", ">=", "==", "!="};
            if (pos_ + 1 < text_.size()) {
                std::string pair = text_.substr(pos_, 2);
                bool matched = false;
                for (const char* op : two_char) {
                    if (pair == op) {
                        take();
                        take();
                        tokens.push_back({VToken::Kind::Punct, pair, 0, 0, line, col});
                        matched = true;
                        break;
                    }
                }
                if (matched) continue;
            }
            if (std::string("()[]:;,@*=<>!~&|^+-").find(c) != std::string::npos) {
                tokens.push_back({VToken::Kind::Punct, std::string(1, take()), 0, 0, line, col});
                continue;
            }
            return fail("E_VPARSE", std::string("unexpected character '") + c + "'", line, col);
        }
    }

private:
    char take() {
        char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_space_and_comments() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                take();
            } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
                while (pos_ < text_.size() && text_[pos_] != '\n') take();
            } else {
                break;
            }
        }
    }

    static Result<std::vector<VToken>> fail(const std::string& code, const std::string& msg,
                                            int line, int col) {
        return Result<std::vector<VToken>>::failure(make_error(
            code, msg + " at line " + std::to_string(line),
            std::to_string(line) + ":" + std::to_string(col)));
    }

    const std::string& text_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

// Constructs that are legal Verilog but outside the emitted dialect.
bool is_foreign_construct(const std::string& word) {
    static const std::unordered_set<std::string> kForeign = {
        "generate", "genvar", "initial", "assign", "wire", "function", "task", "for",
        "while", "repeat", "forever", "integer", "real", "specify", "primitive",
        "casex", "casez", "parameter", "fork", "wait", "deassign", "force", "release",
        "defparam", "event", "time", "tri",
    };
    return kForeign.count(word) > 0;
}

class VParser {
public:
    explicit VParser(std::vector<VToken> tokens) : tokens_(std::move(tokens)) {}

    Result<NetlistModel> parse() {
        try {
            parse_module();
            finalize();
            return Result<NetlistModel>::success(std::move(model_));
        } catch (const Diagnostic& d) {
            return Result<NetlistModel>::failure(d);
        }
    }

private:
    [[noreturn]] void fail(const std::string& code, const std::string& msg) {
        fail_at(peek(), code, msg);
    }

    [[noreturn]] static void fail_at(const VToken& t, const std::string& code,
                                     const std::string& msg) {
        throw make_error(code, msg + " at line " + std::to_string(t.line),
                         std::to_string(t.line) + ":" + std::to_string(t.col));
    }

    const VToken& peek() const { return tokens_[pos_]; }
    VToken take() { return tokens_[pos_++]; }

    bool at_ident(const char* word) const {
        return peek().kind == VToken::Kind::Ident && peek().text == word;
    }
    bool at_punct(const char* p) const {
        return peek().kind == VToken::Kind::Punct && peek().text == p;
    }

    void expect_ident(const char* word) {
        if (!at_ident(word)) {
            if (peek().kind == VToken::Kind::Ident && is_foreign_construct(peek().text))
                fail("E_SUBSET", "unsupported construct '" + peek().text + "'");
            fail("E_VPARSE", std::string("expected '") + word + "'");
        }
        take();
    }

    void expect_punct(const char* p) {
        if (!at_punct(p)) fail("E_VPARSE", std::string("expected '") + p + "'");
        take();
    }

    std::string expect_name() {
        if (peek().kind != VToken::Kind::Ident) fail("E_VPARSE", "expected an identifier");
        return take().text;
    }

    // "[msb:0]" -> msb+1; absent range means width 1.
    int parse_opt_range() {
        if (!at_punct("[")) return 1;
        take();
        if (peek().kind != VToken::Kind::Number) fail("E_VPARSE", "expected a range bound");
        std::uint64_t msb = take().number;
        expect_punct(":");
        if (peek().kind != VToken::Kind::Number || peek().number != 0)
            fail("E_VPARSE", "expected ':0' range");
        take();
        expect_punct("]");
        if (msb > 63) fail("E_VPARSE", "range wider than 64 bits");
        return static_cast<int>(msb) + 1;
    }

    void declare(const std::string& name, int width) {
        if (model_.net_widths.count(name)) fail("E_VPARSE", "duplicate declaration '" + name + "'");
        model_.net_widths[name] = width;
    }

    void parse_module() {
        expect_ident("module");
        model_.module_name = expect_name();
        expect_punct("(");
        while (true) {
            if (at_ident("input")) {
                take();
                expect_ident("wire");
                int width = parse_opt_range();
                std::string name = expect_name();
                declare(name, width);
                raw_inputs_.push_back({name, width});
            } else if (at_ident("output")) {
                take();
                expect_ident("reg");
                int width = parse_opt_range();
                std::string name = expect_name();
                declare(name, width);
                model_.outputs.push_back({name, width});
            } else {
                fail("E_VPARSE", "expected a port declaration");
            }
            if (at_punct(",")) {
                take();
                continue;
            }
            break;
        }
        expect_punct(")");
        expect_punct(";");

        while (!at_ident("endmodule")) {
            if (at_ident("localparam")) {
                parse_localparam();
            } else if (at_ident("reg")) {
                parse_reg_decl();
            } else if (at_ident("always")) {
                parse_always();
            } else if (peek().kind == VToken::Kind::Ident && is_foreign_construct(peek().text)) {
                fail("E_SUBSET", "unsupported construct '" + peek().text + "'");
            } else if (peek().kind == VToken::Kind::End) {
                fail("E_VPARSE", "missing 'endmodule'");
            } else {
                fail("E_VPARSE", "unexpected token '" + peek().text + "'");
            }
        }
        take();  // endmodule
        if (peek().kind != VToken::Kind::End) fail("E_VPARSE", "trailing input after endmodule");
    }

    void parse_localparam() {
        take();
        int width = parse_opt_range();
        std::string name = expect_name();
        expect_punct("=");
        if (peek().kind != VToken::Kind::Sized) fail("E_VPARSE", "expected a sized literal");
        VToken lit = take();
        expect_punct(";");
        declare(name, width);
        model_.localparams.emplace_back(name, lit.number);
    }

    void parse_reg_decl() {
        take();
        int width = parse_opt_range();
        std::string name = expect_name();
        expect_punct(";");
        declare(name, width);
        reg_decls_.insert(name);
    }

    void parse_always() {
        take();
        expect_punct("@");
        expect_punct("(");
        if (at_punct("*")) {
            take();
            expect_punct(")");
            model_.comb_blocks.push_back(parse_block());
            return;
        }
        // Sequential block: posedge/negedge clock, optional reset edge.
        if (seen_seq_block_) fail("E_SUBSET", "multiple sequential always blocks");
        seen_seq_block_ = true;
        auto parse_edge = [&]() -> std::pair<ir::ClockEdge, std::string> {
            ir::ClockEdge edge = ir::ClockEdge::Rising;
            if (at_ident("posedge"))
                edge = ir::ClockEdge::Rising;
            else if (at_ident("negedge"))
                edge = ir::ClockEdge::Falling;
            else {
                fail("E_VPARSE", "expected posedge or negedge");
            }
            take();
            return {edge, expect_name()};
        };
        auto [clock_edge, clock_name] = parse_edge();
        model_.clock_edge = clock_edge;
        model_.clock_name = clock_name;
        if (at_ident("or")) {
            take();
            auto [reset_edge, reset_name] = parse_edge();
            model_.reset_kind = ir::ResetKind::Asynchronous;
            model_.reset_name = reset_name;
            model_.reset_active =
                reset_edge == ir::ClockEdge::Rising ? ir::ResetActive::High : ir::ResetActive::Low;
        }
        expect_punct(")");
        expect_ident("begin");
        expect_ident("if");
        expect_punct("(");
        bool negated = false;
        if (at_punct("!")) {
            take();
            negated = true;
        }
        std::string reset_ref = expect_name();
        expect_punct(")");
        if (model_.reset_kind == ir::ResetKind::Asynchronous) {
            if (reset_ref != model_.reset_name)
                fail("E_VPARSE", "reset condition does not match the reset sensitivity");
        } else {
            model_.reset_name = reset_ref;
            model_.reset_active = negated ? ir::ResetActive::Low : ir::ResetActive::High;
        }
        expect_ident("begin");
        while (!at_ident("end")) parse_reset_assign();
        take();
        expect_ident("else");
        expect_ident("begin");
        while (!at_ident("end")) parse_clocked_assign();
        take();
        expect_ident("end");  // of always
    }

    void parse_reset_assign() {
        std::string lhs = expect_name();
        expect_punct("<=");
        std::uint64_t value = 0;
        if (peek().kind == VToken::Kind::Sized) {
            value = take().number;
        } else if (peek().kind == VToken::Kind::Ident) {
            std::string ref = take().text;
            bool found = false;
            for (const auto& [n, v] : model_.localparams)
                if (n == ref) {
                    value = v;
                    found = true;
                    // The register reset to a state code is the state register.
                    if (model_.state_reg.empty()) model_.state_reg = lhs;
                    break;
                }
            if (!found) fail("E_VPARSE", "reset value must be a literal or localparam");
        } else {
            fail("E_VPARSE", "expected a reset value");
        }
        expect_punct(";");
        model_.reset_values[lhs] = value;
        model_.clocked_regs.push_back(lhs);
    }

    void parse_clocked_assign() {
        std::string lhs = expect_name();
        expect_punct("<=");
        std::string rhs = expect_name();
        expect_punct(";");
        model_.next_of[lhs] = rhs;
    }

    std::vector<VStmt> parse_block() {
        expect_ident("begin");
        std::vector<VStmt> stmts;
        while (!at_ident("end")) stmts.push_back(parse_stmt());
        take();
        return stmts;
    }

    VStmt parse_stmt() {
        if (at_ident("if")) return parse_if();
        if (at_ident("case")) return parse_case();
        if (peek().kind == VToken::Kind::Ident && is_foreign_construct(peek().text))
            fail("E_SUBSET", "unsupported construct '" + peek().text + "'");
        VStmt s;
        s.kind = VStmt::Kind::Assign;
        s.lhs = expect_name();
        expect_punct("=");
        s.rhs = parse_expr(0);
        expect_punct(";");
        return s;
    }

    VStmt parse_if() {
        VStmt s;
        s.kind = VStmt::Kind::If;
        take();  // if
        expect_punct("(");
        ir::ExprPtr cond = parse_expr(0);
        expect_punct(")");
        s.branches.emplace_back(cond, parse_block());
        while (at_ident("else")) {
            take();
            if (at_ident("if")) {
                take();
                expect_punct("(");
                ir::ExprPtr c = parse_expr(0);
                expect_punct(")");
                s.branches.emplace_back(c, parse_block());
            } else {
                s.branches.emplace_back(nullptr, parse_block());
                break;
            }
        }
        return s;
    }

    VStmt parse_case() {
        VStmt s;
        s.kind = VStmt::Kind::Case;
        take();  // case
        expect_punct("(");
        s.subject = parse_expr(0);
        expect_punct(")");
        bool has_default = false;
        while (!at_ident("endcase")) {
            if (peek().kind == VToken::Kind::End) fail("E_VPARSE", "missing 'endcase'");
            if (at_ident("default")) {
                take();
                expect_punct(":");
                s.default_arm = parse_block();
                has_default = true;
            } else if (peek().kind == VToken::Kind::Ident) {
                VToken label = take();
                std::uint64_t value = 0;
                bool found = false;
                for (const auto& [n, v] : model_.localparams)
                    if (n == label.text) {
                        value = v;
                        found = true;
                        break;
                    }
                if (!found)
                    fail_at(label, "E_VPARSE",
                            "case label '" + label.text + "' is not a localparam");
                expect_punct(":");
                s.arms.emplace_back(value, parse_block());
            } else if (peek().kind == VToken::Kind::Sized) {
                std::uint64_t value = take().number;
                expect_punct(":");
                s.arms.emplace_back(value, parse_block());
            } else {
                fail("E_VPARSE", "expected a case label");
            }
        }
        take();  // endcase
        if (!has_default) fail("E_SUBSET", "case without a default arm");
        return s;
    }

    // Expression grammar shares the IR precedence table; tokens are the
    // Verilog bitwise forms.
    static int op_precedence(const std::string& t) {
        if (t == "|") return 1;
        if (t == "^") return 2;
        if (t == "&") return 3;
        if (t == "==" || t == "!=") return 4;
        if (t == "<" || t == ">" || t == "<=" || t == ">=") return 5;
        if (t == "+" || t == "-") return 6;
        return -1;
    }

    static ir::BinOp op_of(const std::string& t) {
        if (t == "|") return ir::BinOp::Or;
        if (t == "^") return ir::BinOp::Xor;
        if (t == "&") return ir::BinOp::And;
        if (t == "==") return ir::BinOp::Eq;
        if (t == "!=") return ir::BinOp::Neq;
        if (t == "<") return ir::BinOp::Lt;
        if (t == ">") return ir::BinOp::Gt;
        if (t == "<=") return ir::BinOp::Le;
        if (t == ">=") return ir::BinOp::Ge;
        if (t == "+") return ir::BinOp::Add;
        return ir::BinOp::Sub;
    }

    ir::ExprPtr parse_expr(int min_prec) {
        ir::ExprPtr left = parse_unary();
        while (peek().kind == VToken::Kind::Punct) {
            int prec = op_precedence(peek().text);
            if (prec < 0 || prec < min_prec) break;
            ir::BinOp op = op_of(take().text);
            ir::ExprPtr right = parse_expr(prec + 1);
            left = ir::Expr::binary(op, left, right);
        }
        return left;
    }

    ir::ExprPtr parse_unary() {
        if (at_punct("!")) {
            take();
            return ir::Expr::unary(ir::UnOp::LogicNot, parse_unary());
        }
        if (at_punct("~")) {
            take();
            return ir::Expr::unary(ir::UnOp::BitNot, parse_unary());
        }
        if (at_punct("(")) {
            take();
            ir::ExprPtr e = parse_expr(0);
            expect_punct(")");
            return e;
        }
        if (peek().kind == VToken::Kind::Sized) {
            VToken t = take();
            return ir::Expr::constant(t.number, t.size);
        }
        if (peek().kind == VToken::Kind::Number)
            fail("E_SUBSET", "unsized numeric literal");
        if (peek().kind == VToken::Kind::Ident) {
            if (is_foreign_construct(peek().text))
                fail("E_SUBSET", "unsupported construct '" + peek().text + "'");
            return ir::Expr::ref(take().text);
        }
        fail("E_VPARSE", "expected an expression");
    }

    void check_expr_nets(const ir::ExprPtr& e) {
        switch (e->kind()) {
            case ir::Expr::Kind::Ref:
                if (!model_.net_widths.count(e->name()))
                    throw make_error("E_VPARSE", "undeclared net '" + e->name() + "'", "");
                return;
            case ir::Expr::Kind::Unary:
                check_expr_nets(e->lhs());
                return;
            case ir::Expr::Kind::Binary:
                check_expr_nets(e->lhs());
                check_expr_nets(e->rhs());
                return;
            default:
                return;
        }
    }

    void check_stmt_nets(const VStmt& s) {
        switch (s.kind) {
            case VStmt::Kind::Assign:
                if (!model_.net_widths.count(s.lhs))
                    throw make_error("E_VPARSE", "undeclared net '" + s.lhs + "'", "");
                check_expr_nets(s.rhs);
                return;
            case VStmt::Kind::If:
                for (const auto& [cond, body] : s.branches) {
                    if (cond) check_expr_nets(cond);
                    for (const auto& st : body) check_stmt_nets(st);
                }
                return;
            case VStmt::Kind::Case:
                check_expr_nets(s.subject);
                for (const auto& [value, body] : s.arms)
                    for (const auto& st : body) check_stmt_nets(st);
                for (const auto& st : s.default_arm) check_stmt_nets(st);
                return;
        }
    }

    void finalize() {
        if (!seen_seq_block_)
            throw make_error("E_VPARSE", "no sequential always block found", "");
        for (const auto& block : model_.comb_blocks)
            for (const auto& st : block) check_stmt_nets(st);
        for (const auto& [lhs, rhs] : model_.next_of) {
            if (!model_.net_widths.count(lhs) || !model_.net_widths.count(rhs))
                throw make_error("E_VPARSE", "undeclared net in sequential block", "");
        }
        // Inputs exclude the clock and reset infrastructure ports.
        for (const auto& p : raw_inputs_)
            if (p.name != model_.clock_name && p.name != model_.reset_name)
                model_.inputs.push_back(p);
        if (model_.state_reg.empty() && !model_.clocked_regs.empty())
            model_.state_reg = model_.clocked_regs.front();
    }

    std::vector<VToken> tokens_;
    size_t pos_ = 0;
    NetlistModel model_;
    std::vector<NetlistPort> raw_inputs_;
    std::set<std::string> reg_decls_;
    bool seen_seq_block_ = false;
};

}  // namespace

Result<NetlistModel> parse_emitted_verilog(const std::string& text) {
    auto tokens = VLexer(text).run();
    if (!tokens.ok()) return Result<NetlistModel>::failure(tokens.diagnostics);
    return VParser(std::move(*tokens)).parse();
}

}  // namespace fsmforge::codegen
