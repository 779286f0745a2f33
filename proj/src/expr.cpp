#include "fsmforge/expr.hpp"

#include <cctype>
#include <charconv>

namespace fsmforge::ir {

ExprPtr Expr::constant(std::uint64_t value, int width) {
    auto e = std::shared_ptr<Expr>(new Expr(Kind::Const));
    e->value_ = value;
    e->width_ = width;
    return e;
}

ExprPtr Expr::ref(std::string name) {
    auto e = std::shared_ptr<Expr>(new Expr(Kind::Ref));
    e->name_ = std::move(name);
    return e;
}

ExprPtr Expr::unary(UnOp op, ExprPtr operand) {
    auto e = std::shared_ptr<Expr>(new Expr(Kind::Unary));
    e->un_op_ = op;
    e->lhs_ = std::move(operand);
    return e;
}

ExprPtr Expr::binary(BinOp op, ExprPtr lhs, ExprPtr rhs) {
    auto e = std::shared_ptr<Expr>(new Expr(Kind::Binary));
    e->bin_op_ = op;
    e->lhs_ = std::move(lhs);
    e->rhs_ = std::move(rhs);
    return e;
}

ExprPtr Expr::always_true() {
    static const ExprPtr one = constant(1, 1);
    return one;
}

bool equal(const ExprPtr& a, const ExprPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind_ != b->kind_) return false;
    switch (a->kind_) {
        case Expr::Kind::Const:
            return a->value_ == b->value_ && a->width_ == b->width_;
        case Expr::Kind::Ref:
            return a->name_ == b->name_;
        case Expr::Kind::Unary:
            return a->un_op_ == b->un_op_ && equal(a->lhs_, b->lhs_);
        case Expr::Kind::Binary:
            return a->bin_op_ == b->bin_op_ && equal(a->lhs_, b->lhs_) && equal(a->rhs_, b->rhs_);
    }
    return false;
}

int natural_width(std::uint64_t value) {
    int w = 0;
    while (value != 0) {
        ++w;
        value >>= 1;
    }
    return w == 0 ? 1 : w;
}

std::uint64_t width_mask(int width) {
    if (width >= 64) return ~std::uint64_t{0};
    return (std::uint64_t{1} << width) - 1;
}

int self_width(const ExprPtr& expr, const WidthMap& widths) {
    switch (expr->kind()) {
        case Expr::Kind::Const:
            return expr->width();
        case Expr::Kind::Ref: {
            auto it = widths.find(expr->name());
            if (it == widths.end())
                throw ContractError("E_UNBOUND", "no declared width for '" + expr->name() + "'");
            return it->second;
        }
        case Expr::Kind::Unary:
            return expr->un_op() == UnOp::LogicNot ? 1 : self_width(expr->lhs(), widths);
        case Expr::Kind::Binary:
            switch (expr->bin_op()) {
                case BinOp::Eq:
                case BinOp::Neq:
                case BinOp::Lt:
                case BinOp::Gt:
                case BinOp::Le:
                case BinOp::Ge:
                    return 1;
                default:
                    return std::max(self_width(expr->lhs(), widths), self_width(expr->rhs(), widths));
            }
    }
    return 1;
}

std::uint64_t eval_expr(const ExprPtr& expr, const Env& env, const WidthMap& widths,
                        int context_width) {
    switch (expr->kind()) {
        case Expr::Kind::Const:
            return expr->value() & width_mask(std::max(expr->width(), context_width));
        case Expr::Kind::Ref: {
            auto it = env.find(expr->name());
            if (it == env.end())
                throw ContractError("E_UNBOUND", "'" + expr->name() + "' missing from environment");
            return it->second;
        }
        case Expr::Kind::Unary: {
            if (expr->un_op() == UnOp::LogicNot)
                return eval_expr(expr->lhs(), env, widths, 0) == 0 ? 1 : 0;
            int w = std::max(self_width(expr, widths), context_width);
            return ~eval_expr(expr->lhs(), env, widths, w) & width_mask(w);
        }
        case Expr::Kind::Binary: {
            BinOp op = expr->bin_op();
            switch (op) {
                case BinOp::Eq:
                case BinOp::Neq:
                case BinOp::Lt:
                case BinOp::Gt:
                case BinOp::Le:
                case BinOp::Ge: {
                    // Comparison operands size against each other only.
                    int w = std::max(self_width(expr->lhs(), widths), self_width(expr->rhs(), widths));
                    std::uint64_t l = eval_expr(expr->lhs(), env, widths, w);
                    std::uint64_t r = eval_expr(expr->rhs(), env, widths, w);
                    switch (op) {
                        case BinOp::Eq: return l == r;
                        case BinOp::Neq: return l != r;
                        case BinOp::Lt: return l < r;
                        case BinOp::Gt: return l > r;
                        case BinOp::Le: return l <= r;
                        default: return l >= r;
                    }
                }
                default: {
                    int w = std::max(self_width(expr, widths), context_width);
                    std::uint64_t l = eval_expr(expr->lhs(), env, widths, w);
                    std::uint64_t r = eval_expr(expr->rhs(), env, widths, w);
                    std::uint64_t mask = width_mask(w);
                    switch (op) {
                        case BinOp::And: return (l & r) & mask;
                        case BinOp::Or: return (l | r) & mask;
                        case BinOp::Xor: return (l ^ r) & mask;
                        case BinOp::Add: return (l + r) & mask;
                        default: return (l - r) & mask;  // Sub
                    }
                }
            }
        }
    }
    return 0;
}

namespace {

// Larger value binds tighter. Mirrors the token precedence in parse_expr.
int precedence(BinOp op) {
    switch (op) {
        case BinOp::Or: return 1;
        case BinOp::Xor: return 2;
        case BinOp::And: return 3;
        case BinOp::Eq:
        case BinOp::Neq: return 4;
        case BinOp::Lt:
        case BinOp::Gt:
        case BinOp::Le:
        case BinOp::Ge: return 5;
        case BinOp::Add:
        case BinOp::Sub: return 6;
    }
    return 0;
}

void print(const ExprPtr& e, std::string& out, int parent_prec, bool right_side) {
    switch (e->kind()) {
        case Expr::Kind::Const:
            out += std::to_string(e->value());
            return;
        case Expr::Kind::Ref:
            out += e->name();
            return;
        case Expr::Kind::Unary: {
            out += e->un_op() == UnOp::LogicNot ? '!' : '~';
            const ExprPtr& operand = e->lhs();
            bool need = operand->kind() == Expr::Kind::Binary;
            if (need) out += '(';
            print(operand, out, 100, false);
            if (need) out += ')';
            return;
        }
        case Expr::Kind::Binary: {
            int prec = precedence(e->bin_op());
            // Operators are left-associative; a right child at equal
            // precedence needs parentheses to round-trip.
            bool need = prec < parent_prec || (prec == parent_prec && right_side);
            if (need) out += '(';
            print(e->lhs(), out, prec, false);
            out += ' ';
            out += bin_op_token(e->bin_op());
            out += ' ';
            print(e->rhs(), out, prec, true);
            if (need) out += ')';
            return;
        }
    }
}

}  // namespace

const char* bin_op_token(BinOp op) {
    switch (op) {
        case BinOp::And: return "&&";
        case BinOp::Or: return "||";
        case BinOp::Xor: return "^";
        case BinOp::Eq: return "==";
        case BinOp::Neq: return "!=";
        case BinOp::Lt: return "<";
        case BinOp::Gt: return ">";
        case BinOp::Le: return "<=";
        case BinOp::Ge: return ">=";
        case BinOp::Add: return "+";
        case BinOp::Sub: return "-";
    }
    return "?";
}

namespace {

struct Token {
    enum class Kind { Ident, Number, Op, End } kind;
    std::string text;
    std::uint64_t number = 0;
    size_t pos = 0;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    Result<Token> next() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        size_t start = pos_;
        if (pos_ >= text_.size()) return Result<Token>::success({Token::Kind::End, "", 0, start});
        char c = text_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            return Result<Token>::success({Token::Kind::Ident, text_.substr(start, pos_ - start), 0, start});
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            int base = 10;
            if (c == '0' && pos_ + 1 < text_.size() && (text_[pos_ + 1] == 'x' || text_[pos_ + 1] == 'X')) {
                base = 16;
                pos_ += 2;
            }
            size_t digits = pos_;
            while (pos_ < text_.size() &&
                   (base == 16 ? std::isxdigit(static_cast<unsigned char>(text_[pos_]))
                               : std::isdigit(static_cast<unsigned char>(text_[pos_]))))
                ++pos_;
            std::uint64_t value = 0;
            auto [ptr, ec] = std::from_chars(text_.data() + digits, text_.data() + pos_, value, base);
            if (ec != std::errc{} || ptr != text_.data() + pos_ || digits == pos_)
                return fail("bad numeric literal", start);
            return Result<Token>::success({Token::Kind::Number, text_.substr(start, pos_ - start), value, start});
        }
        static const char* two_char[] = {"&&", "||", "==", "!=", "<=", ">="};
        if (pos_ + 1 < text_.size()) {
            std::string pair = text_.substr(pos_, 2);
            for (const char* op : two_char) {
                if (pair == op) {
                    pos_ += 2;
                    return Result<Token>::success({Token::Kind::Op, pair, 0, start});
                }
            }
        }
        if (std::string("&|^!~<>+-()").find(c) != std::string::npos) {
            ++pos_;
            return Result<Token>::success({Token::Kind::Op, std::string(1, c), 0, start});
        }
        return fail(std::string("unexpected character '") + c + "'", start);
    }

    static Result<Token> fail(const std::string& msg, size_t pos) {
        return Result<Token>::failure(
            make_error("E_EXPR", msg + " at offset " + std::to_string(pos)));
    }

private:
    const std::string& text_;
    size_t pos_ = 0;
};

class Parser {
public:
    explicit Parser(const std::string& text) : lexer_(text) {}

    Result<ExprPtr> parse() {
        if (auto r = advance(); !r.ok()) return Result<ExprPtr>::failure(r.diagnostics);
        auto expr = parse_binary(0);
        if (!expr.ok()) return expr;
        if (tok_.kind != Token::Kind::End)
            return fail("trailing input after expression", tok_.pos);
        return expr;
    }

private:
    static Result<ExprPtr> fail(const std::string& msg, size_t pos) {
        return Result<ExprPtr>::failure(
            make_error("E_EXPR", msg + " at offset " + std::to_string(pos)));
    }

    Result<bool> advance() {
        auto r = lexer_.next();
        if (!r.ok()) return Result<bool>::failure(r.diagnostics);
        tok_ = *r;
        return Result<bool>::success(true);
    }

    static int op_precedence(const std::string& t) {
        if (t == "||" || t == "|") return 1;
        if (t == "^") return 2;
        if (t == "&&" || t == "&") return 3;
        if (t == "==" || t == "!=") return 4;
        if (t == "<" || t == ">" || t == "<=" || t == ">=") return 5;
        if (t == "+" || t == "-") return 6;
        return -1;
    }

    static BinOp op_of(const std::string& t) {
        if (t == "||" || t == "|") return BinOp::Or;
        if (t == "^") return BinOp::Xor;
        if (t == "&&" || t == "&") return BinOp::And;
        if (t == "==") return BinOp::Eq;
        if (t == "!=") return BinOp::Neq;
        if (t == "<") return BinOp::Lt;
        if (t == ">") return BinOp::Gt;
        if (t == "<=") return BinOp::Le;
        if (t == ">=") return BinOp::Ge;
        if (t == "+") return BinOp::Add;
        return BinOp::Sub;
    }

    Result<ExprPtr> parse_binary(int min_prec) {
        auto lhs = parse_unary();
        if (!lhs.ok()) return lhs;
        ExprPtr left = *lhs;
        while (tok_.kind == Token::Kind::Op) {
            int prec = op_precedence(tok_.text);
            if (prec < 0 || prec < min_prec) break;
            BinOp op = op_of(tok_.text);
            if (auto r = advance(); !r.ok()) return Result<ExprPtr>::failure(r.diagnostics);
            auto rhs = parse_binary(prec + 1);
            if (!rhs.ok()) return rhs;
            left = Expr::binary(op, left, *rhs);
        }
        return Result<ExprPtr>::success(left);
    }

    Result<ExprPtr> parse_unary() {
        if (tok_.kind == Token::Kind::Op && (tok_.text == "!" || tok_.text == "~")) {
            UnOp op = tok_.text == "!" ? UnOp::LogicNot : UnOp::BitNot;
            if (auto r = advance(); !r.ok()) return Result<ExprPtr>::failure(r.diagnostics);
            auto operand = parse_unary();
            if (!operand.ok()) return operand;
            return Result<ExprPtr>::success(Expr::unary(op, *operand));
        }
        return parse_primary();
    }

    Result<ExprPtr> parse_primary() {
        switch (tok_.kind) {
            case Token::Kind::Number: {
                auto e = Expr::constant(tok_.number, natural_width(tok_.number));
                if (auto r = advance(); !r.ok()) return Result<ExprPtr>::failure(r.diagnostics);
                return Result<ExprPtr>::success(e);
            }
            case Token::Kind::Ident: {
                auto e = Expr::ref(tok_.text);
                if (auto r = advance(); !r.ok()) return Result<ExprPtr>::failure(r.diagnostics);
                return Result<ExprPtr>::success(e);
            }
            case Token::Kind::Op:
                if (tok_.text == "(") {
                    if (auto r = advance(); !r.ok()) return Result<ExprPtr>::failure(r.diagnostics);
                    auto inner = parse_binary(0);
                    if (!inner.ok()) return inner;
                    if (tok_.kind != Token::Kind::Op || tok_.text != ")")
                        return fail("expected ')'", tok_.pos);
                    if (auto r = advance(); !r.ok()) return Result<ExprPtr>::failure(r.diagnostics);
                    return inner;
                }
                return fail("unexpected operator '" + tok_.text + "'", tok_.pos);
            case Token::Kind::End:
                return fail("unexpected end of expression", tok_.pos);
        }
        return fail("unexpected token", tok_.pos);
    }

    Lexer lexer_;
    Token tok_;
};

}  // namespace

std::string to_string(const ExprPtr& expr) {
    std::string out;
    print(expr, out, 0, false);
    return out;
}

Result<ExprPtr> parse_expr(const std::string& text) {
    return Parser(text).parse();
}

}  // namespace fsmforge::ir
