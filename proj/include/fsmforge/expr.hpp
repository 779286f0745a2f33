#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>

#include "fsmforge/diag.hpp"

namespace fsmforge::ir {

enum class UnOp { LogicNot, BitNot };
enum class BinOp { And, Or, Xor, Eq, Neq, Lt, Gt, Le, Ge, Add, Sub };

/// Immutable expression tree over unsigned bit vectors. Nodes are shared
/// so copies of specs stay cheap.
class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

class Expr {
public:
    enum class Kind { Const, Ref, Unary, Binary };

    static ExprPtr constant(std::uint64_t value, int width);
    static ExprPtr ref(std::string name);
    static ExprPtr unary(UnOp op, ExprPtr operand);
    static ExprPtr binary(BinOp op, ExprPtr lhs, ExprPtr rhs);

    /// The always-true guard: constant 1, width 1.
    static ExprPtr always_true();

    Kind kind() const { return kind_; }
    std::uint64_t value() const { return value_; }
    int width() const { return width_; }
    const std::string& name() const { return name_; }
    UnOp un_op() const { return un_op_; }
    BinOp bin_op() const { return bin_op_; }
    const ExprPtr& lhs() const { return lhs_; }
    const ExprPtr& rhs() const { return rhs_; }

    bool is_const_true() const { return kind_ == Kind::Const && value_ != 0; }

    friend bool equal(const ExprPtr& a, const ExprPtr& b);

private:
    Kind kind_;
    std::uint64_t value_ = 0;
    int width_ = 0;
    std::string name_;
    UnOp un_op_ = UnOp::LogicNot;
    BinOp bin_op_ = BinOp::And;
    ExprPtr lhs_;
    ExprPtr rhs_;

    explicit Expr(Kind k) : kind_(k) {}
};

bool equal(const ExprPtr& a, const ExprPtr& b);

/// Natural width of an unsigned value: bit length, at least 1.
int natural_width(std::uint64_t value);

std::uint64_t width_mask(int width);

using Env = std::map<std::string, std::uint64_t>;

/// Declared widths of referencable names, used for width inference.
using WidthMap = std::map<std::string, int>;

/// Self-determined width of an expression (Verilog-2005 sizing rules).
/// References must resolve in `widths`; throws ContractError(E_UNBOUND).
int self_width(const ExprPtr& expr, const WidthMap& widths);

/// Evaluates with Verilog context-determined sizing: arithmetic and bitwise
/// operands are widened to max(self width, context width) before the
/// operation; comparisons size their operands against each other and yield
/// one bit; logical not yields one bit. `context_width` 0 means
/// self-determined. Pure; throws ContractError(E_UNBOUND) on names missing
/// from the environment.
std::uint64_t eval_expr(const ExprPtr& expr, const Env& env, const WidthMap& widths,
                        int context_width = 0);

/// Canonical source form: minimal parentheses, single spaces around binary
/// operators, decimal constants. parse_expr(to_string(e)) reproduces e.
std::string to_string(const ExprPtr& expr);

/// Parses the guard/action grammar: identifiers, decimal/hex literals,
/// ! ~ unary, && & | || ^ == != < > <= >= + - and parentheses. `&`/`&&`
/// (and `|`/`||`) denote the same bitwise operator.
Result<ExprPtr> parse_expr(const std::string& text);

const char* bin_op_token(BinOp op);

}  // namespace fsmforge::ir
