#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mlbisim/core/rational.h"

namespace mlbisim::prism {

enum class Type { integer, boolean, rational };

std::string_view type_name(Type t);

enum class Op {
    // binary
    add, sub, mul, div,
    eq, ne, lt, le, gt, ge,
    conj, disj, implies,
    // unary
    neg, negate,
};

/// Expression tree node. Literals carry their value as a Rational (booleans
/// as 0/1); identifiers are resolved against constants and variables later.
struct Expr {
    enum class Kind { literal, identifier, unary, binary };

    Kind kind = Kind::literal;
    Type literal_type = Type::integer;
    Rational value;
    std::string name;
    Op op = Op::add;
    std::shared_ptr<const Expr> lhs;
    std::shared_ptr<const Expr> rhs;
    int line = 0;
    int column = 0;
};

using ExprPtr = std::shared_ptr<const Expr>;

ExprPtr make_literal(Rational value, Type type, int line = 0, int column = 0);
ExprPtr make_identifier(std::string name, int line = 0, int column = 0);
ExprPtr make_unary(Op op, ExprPtr operand, int line = 0, int column = 0);
ExprPtr make_binary(Op op, ExprPtr lhs, ExprPtr rhs, int line = 0, int column = 0);

/// Structural equality, ignoring source positions.
bool same_expr(const ExprPtr& a, const ExprPtr& b);

/// Names of all identifiers occurring in `e`.
void collect_identifiers(const ExprPtr& e, std::vector<std::string>& out);

struct ConstantDecl {
    std::string name;
    Type type = Type::integer;
    ExprPtr value;  ///< null for a parameter (bound at instantiation)
    int line = 0;
};

struct VariableDecl {
    std::string name;
    bool is_bool = false;
    ExprPtr lower;
    ExprPtr upper;
    ExprPtr init;  ///< null: defaults to the lower bound (false for booleans)
    bool parametric = false;
    int line = 0;
};

struct Assignment {
    std::string variable;
    ExprPtr value;
};

struct Update {
    ExprPtr probability;  ///< null means probability 1
    std::vector<Assignment> assignments;
};

struct Command {
    std::string action;  ///< empty for unlabelled commands
    ExprPtr guard;
    std::vector<Update> updates;
    int line = 0;
};

struct Module {
    std::string name;
    std::vector<VariableDecl> variables;
    std::vector<Command> commands;
};

struct LabelDecl {
    std::string name;
    ExprPtr expr;
};

/// A parsed program of the supported guarded-command subset. Renamed modules
/// are stored already expanded.
struct Program {
    std::vector<ConstantDecl> constants;
    std::vector<VariableDecl> globals;
    std::vector<Module> modules;
    std::vector<LabelDecl> labels;

    /// Constants declared without a value.
    std::vector<std::string> parameters() const;
    /// All variables in state-vector order: globals, then module locals.
    std::vector<const VariableDecl*> variables() const;
    /// Names of the variables whose upper bound depends on a parameter.
    std::vector<std::string> parametric_variables() const;
    const ConstantDecl* find_constant(std::string_view name) const;
    bool is_closed() const { return parameters().empty(); }
};

/// Parses program text. Throws ParseError (syntax, unsupported construct,
/// undeclared identifier, type mismatch) with line and column.
Program parse(std::string_view text);

/// Reads and parses a file.
Program parse_file(const std::string& path);

/// Binds some parameters to integer values, leaving the rest free. Throws
/// ModelError for names that are not parameters.
Program bind(const Program& program, const std::map<std::string, std::int64_t>& bindings);

/// Binds every parameter and folds all constants into the expressions. The
/// result references only variables. Throws ModelError on missing or extra
/// bindings and on variable ranges that become empty or exclude the initial value.
Program instantiate(const Program& program, const std::map<std::string, std::int64_t>& bindings);

/// Pretty-prints a program in the accepted syntax; parse(print(p)) reproduces p.
std::string print(const Program& program);
std::string print(const ExprPtr& e);

/// Structural equality of two programs (source positions ignored).
bool same_program(const Program& a, const Program& b);

/// Evaluates a closed expression that references only constants with known
/// values in `env` (used for bounds and constant folding).
Rational evaluate_constant(const ExprPtr& e, const std::map<std::string, Rational>& env);

}  // namespace mlbisim::prism
