// Recursive-descent parser for the supported guarded-command subset, followed
// by name resolution and type checking.

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "analysis.h"
#include "lexer.h"
#include "mlbisim/core/errors.h"
#include "mlbisim/prism/program.h"

namespace mlbisim::prism {

using detail::Tok;
using detail::Token;

namespace {

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    Program parse_program() {
        Program prog;
        expect_model_type();
        while (!at(Tok::end)) {
            const Token& t = cur();
            if (is_kw("const")) {
                prog.constants.push_back(parse_constant());
            } else if (is_kw("global")) {
                next();
                prog.globals.push_back(parse_variable());
            } else if (is_kw("module")) {
                parse_module(prog);
            } else if (is_kw("label")) {
                prog.labels.push_back(parse_label());
            } else if (t.kind == Tok::keyword) {
                unsupported(t);
            } else {
                fail("expected a declaration, module or label but found '" + t.text + "'", t);
            }
        }
        return prog;
    }

private:
    const Token& cur() const { return toks_[pos_]; }
    const Token& look(std::size_t k) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    bool at(Tok k) const { return cur().kind == k; }
    bool is_kw(std::string_view w) const { return cur().kind == Tok::keyword && cur().text == w; }
    const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] static void fail(const std::string& msg, const Token& t) { throw ParseError(msg, t.line, t.column); }

    [[noreturn]] static void unsupported(const Token& t) {
        static const std::map<std::string, std::string> productions = {
            {"dtmc", "model type"}, {"probabilistic", "model type"}, {"ctmc", "model type"},
            {"stochastic", "model type"}, {"pta", "model type"}, {"ma", "model type"},
            {"formula", "formula declaration"}, {"rewards", "reward structure"},
            {"init", "init...endinit block"}, {"system", "system...endsystem composition"},
            {"clock", "clock variable"}, {"invariant", "module invariant"},
            {"min", "function call"}, {"max", "function call"}, {"floor", "function call"},
            {"ceil", "function call"}, {"pow", "function call"}, {"mod", "function call"},
            {"log", "function call"}, {"filter", "filter"},
        };
        auto it = productions.find(t.text);
        std::string what = it != productions.end() ? it->second + " '" + t.text + "'" : "'" + t.text + "'";
        fail("unsupported construct: " + what, t);
    }

    const Token& expect(Tok k, std::string_view what) {
        if (!at(k)) fail("expected " + std::string(what) + " but found '" + cur().text + "'", cur());
        return next();
    }

    void expect_kw(std::string_view w) {
        if (!is_kw(w)) fail("expected '" + std::string(w) + "' but found '" + cur().text + "'", cur());
        next();
    }

    std::string expect_ident(std::string_view what) {
        if (at(Tok::keyword)) fail("keyword '" + cur().text + "' cannot be used as " + std::string(what), cur());
        return expect(Tok::identifier, what).text;
    }

    void expect_model_type() {
        if (is_kw("mdp") || is_kw("nondeterministic")) {
            next();
            return;
        }
        if (cur().kind == Tok::keyword) unsupported(cur());
        fail("expected model type 'mdp'", cur());
    }

    ConstantDecl parse_constant() {
        ConstantDecl c;
        c.line = cur().line;
        expect_kw("const");
        if (is_kw("int")) {
            next();
        } else if (is_kw("bool")) {
            c.type = Type::boolean;
            next();
        } else if (is_kw("double")) {
            c.type = Type::rational;
            next();
        }
        c.name = expect_ident("constant name");
        if (at(Tok::equal)) {
            next();
            c.value = parse_expr();
        }
        expect(Tok::semicolon, "';'");
        return c;
    }

    VariableDecl parse_variable() {
        VariableDecl v;
        v.line = cur().line;
        v.name = expect_ident("variable name");
        expect(Tok::colon, "':'");
        if (is_kw("bool")) {
            next();
            v.is_bool = true;
            v.lower = make_literal(0, Type::boolean);
            v.upper = make_literal(1, Type::boolean);
        } else if (is_kw("clock")) {
            unsupported(cur());
        } else {
            expect(Tok::lbracket, "'[' or 'bool'");
            v.lower = parse_expr();
            expect(Tok::dotdot, "'..'");
            v.upper = parse_expr();
            expect(Tok::rbracket, "']'");
        }
        if (is_kw("init")) {
            next();
            v.init = parse_expr();
        }
        expect(Tok::semicolon, "';'");
        return v;
    }

    void parse_module(Program& prog) {
        expect_kw("module");
        const Token& name_tok = cur();
        Module m;
        m.name = expect_ident("module name");
        for (const auto& existing : prog.modules) {
            if (existing.name == m.name) fail("duplicate module '" + m.name + "'", name_tok);
        }
        if (at(Tok::equal)) {
            next();
            const Token& src_tok = cur();
            std::string source = expect_ident("module name");
            const Module* src = nullptr;
            for (const auto& existing : prog.modules) {
                if (existing.name == source) src = &existing;
            }
            if (!src) fail("renaming refers to unknown module '" + source + "'", src_tok);
            expect(Tok::lbracket, "'['");
            std::map<std::string, std::string> renames;
            while (!at(Tok::rbracket)) {
                const Token& from_tok = cur();
                std::string from = expect_ident("identifier");
                expect(Tok::equal, "'='");
                std::string to = expect_ident("identifier");
                if (!renames.emplace(from, to).second) fail("identifier '" + from + "' renamed twice", from_tok);
                if (!at(Tok::rbracket)) expect(Tok::comma, "',' or ']'");
            }
            next();
            for (const auto& v : src->variables) {
                if (!renames.count(v.name)) {
                    fail("renaming of module '" + source + "' must rename its variable '" + v.name + "'", name_tok);
                }
            }
            m = rename_module(*src, m.name, renames);
            expect_kw("endmodule");
            prog.modules.push_back(std::move(m));
            return;
        }
        while (cur().kind == Tok::identifier) m.variables.push_back(parse_variable());
        while (at(Tok::lbracket)) m.commands.push_back(parse_command());
        if (cur().kind == Tok::keyword && !is_kw("endmodule")) unsupported(cur());
        expect_kw("endmodule");
        prog.modules.push_back(std::move(m));
    }

    static ExprPtr rename_expr(const ExprPtr& e, const std::map<std::string, std::string>& renames) {
        if (!e) return e;
        switch (e->kind) {
            case Expr::Kind::literal:
                return e;
            case Expr::Kind::identifier: {
                auto it = renames.find(e->name);
                return it == renames.end() ? e : make_identifier(it->second, e->line, e->column);
            }
            case Expr::Kind::unary:
                return make_unary(e->op, rename_expr(e->lhs, renames), e->line, e->column);
            case Expr::Kind::binary:
                return make_binary(e->op, rename_expr(e->lhs, renames), rename_expr(e->rhs, renames), e->line,
                                   e->column);
        }
        return e;
    }

    static Module rename_module(const Module& src, const std::string& name,
                                const std::map<std::string, std::string>& renames) {
        auto rn = [&](const std::string& s) {
            auto it = renames.find(s);
            return it == renames.end() ? s : it->second;
        };
        Module m;
        m.name = name;
        for (const auto& v : src.variables) {
            VariableDecl nv = v;
            nv.name = rn(v.name);
            nv.lower = rename_expr(v.lower, renames);
            nv.upper = rename_expr(v.upper, renames);
            nv.init = rename_expr(v.init, renames);
            m.variables.push_back(std::move(nv));
        }
        for (const auto& c : src.commands) {
            Command nc;
            nc.action = c.action.empty() ? c.action : rn(c.action);
            nc.guard = rename_expr(c.guard, renames);
            nc.line = c.line;
            for (const auto& u : c.updates) {
                Update nu;
                nu.probability = rename_expr(u.probability, renames);
                for (const auto& a : u.assignments) nu.assignments.push_back({rn(a.variable), rename_expr(a.value, renames)});
                nc.updates.push_back(std::move(nu));
            }
            m.commands.push_back(std::move(nc));
        }
        return m;
    }

    Command parse_command() {
        Command c;
        c.line = cur().line;
        expect(Tok::lbracket, "'['");
        if (!at(Tok::rbracket)) c.action = expect_ident("action label");
        expect(Tok::rbracket, "']'");
        c.guard = parse_expr();
        expect(Tok::arrow, "'->'");
        c.updates.push_back(parse_update());
        while (at(Tok::plus)) {
            next();
            c.updates.push_back(parse_update());
        }
        expect(Tok::semicolon, "';'");
        return c;
    }

    bool at_assignment_list() const {
        if (is_kw("true")) return look(1).kind == Tok::semicolon || look(1).kind == Tok::plus;
        return at(Tok::lparen) && look(1).kind == Tok::identifier && look(2).kind == Tok::prime;
    }

    Update parse_update() {
        Update u;
        if (!at_assignment_list()) {
            u.probability = parse_expr();
            expect(Tok::colon, "':'");
        }
        if (is_kw("true")) {
            next();
            return u;
        }
        u.assignments.push_back(parse_assignment());
        while (at(Tok::amp)) {
            next();
            u.assignments.push_back(parse_assignment());
        }
        return u;
    }

    Assignment parse_assignment() {
        expect(Tok::lparen, "'('");
        Assignment a;
        a.variable = expect_ident("variable name");
        expect(Tok::prime, "'''");
        expect(Tok::equal, "'='");
        a.value = parse_expr();
        expect(Tok::rparen, "')'");
        return a;
    }

    LabelDecl parse_label() {
        expect_kw("label");
        LabelDecl l;
        l.name = expect(Tok::string, "label name in quotes").text;
        expect(Tok::equal, "'='");
        l.expr = parse_expr();
        expect(Tok::semicolon, "';'");
        return l;
    }

    // Expressions, lowest precedence first.
    ExprPtr parse_expr() { return parse_implies(); }

    ExprPtr parse_implies() {
        ExprPtr lhs = parse_or();
        if (at(Tok::implies)) {
            const Token& t = next();
            return make_binary(Op::implies, lhs, parse_implies(), t.line, t.column);
        }
        return lhs;
    }

    ExprPtr parse_or() {
        ExprPtr lhs = parse_and();
        while (at(Tok::bar)) {
            const Token& t = next();
            lhs = make_binary(Op::disj, lhs, parse_and(), t.line, t.column);
        }
        return lhs;
    }

    ExprPtr parse_and() {
        ExprPtr lhs = parse_not();
        while (at(Tok::amp)) {
            const Token& t = next();
            lhs = make_binary(Op::conj, lhs, parse_not(), t.line, t.column);
        }
        return lhs;
    }

    ExprPtr parse_not() {
        if (at(Tok::bang)) {
            const Token& t = next();
            return make_unary(Op::negate, parse_not(), t.line, t.column);
        }
        return parse_relation();
    }

    ExprPtr parse_relation() {
        ExprPtr lhs = parse_additive();
        Op op;
        switch (cur().kind) {
            case Tok::equal: op = Op::eq; break;
            case Tok::not_equal: op = Op::ne; break;
            case Tok::less: op = Op::lt; break;
            case Tok::less_equal: op = Op::le; break;
            case Tok::greater: op = Op::gt; break;
            case Tok::greater_equal: op = Op::ge; break;
            default: return lhs;
        }
        const Token& t = next();
        return make_binary(op, lhs, parse_additive(), t.line, t.column);
    }

    ExprPtr parse_additive() {
        ExprPtr lhs = parse_multiplicative();
        while (at(Tok::plus) || at(Tok::minus)) {
            // Inside an update list '+' separates updates; the caller stops
            // at the assignment list so a '+' here is always arithmetic.
            const Token& t = next();
            Op op = t.kind == Tok::plus ? Op::add : Op::sub;
            lhs = make_binary(op, lhs, parse_multiplicative(), t.line, t.column);
        }
        return lhs;
    }

    ExprPtr parse_multiplicative() {
        ExprPtr lhs = parse_unary();
        while (at(Tok::star) || at(Tok::slash)) {
            const Token& t = next();
            Op op = t.kind == Tok::star ? Op::mul : Op::div;
            lhs = make_binary(op, lhs, parse_unary(), t.line, t.column);
        }
        return lhs;
    }

    ExprPtr parse_unary() {
        if (at(Tok::minus)) {
            const Token& t = next();
            return make_unary(Op::neg, parse_unary(), t.line, t.column);
        }
        return parse_primary();
    }

    ExprPtr parse_primary() {
        const Token& t = cur();
        switch (t.kind) {
            case Tok::integer:
                next();
                return make_literal(Rational::parse(t.text), Type::integer, t.line, t.column);
            case Tok::decimal:
                next();
                return make_literal(Rational::parse(t.text), Type::rational, t.line, t.column);
            case Tok::identifier:
                next();
                return make_identifier(t.text, t.line, t.column);
            case Tok::lparen: {
                next();
                ExprPtr e = parse_expr();
                expect(Tok::rparen, "')'");
                return e;
            }
            case Tok::keyword:
                if (t.text == "true" || t.text == "false") {
                    next();
                    return make_literal(t.text == "true" ? 1 : 0, Type::boolean, t.line, t.column);
                }
                unsupported(t);
            case Tok::question:
                fail("unsupported construct: conditional expression '?:'", t);
            default:
                fail("expected an expression but found '" + t.text + "'", t);
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

// Name resolution and type checking.
class Checker {
public:
    explicit Checker(const Program& prog) : prog_(prog) {}

    void run() {
        for (const auto& c : prog_.constants) {
            if (constants_.count(c.name)) throw ParseError("duplicate constant '" + c.name + "'", c.line);
            if (c.value) {
                Type t = check(c.value, false, "constant '" + c.name + "'");
                if (!assignable(c.type, t)) {
                    throw ParseError("constant '" + c.name + "' declared " + std::string(type_name(c.type)) +
                                         " but its value is " + std::string(type_name(t)),
                                     c.line);
                }
            }
            constants_[c.name] = c.type;
        }
        std::set<std::string> owners_seen;
        auto declare = [&](const VariableDecl& v, const std::string& owner) {
            if (constants_.count(v.name) || variables_.count(v.name)) {
                throw ParseError("duplicate declaration of '" + v.name + "'", v.line);
            }
            variables_[v.name] = {v.is_bool ? Type::boolean : Type::integer, owner};
        };
        for (const auto& v : prog_.globals) declare(v, "");
        for (const auto& m : prog_.modules) {
            for (const auto& v : m.variables) declare(v, m.name);
        }
        auto check_decl = [&](const VariableDecl& v) {
            std::string ctx = "bounds of variable '" + v.name + "'";
            if (!v.is_bool) {
                require(check(v.lower, false, ctx), Type::integer, v.lower, ctx);
                require(check(v.upper, false, ctx), Type::integer, v.upper, ctx);
            }
            if (v.init) {
                Type t = check(v.init, false, "initial value of '" + v.name + "'");
                require(t, v.is_bool ? Type::boolean : Type::integer, v.init, "initial value of '" + v.name + "'");
            }
        };
        for (const auto& v : prog_.globals) check_decl(v);
        for (const auto& m : prog_.modules) {
            for (const auto& v : m.variables) check_decl(v);
            for (const auto& c : m.commands) check_command(m, c);
        }
        std::set<std::string> labels;
        for (const auto& l : prog_.labels) {
            if (l.name == "init" || l.name == "deadlock") {
                throw ParseError("label name '" + l.name + "' is reserved", l.expr ? l.expr->line : 0);
            }
            if (!labels.insert(l.name).second) {
                throw ParseError("duplicate label '" + l.name + "'", l.expr ? l.expr->line : 0);
            }
            require(check(l.expr, true, "label"), Type::boolean, l.expr, "label '" + l.name + "'");
        }
    }

private:
    struct VarInfo {
        Type type;
        std::string owner;
    };

    static bool assignable(Type target, Type value) {
        return target == value || (target == Type::rational && value == Type::integer);
    }

    static void require(Type got, Type want, const ExprPtr& e, const std::string& ctx) {
        if (!assignable(want, got)) {
            throw ParseError("type mismatch in " + ctx + ": expected " + std::string(type_name(want)) + ", got " +
                                 std::string(type_name(got)),
                             e->line, e->column);
        }
    }

    void check_command(const Module& m, const Command& c) {
        require(check(c.guard, true, "guard"), Type::boolean, c.guard, "guard");
        for (const auto& u : c.updates) {
            if (u.probability) {
                Type t = check(u.probability, true, "probability");
                if (t == Type::boolean) {
                    throw ParseError("type mismatch in probability: expected a number", u.probability->line,
                                     u.probability->column);
                }
            }
            std::set<std::string> assigned;
            for (const auto& a : u.assignments) {
                auto it = variables_.find(a.variable);
                if (it == variables_.end()) {
                    throw ParseError("assignment to undeclared variable '" + a.variable + "'", c.line);
                }
                if (!it->second.owner.empty() && it->second.owner != m.name) {
                    throw ParseError("module '" + m.name + "' assigns variable '" + a.variable + "' of module '" +
                                         it->second.owner + "'",
                                     c.line);
                }
                if (!assigned.insert(a.variable).second) {
                    throw ParseError("variable '" + a.variable + "' assigned twice in one update", c.line);
                }
                Type t = check(a.value, true, "assignment");
                bool ok = it->second.type == Type::boolean ? t == Type::boolean : t != Type::boolean;
                if (!ok) {
                    throw ParseError("type mismatch in assignment to '" + a.variable + "'", a.value->line,
                                     a.value->column);
                }
            }
        }
    }

    Type check(const ExprPtr& e, bool allow_variables, const std::string& ctx) {
        switch (e->kind) {
            case Expr::Kind::literal:
                return e->literal_type;
            case Expr::Kind::identifier: {
                if (auto it = constants_.find(e->name); it != constants_.end()) return it->second;
                if (auto it = variables_.find(e->name); it != variables_.end()) {
                    if (!allow_variables) {
                        throw ParseError("variable '" + e->name + "' not allowed in " + ctx, e->line, e->column);
                    }
                    return it->second.type;
                }
                throw ParseError("undeclared identifier '" + e->name + "'", e->line, e->column);
            }
            case Expr::Kind::unary: {
                Type t = check(e->lhs, allow_variables, ctx);
                if (e->op == Op::negate) {
                    require(t, Type::boolean, e->lhs, ctx);
                    return Type::boolean;
                }
                if (t == Type::boolean) throw ParseError("type mismatch: '-' applied to a boolean", e->line, e->column);
                return t;
            }
            case Expr::Kind::binary: {
                Type l = check(e->lhs, allow_variables, ctx);
                Type r = check(e->rhs, allow_variables, ctx);
                auto numeric = [&]() {
                    if (l == Type::boolean || r == Type::boolean) {
                        throw ParseError("type mismatch: arithmetic or ordering on a boolean", e->line, e->column);
                    }
                };
                switch (e->op) {
                    case Op::add:
                    case Op::sub:
                    case Op::mul:
                        numeric();
                        return (l == Type::rational || r == Type::rational) ? Type::rational : Type::integer;
                    case Op::div:
                        numeric();
                        return Type::rational;
                    case Op::lt:
                    case Op::le:
                    case Op::gt:
                    case Op::ge:
                        numeric();
                        return Type::boolean;
                    case Op::eq:
                    case Op::ne:
                        if ((l == Type::boolean) != (r == Type::boolean)) {
                            throw ParseError("type mismatch: comparing a boolean with a number", e->line, e->column);
                        }
                        return Type::boolean;
                    case Op::conj:
                    case Op::disj:
                    case Op::implies:
                        require(l, Type::boolean, e->lhs, ctx);
                        require(r, Type::boolean, e->rhs, ctx);
                        return Type::boolean;
                    default:
                        break;
                }
            }
        }
        throw ParseError("malformed expression", e->line, e->column);
    }

    const Program& prog_;
    std::map<std::string, Type> constants_;
    std::map<std::string, VarInfo> variables_;
};

}  // namespace

Program parse(std::string_view text) {
    Parser parser(detail::tokenize(text));
    Program prog = parser.parse_program();
    Checker(prog).run();
    detail::mark_parametric(prog);
    return prog;
}

Program parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

}  // namespace mlbisim::prism
