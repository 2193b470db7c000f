#include <set>
#include <sstream>

#include "analysis.h"
#include "mlbisim/core/errors.h"
#include "mlbisim/prism/program.h"

namespace mlbisim::prism {

std::string_view type_name(Type t) {
    switch (t) {
        case Type::integer: return "int";
        case Type::boolean: return "bool";
        case Type::rational: return "double";
    }
    return "?";
}

ExprPtr make_literal(Rational value, Type type, int line, int column) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::literal;
    e->value = value;
    e->literal_type = type;
    e->line = line;
    e->column = column;
    return e;
}

ExprPtr make_identifier(std::string name, int line, int column) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::identifier;
    e->name = std::move(name);
    e->line = line;
    e->column = column;
    return e;
}

ExprPtr make_unary(Op op, ExprPtr operand, int line, int column) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::unary;
    e->op = op;
    e->lhs = std::move(operand);
    e->line = line;
    e->column = column;
    return e;
}

ExprPtr make_binary(Op op, ExprPtr lhs, ExprPtr rhs, int line, int column) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::binary;
    e->op = op;
    e->lhs = std::move(lhs);
    e->rhs = std::move(rhs);
    e->line = line;
    e->column = column;
    return e;
}

bool same_expr(const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b) return !a && !b;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case Expr::Kind::literal:
            return a->literal_type == b->literal_type && a->value == b->value;
        case Expr::Kind::identifier:
            return a->name == b->name;
        case Expr::Kind::unary:
            return a->op == b->op && same_expr(a->lhs, b->lhs);
        case Expr::Kind::binary:
            return a->op == b->op && same_expr(a->lhs, b->lhs) && same_expr(a->rhs, b->rhs);
    }
    return false;
}

void collect_identifiers(const ExprPtr& e, std::vector<std::string>& out) {
    if (!e) return;
    if (e->kind == Expr::Kind::identifier) out.push_back(e->name);
    collect_identifiers(e->lhs, out);
    collect_identifiers(e->rhs, out);
}

std::vector<std::string> Program::parameters() const {
    std::vector<std::string> out;
    for (const auto& c : constants) {
        if (!c.value) out.push_back(c.name);
    }
    return out;
}

std::vector<const VariableDecl*> Program::variables() const {
    std::vector<const VariableDecl*> out;
    for (const auto& v : globals) out.push_back(&v);
    for (const auto& m : modules) {
        for (const auto& v : m.variables) out.push_back(&v);
    }
    return out;
}

std::vector<std::string> Program::parametric_variables() const {
    std::vector<std::string> out;
    for (const auto* v : variables()) {
        if (v->parametric) out.push_back(v->name);
    }
    return out;
}

const ConstantDecl* Program::find_constant(std::string_view name) const {
    for (const auto& c : constants) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

namespace detail {

void mark_parametric(Program& prog) {
    std::set<std::string> dependent;
    for (const auto& c : prog.constants) {
        if (!c.value) {
            dependent.insert(c.name);
            continue;
        }
        std::vector<std::string> ids;
        collect_identifiers(c.value, ids);
        for (const auto& id : ids) {
            if (dependent.count(id)) {
                dependent.insert(c.name);
                break;
            }
        }
    }
    auto mark = [&](VariableDecl& v) {
        std::vector<std::string> ids;
        collect_identifiers(v.upper, ids);
        v.parametric = false;
        for (const auto& id : ids) {
            if (dependent.count(id)) v.parametric = true;
        }
    };
    for (auto& v : prog.globals) mark(v);
    for (auto& m : prog.modules) {
        for (auto& v : m.variables) mark(v);
    }
}

}  // namespace detail

namespace {

Rational apply_binary(Op op, const Rational& l, const Rational& r) {
    switch (op) {
        case Op::add: return l + r;
        case Op::sub: return l - r;
        case Op::mul: return l * r;
        case Op::div:
            if (r.is_zero()) throw ModelError("division by zero");
            return l / r;
        case Op::eq: return l == r ? 1 : 0;
        case Op::ne: return l != r ? 1 : 0;
        case Op::lt: return l < r ? 1 : 0;
        case Op::le: return l <= r ? 1 : 0;
        case Op::gt: return l > r ? 1 : 0;
        case Op::ge: return l >= r ? 1 : 0;
        case Op::conj: return (!l.is_zero() && !r.is_zero()) ? 1 : 0;
        case Op::disj: return (!l.is_zero() || !r.is_zero()) ? 1 : 0;
        case Op::implies: return (l.is_zero() || !r.is_zero()) ? 1 : 0;
        default: break;
    }
    throw ModelError("not a binary operator");
}

Type result_type(Op op, Type l, Type r) {
    switch (op) {
        case Op::add:
        case Op::sub:
        case Op::mul:
            return (l == Type::rational || r == Type::rational) ? Type::rational : Type::integer;
        case Op::div:
            return Type::rational;
        default:
            return Type::boolean;
    }
}

// Substitutes known constants and folds literal subtrees.
ExprPtr fold(const ExprPtr& e, const std::map<std::string, std::pair<Rational, Type>>& env) {
    if (!e) return e;
    switch (e->kind) {
        case Expr::Kind::literal:
            return e;
        case Expr::Kind::identifier: {
            auto it = env.find(e->name);
            if (it == env.end()) return e;
            return make_literal(it->second.first, it->second.second, e->line, e->column);
        }
        case Expr::Kind::unary: {
            ExprPtr x = fold(e->lhs, env);
            if (x->kind != Expr::Kind::literal) return make_unary(e->op, x, e->line, e->column);
            if (e->op == Op::negate) return make_literal(x->value.is_zero() ? 1 : 0, Type::boolean, e->line, e->column);
            return make_literal(-x->value, x->literal_type, e->line, e->column);
        }
        case Expr::Kind::binary: {
            ExprPtr l = fold(e->lhs, env);
            ExprPtr r = fold(e->rhs, env);
            if (l->kind != Expr::Kind::literal || r->kind != Expr::Kind::literal) {
                return make_binary(e->op, l, r, e->line, e->column);
            }
            return make_literal(apply_binary(e->op, l->value, r->value),
                                result_type(e->op, l->literal_type, r->literal_type), e->line, e->column);
        }
    }
    return e;
}

}  // namespace

Rational evaluate_constant(const ExprPtr& e, const std::map<std::string, Rational>& env) {
    switch (e->kind) {
        case Expr::Kind::literal:
            return e->value;
        case Expr::Kind::identifier: {
            auto it = env.find(e->name);
            if (it == env.end()) throw ModelError("'" + e->name + "' has no constant value");
            return it->second;
        }
        case Expr::Kind::unary: {
            Rational x = evaluate_constant(e->lhs, env);
            if (e->op == Op::negate) return x.is_zero() ? 1 : 0;
            return -x;
        }
        case Expr::Kind::binary:
            return apply_binary(e->op, evaluate_constant(e->lhs, env), evaluate_constant(e->rhs, env));
    }
    throw ModelError("malformed expression");
}

Program bind(const Program& program, const std::map<std::string, std::int64_t>& bindings) {
    Program out = program;
    for (const auto& [name, value] : bindings) {
        bool found = false;
        for (auto& c : out.constants) {
            if (c.name != name) continue;
            if (c.value) throw ModelError("'" + name + "' is not a parameter (it already has a value)");
            if (c.type == Type::boolean && value != 0 && value != 1) {
                throw ModelError("boolean parameter '" + name + "' bound to " + std::to_string(value));
            }
            c.value = make_literal(value, c.type);
            found = true;
        }
        if (!found) throw ModelError("'" + name + "' is not a parameter of the program");
    }
    if (!out.parameters().empty()) detail::mark_parametric(out);
    return out;
}

Program instantiate(const Program& program, const std::map<std::string, std::int64_t>& bindings) {
    std::vector<std::string> missing;
    for (const auto& p : program.parameters()) {
        if (!bindings.count(p)) missing.push_back(p);
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
        throw ModelError("missing binding for parameter(s): " + list);
    }
    Program bound = program;
    for (const auto& [name, value] : bindings) {
        const ConstantDecl* c = program.find_constant(name);
        if (!c || c->value) throw ModelError("'" + name + "' is not a parameter of the program");
        for (auto& d : bound.constants) {
            if (d.name == name) d.value = make_literal(value, d.type);
        }
    }

    std::map<std::string, std::pair<Rational, Type>> env;
    std::map<std::string, Rational> values;
    for (auto& c : bound.constants) {
        Rational v = evaluate_constant(c.value, values);
        if (c.type == Type::integer && !v.is_integer()) {
            throw ModelError("integer constant '" + c.name + "' evaluates to " + v.to_string());
        }
        values[c.name] = v;
        env[c.name] = {v, c.type};
        c.value = make_literal(v, c.type);
    }

    auto fold_var = [&](VariableDecl& v) {
        v.lower = fold(v.lower, env);
        v.upper = fold(v.upper, env);
        if (v.init) v.init = fold(v.init, env);
        Rational lo = evaluate_constant(v.lower, values);
        Rational hi = evaluate_constant(v.upper, values);
        if (!lo.is_integer() || !hi.is_integer()) throw ModelError("bounds of '" + v.name + "' are not integers");
        if (hi < lo) {
            throw ModelError("variable '" + v.name + "' has a negative range width: [" + lo.to_string() + ".." +
                             hi.to_string() + "]");
        }
        Rational init = v.init ? evaluate_constant(v.init, values) : lo;
        if (init < lo || init > hi) {
            throw ModelError("initial value " + init.to_string() + " of '" + v.name + "' outside [" + lo.to_string() +
                             ".." + hi.to_string() + "]");
        }
    };
    for (auto& v : bound.globals) fold_var(v);
    for (auto& m : bound.modules) {
        for (auto& v : m.variables) fold_var(v);
        for (auto& c : m.commands) {
            c.guard = fold(c.guard, env);
            for (auto& u : c.updates) {
                u.probability = fold(u.probability, env);
                for (auto& a : u.assignments) a.value = fold(a.value, env);
            }
        }
    }
    for (auto& l : bound.labels) l.expr = fold(l.expr, env);
    return bound;
}

namespace {

std::string_view op_text(Op op) {
    switch (op) {
        case Op::add: return "+";
        case Op::sub: return "-";
        case Op::mul: return "*";
        case Op::div: return "/";
        case Op::eq: return "=";
        case Op::ne: return "!=";
        case Op::lt: return "<";
        case Op::le: return "<=";
        case Op::gt: return ">";
        case Op::ge: return ">=";
        case Op::conj: return "&";
        case Op::disj: return "|";
        case Op::implies: return "=>";
        case Op::neg: return "-";
        case Op::negate: return "!";
    }
    return "?";
}

void print_expr(std::ostream& os, const ExprPtr& e) {
    switch (e->kind) {
        case Expr::Kind::literal:
            if (e->literal_type == Type::boolean) {
                os << (e->value.is_zero() ? "false" : "true");
            } else if (e->literal_type == Type::rational && e->value.has_finite_decimal()) {
                std::string text = e->value.to_decimal_string();
                if (text.find('.') == std::string::npos) text += ".0";
                if (e->value < 0) {
                    os << "(" << text << ")";
                } else {
                    os << text;
                }
            } else if (e->literal_type == Type::rational) {
                os << "(" << e->value.num() << "/" << e->value.den() << ")";
            } else if (e->value < 0) {
                os << "(" << e->value << ")";
            } else {
                os << e->value;
            }
            return;
        case Expr::Kind::identifier:
            os << e->name;
            return;
        case Expr::Kind::unary:
            os << op_text(e->op) << "(";
            print_expr(os, e->lhs);
            os << ")";
            return;
        case Expr::Kind::binary:
            os << "(";
            print_expr(os, e->lhs);
            os << op_text(e->op);
            print_expr(os, e->rhs);
            os << ")";
            return;
    }
}

void print_variable(std::ostream& os, const VariableDecl& v) {
    os << v.name << " : ";
    if (v.is_bool) {
        os << "bool";
    } else {
        os << "[";
        print_expr(os, v.lower);
        os << "..";
        print_expr(os, v.upper);
        os << "]";
    }
    if (v.init) {
        os << " init ";
        print_expr(os, v.init);
    }
    os << ";\n";
}

}  // namespace

std::string print(const ExprPtr& e) {
    std::ostringstream os;
    print_expr(os, e);
    return os.str();
}

std::string print(const Program& program) {
    std::ostringstream os;
    os << "mdp\n\n";
    for (const auto& c : program.constants) {
        os << "const " << type_name(c.type) << " " << c.name;
        if (c.value) {
            os << " = ";
            print_expr(os, c.value);
        }
        os << ";\n";
    }
    if (!program.constants.empty()) os << "\n";
    for (const auto& v : program.globals) {
        os << "global ";
        print_variable(os, v);
    }
    if (!program.globals.empty()) os << "\n";
    for (const auto& m : program.modules) {
        os << "module " << m.name << "\n";
        for (const auto& v : m.variables) {
            os << "    ";
            print_variable(os, v);
        }
        for (const auto& c : m.commands) {
            os << "    [" << c.action << "] ";
            print_expr(os, c.guard);
            os << " -> ";
            for (std::size_t i = 0; i < c.updates.size(); ++i) {
                const auto& u = c.updates[i];
                if (i > 0) os << " + ";
                if (u.probability) {
                    print_expr(os, u.probability);
                    os << " : ";
                }
                if (u.assignments.empty()) os << "true";
                for (std::size_t j = 0; j < u.assignments.size(); ++j) {
                    if (j > 0) os << " & ";
                    os << "(" << u.assignments[j].variable << "'=";
                    print_expr(os, u.assignments[j].value);
                    os << ")";
                }
            }
            os << ";\n";
        }
        os << "endmodule\n\n";
    }
    for (const auto& l : program.labels) {
        os << "label \"" << l.name << "\" = ";
        print_expr(os, l.expr);
        os << ";\n";
    }
    return os.str();
}

bool same_program(const Program& a, const Program& b) {
    auto same_var = [](const VariableDecl& x, const VariableDecl& y) {
        return x.name == y.name && x.is_bool == y.is_bool && same_expr(x.lower, y.lower) &&
               same_expr(x.upper, y.upper) && same_expr(x.init, y.init) && x.parametric == y.parametric;
    };
    if (a.constants.size() != b.constants.size() || a.globals.size() != b.globals.size() ||
        a.modules.size() != b.modules.size() || a.labels.size() != b.labels.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.constants.size(); ++i) {
        const auto& x = a.constants[i];
        const auto& y = b.constants[i];
        if (x.name != y.name || x.type != y.type || !same_expr(x.value, y.value)) return false;
    }
    for (std::size_t i = 0; i < a.globals.size(); ++i) {
        if (!same_var(a.globals[i], b.globals[i])) return false;
    }
    for (std::size_t i = 0; i < a.modules.size(); ++i) {
        const auto& x = a.modules[i];
        const auto& y = b.modules[i];
        if (x.name != y.name || x.variables.size() != y.variables.size() || x.commands.size() != y.commands.size()) {
            return false;
        }
        for (std::size_t j = 0; j < x.variables.size(); ++j) {
            if (!same_var(x.variables[j], y.variables[j])) return false;
        }
        for (std::size_t j = 0; j < x.commands.size(); ++j) {
            const auto& c = x.commands[j];
            const auto& d = y.commands[j];
            if (c.action != d.action || !same_expr(c.guard, d.guard) || c.updates.size() != d.updates.size()) {
                return false;
            }
            for (std::size_t k = 0; k < c.updates.size(); ++k) {
                const auto& u = c.updates[k];
                const auto& w = d.updates[k];
                if (!same_expr(u.probability, w.probability) || u.assignments.size() != w.assignments.size()) {
                    return false;
                }
                for (std::size_t q = 0; q < u.assignments.size(); ++q) {
                    if (u.assignments[q].variable != w.assignments[q].variable ||
                        !same_expr(u.assignments[q].value, w.assignments[q].value)) {
                        return false;
                    }
                }
            }
        }
    }
    for (std::size_t i = 0; i < a.labels.size(); ++i) {
        if (a.labels[i].name != b.labels[i].name || !same_expr(a.labels[i].expr, b.labels[i].expr)) return false;
    }
    return true;
}

}  // namespace mlbisim::prism
