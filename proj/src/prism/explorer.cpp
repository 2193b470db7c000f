#include "mlbisim/prism/explorer.h"

#include <deque>
#include <map>
#include <sstream>
#include <unordered_set>

#include "mlbisim/core/errors.h"

namespace mlbisim::prism {

namespace {

// Expression tree with identifiers resolved to state-vector slots.
class CompiledExpr {
public:
    CompiledExpr() = default;
    CompiledExpr(const ExprPtr& e, const std::map<std::string, std::size_t>& slots) { root_ = add(e, slots); }

    Rational eval(std::span<const std::int64_t> vals) const { return eval(root_, vals); }
    bool holds(std::span<const std::int64_t> vals) const { return !eval(root_, vals).is_zero(); }

private:
    struct Node {
        Expr::Kind kind;
        Op op;
        Rational literal;
        std::size_t slot = 0;
        int lhs = -1;
        int rhs = -1;
    };

    int add(const ExprPtr& e, const std::map<std::string, std::size_t>& slots) {
        Node n{e->kind, e->op, e->value};
        switch (e->kind) {
            case Expr::Kind::literal:
                break;
            case Expr::Kind::identifier: {
                auto it = slots.find(e->name);
                if (it == slots.end()) throw ModelError("'" + e->name + "' is not a variable of the closed program");
                n.slot = it->second;
                break;
            }
            case Expr::Kind::unary:
                n.lhs = add(e->lhs, slots);
                break;
            case Expr::Kind::binary:
                n.lhs = add(e->lhs, slots);
                n.rhs = add(e->rhs, slots);
                break;
        }
        nodes_.push_back(std::move(n));
        return static_cast<int>(nodes_.size() - 1);
    }

    Rational eval(int idx, std::span<const std::int64_t> vals) const {
        const Node& n = nodes_[idx];
        switch (n.kind) {
            case Expr::Kind::literal:
                return n.literal;
            case Expr::Kind::identifier:
                return vals[n.slot];
            case Expr::Kind::unary: {
                Rational x = eval(n.lhs, vals);
                if (n.op == Op::negate) return x.is_zero() ? 1 : 0;
                return -x;
            }
            case Expr::Kind::binary: {
                // Short-circuit the boolean connectives.
                if (n.op == Op::conj) return (!eval(n.lhs, vals).is_zero() && !eval(n.rhs, vals).is_zero()) ? 1 : 0;
                if (n.op == Op::disj) return (!eval(n.lhs, vals).is_zero() || !eval(n.rhs, vals).is_zero()) ? 1 : 0;
                if (n.op == Op::implies) return (eval(n.lhs, vals).is_zero() || !eval(n.rhs, vals).is_zero()) ? 1 : 0;
                Rational l = eval(n.lhs, vals);
                Rational r = eval(n.rhs, vals);
                switch (n.op) {
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
                    default: break;
                }
            }
        }
        throw ModelError("malformed expression");
    }

    std::vector<Node> nodes_;
    int root_ = -1;
};

struct CompiledUpdate {
    std::optional<CompiledExpr> probability;
    std::vector<std::pair<std::size_t, CompiledExpr>> assignments;
};

struct CompiledCommand {
    std::string module;
    int line = 0;
    CompiledExpr guard;
    std::vector<CompiledUpdate> updates;
};

struct SyncAction {
    std::string name;
    ActionId id = 0;
    // Per participating module: indices into that module's labelled commands.
    std::vector<std::vector<const CompiledCommand*>> per_module;
};

class Explorer {
public:
    Explorer(const Program& prog, const ExploreOptions& options) : options_(options) {
        if (!prog.is_closed()) throw UsageError("cannot explore a program with unbound parameters");
        std::map<std::string, std::size_t> slots;
        std::vector<std::int64_t> init;
        for (const auto* v : prog.variables()) {
            auto lo = evaluate_constant(v->lower, {}).to_integer();
            auto hi = evaluate_constant(v->upper, {}).to_integer();
            auto start = v->init ? evaluate_constant(v->init, {}).to_integer() : lo;
            slots[v->name] = vars_.size();
            vars_.push_back(VariableInfo{v->name, lo, hi, v->parametric, v->is_bool});
            init.push_back(start);
        }
        width_ = vars_.size();

        std::vector<std::string> action_order;
        std::map<std::string, std::vector<std::vector<const CompiledCommand*>>> labelled;
        std::size_t total = 0;
        for (const auto& m : prog.modules) total += m.commands.size();
        commands_.reserve(total);
        for (std::size_t mi = 0; mi < prog.modules.size(); ++mi) {
            const auto& m = prog.modules[mi];
            for (const auto& c : m.commands) {
                CompiledCommand cc;
                cc.module = m.name;
                cc.line = c.line;
                cc.guard = CompiledExpr(c.guard, slots);
                for (const auto& u : c.updates) {
                    CompiledUpdate cu;
                    if (u.probability) cu.probability = CompiledExpr(u.probability, slots);
                    for (const auto& a : u.assignments) cu.assignments.emplace_back(slots.at(a.variable), CompiledExpr(a.value, slots));
                    cc.updates.push_back(std::move(cu));
                }
                commands_.push_back(std::move(cc));
                const CompiledCommand* ptr = &commands_.back();
                if (c.action.empty()) {
                    unlabelled_.push_back(ptr);
                    continue;
                }
                auto& per_module = labelled[c.action];
                if (per_module.empty()) action_order.push_back(c.action);
                if (per_module.empty() || module_of_last_[c.action] != mi) {
                    per_module.emplace_back();
                    module_of_last_[c.action] = mi;
                }
                per_module.back().push_back(ptr);
            }
        }
        action_names_.push_back("");
        for (const auto& a : action_order) {
            SyncAction sa;
            sa.name = a;
            sa.id = static_cast<ActionId>(action_names_.size());
            sa.per_module = std::move(labelled[a]);
            action_names_.push_back(a);
            sync_.push_back(std::move(sa));
        }
        for (const auto& l : prog.labels) {
            label_names_.push_back(l.name);
            label_exprs_.emplace_back(l.expr, slots);
        }
        init_ = std::move(init);
    }

    Mdp run() {
        valuations_.reserve(width_ * 1024);
        StateId s0 = intern(init_);
        std::deque<StateId> queue{s0};
        std::vector<std::vector<Choice>> choices;
        std::vector<StateId> deadlocks;
        std::size_t steps = 0;
        while (!queue.empty()) {
            StateId s = queue.front();
            queue.pop_front();
            if (options_.deadline && (++steps & 1023) == 0 && std::chrono::steady_clock::now() > *options_.deadline) {
                throw ResourceError(ResourceError::Kind::time, "state-space exploration timed out");
            }
            std::vector<Choice> out;
            expand(s, out, queue);
            if (out.empty()) {
                out.push_back(Choice{0, Distribution::dirac(s)});
                deadlocks.push_back(s);
            }
            n_choices_ += out.size();
            for (const auto& c : out) n_transitions_ += c.distribution.size();
            if (options_.max_memory_bytes &&
                memory_estimate(n_states_, width_, n_choices_, n_transitions_) > *options_.max_memory_bytes) {
                throw ResourceError(ResourceError::Kind::memory,
                                    "estimated memory limit of " + std::to_string(*options_.max_memory_bytes) +
                                        " bytes exceeded after " + std::to_string(n_states_) + " states");
            }
            if (choices.size() <= s) choices.resize(s + 1);
            choices[s] = std::move(out);
        }
        choices.resize(n_states_);

        MdpData data;
        data.initial = s0;
        data.choices = std::move(choices);
        data.action_names = action_names_;
        data.label_names = label_names_;
        data.label_states.resize(label_names_.size());
        for (StateId s = 0; s < n_states_; ++s) {
            auto vals = row(s);
            for (std::size_t l = 0; l < label_exprs_.size(); ++l) {
                if (label_exprs_[l].holds(vals)) data.label_states[l].push_back(s);
            }
        }
        data.variables = vars_;
        valuations_.resize(n_states_ * width_);
        data.valuations = std::move(valuations_);
        data.deadlocks = std::move(deadlocks);
        return Mdp(std::move(data));
    }

private:
    std::span<const std::int64_t> row(StateId s) const { return {valuations_.data() + s * width_, width_}; }

    std::string describe(std::span<const std::int64_t> vals) const {
        std::ostringstream os;
        os << "(";
        for (std::size_t v = 0; v < vals.size(); ++v) os << (v ? "," : "") << vars_[v].name << "=" << vals[v];
        os << ")";
        return os.str();
    }

    struct SlotHash {
        const Explorer* self;
        std::size_t operator()(StateId s) const {
            std::uint64_t h = 1469598103934665603ULL;
            for (auto v : self->row(s)) {
                h ^= static_cast<std::uint64_t>(v);
                h *= 1099511628211ULL;
                h ^= h >> 29;
            }
            return h;
        }
    };
    struct SlotEq {
        const Explorer* self;
        bool operator()(StateId a, StateId b) const {
            auto ra = self->row(a);
            auto rb = self->row(b);
            return std::equal(ra.begin(), ra.end(), rb.begin());
        }
    };

    // Returns the id of `vals`, adding a new state when unseen.
    StateId intern(std::span<const std::int64_t> vals, std::deque<StateId>* queue = nullptr) {
        for (std::size_t v = 0; v < width_; ++v) {
            if (vals[v] < vars_[v].lower || vals[v] > vars_[v].upper) {
                throw ModelError("variable " + vars_[v].name + " out of range in state " + describe(vals));
            }
        }
        valuations_.resize(std::size_t(n_states_ + 1) * width_);
        std::copy(vals.begin(), vals.end(), valuations_.begin() + std::size_t(n_states_) * width_);
        auto [it, inserted] = index_.insert(n_states_);
        if (!inserted) {
            valuations_.resize(std::size_t(n_states_) * width_);
            return *it;
        }
        if (n_states_ >= options_.max_states) {
            throw ResourceError(ResourceError::Kind::states,
                                "state limit of " + std::to_string(options_.max_states) + " exceeded");
        }
        if (queue) queue->push_back(n_states_);
        return n_states_++;
    }

    void expand(StateId s, std::vector<Choice>& out, std::deque<StateId>& queue) {
        std::vector<std::int64_t> src(row(s).begin(), row(s).end());
        for (const auto* c : unlabelled_) {
            if (!c->guard.holds(src)) continue;
            std::vector<const CompiledCommand*> one{c};
            out.push_back(Choice{0, build(src, one, queue)});
        }
        for (const auto& a : sync_) {
            std::vector<std::vector<const CompiledCommand*>> enabled(a.per_module.size());
            bool blocked = false;
            for (std::size_t m = 0; m < a.per_module.size() && !blocked; ++m) {
                for (const auto* c : a.per_module[m]) {
                    if (c->guard.holds(src)) enabled[m].push_back(c);
                }
                blocked = enabled[m].empty();
            }
            if (blocked) continue;
            std::vector<std::size_t> pick(enabled.size(), 0);
            do {
                std::vector<const CompiledCommand*> combo;
                for (std::size_t m = 0; m < enabled.size(); ++m) combo.push_back(enabled[m][pick[m]]);
                out.push_back(Choice{a.id, build(src, combo, queue)});
            } while (next_pick(pick, [&](std::size_t m) { return enabled[m].size(); }));
        }
    }

    // Odometer step over mixed radices; false once all combinations are done.
    template <typename Radix>
    static bool next_pick(std::vector<std::size_t>& pick, Radix radix) {
        for (std::size_t m = pick.size(); m-- > 0;) {
            if (++pick[m] < radix(m)) return true;
            pick[m] = 0;
        }
        return false;
    }

    Prob update_probability(const CompiledCommand& c, const CompiledUpdate& u, std::span<const std::int64_t> src) const {
        if (!u.probability) return 1;
        Rational p = u.probability->eval(src);
        if (p <= 0 || p > 1) {
            throw ModelError("command at line " + std::to_string(c.line) + " of module " + c.module +
                             " has probability " + p.to_string() + " in state " + describe(src));
        }
        return p;
    }

    // Joint distribution of independently resolving each command's updates.
    Distribution build(std::span<const std::int64_t> src, const std::vector<const CompiledCommand*>& combo,
                       std::deque<StateId>& queue) {
        for (const auto* c : combo) {
            Prob total = 0;
            for (const auto& u : c->updates) total += update_probability(*c, u, src);
            if (total != 1) {
                throw ModelError("command at line " + std::to_string(c->line) + " of module " + c->module +
                                 " has update probabilities summing to " + total.to_string() + " in state " +
                                 describe(src));
            }
        }
        std::vector<Distribution::Entry> entries;
        std::vector<std::int64_t> target(src.begin(), src.end());
        std::vector<int> writer(width_, -1);
        std::vector<std::size_t> pick(combo.size(), 0);
        while (true) {
            Prob p = 1;
            std::copy(src.begin(), src.end(), target.begin());
            std::fill(writer.begin(), writer.end(), -1);
            for (std::size_t m = 0; m < combo.size(); ++m) {
                const auto& c = *combo[m];
                const auto& u = c.updates[pick[m]];
                p *= update_probability(c, u, src);
                for (const auto& [slot, expr] : u.assignments) {
                    if (writer[slot] >= 0) {
                        throw ModelError("variable " + vars_[slot].name + " written by two synchronising commands");
                    }
                    writer[slot] = static_cast<int>(m);
                    Rational value = expr.eval(src);
                    if (!value.is_integer()) {
                        throw ModelError("command at line " + std::to_string(c.line) + " of module " + c.module +
                                         " assigns non-integer " + value.to_string() + " to " + vars_[slot].name);
                    }
                    std::int64_t v = value.to_integer();
                    if (v < vars_[slot].lower || v > vars_[slot].upper) {
                        throw ModelError("command at line " + std::to_string(c.line) + " of module " + c.module +
                                         " assigns " + vars_[slot].name + "=" + std::to_string(v) +
                                         " outside its range in state " + describe(src));
                    }
                    target[slot] = v;
                }
            }
            entries.emplace_back(intern(target, &queue), p);
            if (!next_pick(pick, [&](std::size_t m) { return combo[m]->updates.size(); })) break;
        }
        return Distribution(std::move(entries));
    }

    ExploreOptions options_;
    std::vector<VariableInfo> vars_;
    std::size_t width_ = 0;
    std::vector<std::int64_t> init_;
    std::vector<CompiledCommand> commands_;
    std::vector<const CompiledCommand*> unlabelled_;
    std::vector<SyncAction> sync_;
    std::map<std::string, std::size_t> module_of_last_;
    std::vector<std::string> action_names_;
    std::vector<std::string> label_names_;
    std::vector<CompiledExpr> label_exprs_;
    std::vector<std::int64_t> valuations_;
    StateId n_states_ = 0;
    std::size_t n_choices_ = 0;
    std::size_t n_transitions_ = 0;
    std::unordered_set<StateId, SlotHash, SlotEq> index_{1024, SlotHash{this}, SlotEq{this}};
};

}  // namespace

std::size_t memory_estimate(std::size_t states, std::size_t variables, std::size_t choices, std::size_t transitions) {
    // Valuation row, hash-set node and choice-list header per state; action and
    // distribution header per choice; successor and probability per transition.
    return states * (variables * sizeof(std::int64_t) + 48) + choices * 40 + transitions * 24;
}

Mdp explore(const Program& closed, const ExploreOptions& options) {
    Explorer explorer(closed, options);
    return explorer.run();
}

}  // namespace mlbisim::prism
