#include "mlbisim/verify/oracle.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "mlbisim/core/errors.h"

namespace mlbisim::verify {

namespace {

using BlockVector = std::map<BlockId, Prob>;

BlockVector lift(const Distribution& d, const std::vector<BlockId>& block_of) {
    BlockVector v;
    for (const auto& [t, p] : d) v[block_of[t]] += p;
    return v;
}

std::set<BlockVector> lifted_choices(const Mdp& m, StateId s, const std::vector<BlockId>& block_of) {
    std::set<BlockVector> out;
    for (const auto& c : m.choices(s)) out.insert(lift(c.distribution, block_of));
    return out;
}

}  // namespace

Partition coarsest_bisimulation(const Mdp& m, std::string_view goal, std::size_t limit) {
    if (m.n_states() > limit) {
        throw ResourceError(ResourceError::Kind::states, "oracle limited to " + std::to_string(limit) +
                                                             " states, model has " + std::to_string(m.n_states()));
    }
    const auto& mask = m.label_mask(m.require_label(goal));
    std::vector<BlockId> block_of(m.n_states());
    std::size_t n_blocks = 0;
    {
        std::map<bool, BlockId> ids;
        for (StateId s = 0; s < m.n_states(); ++s) {
            auto [it, inserted] = ids.emplace(mask[s], static_cast<BlockId>(ids.size()));
            block_of[s] = it->second;
        }
        n_blocks = ids.size();
    }
    while (true) {
        std::map<std::pair<BlockId, std::set<BlockVector>>, BlockId> ids;
        std::vector<BlockId> next(m.n_states());
        for (StateId s = 0; s < m.n_states(); ++s) {
            auto key = std::make_pair(block_of[s], lifted_choices(m, s, block_of));
            auto [it, inserted] = ids.emplace(std::move(key), static_cast<BlockId>(ids.size()));
            next[s] = it->second;
        }
        block_of = std::move(next);
        if (ids.size() == n_blocks) break;
        n_blocks = ids.size();
    }
    return Partition::from_assignment(std::vector<std::uint64_t>(block_of.begin(), block_of.end()));
}

std::string Witness::describe(const Mdp& m) const {
    std::ostringstream os;
    os << "states " << s << " and " << t << " share a block but ";
    if (choice) {
        os << "choice " << *choice;
        const auto& action = m.action_names()[m.choices(s)[*choice].action];
        if (!action.empty()) os << " [" << action << "]";
        os << " of state " << s << " has no matching choice in state " << t;
    } else {
        os << "differ on label \"" << label << "\"";
    }
    return os.str();
}

BisimulationCheck is_bisimulation(const Mdp& m, const Partition& p, const std::vector<std::string>& labels) {
    if (p.n_states() != m.n_states()) throw UsageError("partition and model have different state counts");
    std::vector<std::size_t> label_ids;
    for (const auto& l : labels) label_ids.push_back(m.require_label(l));
    const std::vector<BlockId>& block_of = p.assignment();

    for (BlockId b = 0; b < p.n_blocks(); ++b) {
        auto members = p.block(b);
        StateId first = *std::min_element(members.begin(), members.end());
        auto reference = lifted_choices(m, first, block_of);
        for (StateId t : members) {
            if (t == first) continue;
            for (std::size_t i = 0; i < label_ids.size(); ++i) {
                if (m.has_label(first, label_ids[i]) != m.has_label(t, label_ids[i])) {
                    return {false, Witness{first, t, std::nullopt, labels[i]}};
                }
            }
            auto other = lifted_choices(m, t, block_of);
            if (other == reference) continue;
            // Report a concrete unmatched choice, from whichever side has one.
            auto choices_s = m.choices(first);
            for (std::size_t c = 0; c < choices_s.size(); ++c) {
                if (!other.count(lift(choices_s[c].distribution, block_of))) return {false, Witness{first, t, c, {}}};
            }
            auto choices_t = m.choices(t);
            for (std::size_t c = 0; c < choices_t.size(); ++c) {
                if (!reference.count(lift(choices_t[c].distribution, block_of))) return {false, Witness{t, first, c, {}}};
            }
        }
    }
    return {};
}

std::vector<double> max_reachability(const Mdp& m, std::string_view goal, const ReachabilityOptions& options) {
    if (!(options.epsilon > 0)) throw UsageError("epsilon must be positive");
    const std::size_t n = m.n_states();
    const auto& target = m.label_mask(m.require_label(goal));

    // States with positive maximal probability: backward closure of the goal.
    std::vector<bool> can_reach(target.begin(), target.end());
    {
        std::vector<StateId> stack;
        for (StateId s = 0; s < n; ++s) {
            if (can_reach[s]) stack.push_back(s);
        }
        while (!stack.empty()) {
            StateId t = stack.back();
            stack.pop_back();
            for (const auto& pred : m.predecessors(t)) {
                if (!can_reach[pred.state]) {
                    can_reach[pred.state] = true;
                    stack.push_back(pred.state);
                }
            }
        }
    }

    // States with maximal probability one: greatest fixed point of "some choice
    // stays inside the candidate set and moves closer to the goal".
    std::vector<bool> almost_sure(n, true);
    while (true) {
        std::vector<bool> reach(target.begin(), target.end());
        bool grew = true;
        while (grew) {
            grew = false;
            for (StateId s = 0; s < n; ++s) {
                if (reach[s] || !almost_sure[s]) continue;
                for (const auto& c : m.choices(s)) {
                    bool inside = true;
                    bool closer = false;
                    for (const auto& [t, p] : c.distribution) {
                        inside = inside && almost_sure[t];
                        closer = closer || reach[t];
                    }
                    if (inside && closer) {
                        reach[s] = true;
                        grew = true;
                        break;
                    }
                }
            }
        }
        if (reach == almost_sure) break;
        almost_sure = std::move(reach);
    }

    std::vector<double> x(n, 0.0);
    std::vector<bool> fixed(n, false);
    for (StateId s = 0; s < n; ++s) {
        if (almost_sure[s]) {
            x[s] = 1.0;
            fixed[s] = true;
        } else if (!can_reach[s]) {
            fixed[s] = true;
        }
    }
    std::vector<double> next = x;
    for (std::size_t iter = 0;; ++iter) {
        if (iter >= options.max_iterations) {
            throw ResourceError(ResourceError::Kind::iterations,
                                "value iteration did not converge within " + std::to_string(options.max_iterations) +
                                    " iterations");
        }
        double delta = 0.0;
        for (StateId s = 0; s < n; ++s) {
            if (fixed[s]) continue;
            double best = 0.0;
            for (const auto& c : m.choices(s)) {
                double sum = 0.0;
                for (const auto& [t, p] : c.distribution) sum += p.to_double() * x[t];
                best = std::max(best, sum);
            }
            next[s] = best;
            delta = std::max(delta, std::abs(best - x[s]));
        }
        x.swap(next);
        if (delta < options.epsilon) break;
    }
    return x;
}

double max_quotient_deviation(const std::vector<double>& original, const std::vector<double>& quotient,
                              const Partition& p) {
    if (original.size() != p.n_states() || quotient.size() != p.n_blocks()) {
        throw UsageError("value vectors do not match the partition");
    }
    double worst = 0.0;
    for (StateId s = 0; s < original.size(); ++s) worst = std::max(worst, std::abs(original[s] - quotient[p.block_of(s)]));
    return worst;
}

}  // namespace mlbisim::verify
