#include "mlbisim/bisim/refine.h"

#include <algorithm>
#include <deque>
#include <unordered_map>

#include "mlbisim/core/errors.h"

namespace mlbisim::bisim {

namespace {

using Signature = std::vector<Prob>;
// One lifted choice: (block, probability) pairs sorted by block.
using Lifted = std::vector<std::pair<BlockId, Prob>>;
using FullSignature = std::vector<Lifted>;

struct SignatureHash {
    std::size_t operator()(const Signature& sig) const {
        std::size_t h = 0x9e3779b97f4a7c15ULL;
        for (const auto& p : sig) h = (h ^ p.hash()) * 0x100000001b3ULL;
        return h;
    }
    std::size_t operator()(const FullSignature& sig) const {
        std::size_t h = 0xcbf29ce484222325ULL;
        for (const auto& lifted : sig) {
            for (const auto& [b, p] : lifted) h = (h ^ (b * 0x9e3779b97f4a7c15ULL) ^ p.hash()) * 0x100000001b3ULL;
            h = (h ^ 0xff) * 0x100000001b3ULL;
        }
        return h;
    }
};

struct Split {
    BlockId block;
    std::vector<BlockId> fragments;  // original id first
};

// Groups `states` by key, returning the groups in increasing key order.
template <typename Key>
std::vector<std::vector<StateId>> group_by(const std::vector<StateId>& states, std::vector<Key>& keys) {
    std::unordered_map<Key, std::size_t, SignatureHash> index;
    std::vector<std::vector<StateId>> groups;
    std::vector<const Key*> group_keys;
    for (std::size_t i = 0; i < states.size(); ++i) {
        auto [it, inserted] = index.try_emplace(std::move(keys[i]), groups.size());
        if (inserted) {
            groups.emplace_back();
            group_keys.push_back(&it->first);
        }
        groups[it->second].push_back(states[i]);
    }
    std::vector<std::size_t> order(groups.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return *group_keys[a] < *group_keys[b]; });
    std::vector<std::vector<StateId>> sorted;
    sorted.reserve(groups.size());
    for (auto i : order) sorted.push_back(std::move(groups[i]));
    return sorted;
}

// Mutable partition with O(1) state moves between blocks.
class Refiner {
public:
    Refiner(const Mdp& m, const Partition& p)
        : m_(m), block_of_(p.assignment()), members_(p.blocks()), pos_(m.n_states()) {
        if (p.n_states() != m.n_states()) throw UsageError("partition and model have different state counts");
        for (const auto& members : members_) {
            for (std::uint32_t i = 0; i < members.size(); ++i) pos_[members[i]] = i;
        }
        mass_.assign(m.n_choices(), Prob(0));
        choice_touched_.assign(m.n_choices(), 0);
        state_touched_.assign(m.n_states(), 0);
    }

    std::size_t n_blocks() const { return members_.size(); }
    std::size_t size(BlockId b) const { return members_[b].size(); }

    Partition partition() const { return Partition::from_blocks(members_, m_.n_states()); }

    std::vector<Split> split_by(BlockId splitter) {
        std::vector<ChoiceIndex> touched_choices;
        std::vector<StateId> touched_states;
        for (StateId t : members_[splitter]) {
            for (const auto& pred : m_.predecessors(t)) {
                if (!choice_touched_[pred.choice]) {
                    choice_touched_[pred.choice] = 1;
                    touched_choices.push_back(pred.choice);
                }
                mass_[pred.choice] += pred.probability;
                if (!state_touched_[pred.state]) {
                    state_touched_[pred.state] = 1;
                    touched_states.push_back(pred.state);
                }
            }
        }
        std::sort(touched_states.begin(), touched_states.end(), [&](StateId a, StateId b) {
            return block_of_[a] != block_of_[b] ? block_of_[a] < block_of_[b] : a < b;
        });

        std::vector<std::pair<BlockId, std::vector<std::vector<StateId>>>> plans;
        for (std::size_t i = 0; i < touched_states.size();) {
            BlockId b = block_of_[touched_states[i]];
            std::size_t j = i;
            while (j < touched_states.size() && block_of_[touched_states[j]] == b) ++j;
            std::vector<StateId> run(touched_states.begin() + i, touched_states.begin() + j);
            std::vector<Signature> keys;
            keys.reserve(run.size());
            for (StateId s : run) keys.push_back(signature(s));
            auto groups = group_by(run, keys);
            const bool has_untouched = run.size() < members_[b].size();
            if (has_untouched || groups.size() > 1) {
                // Untouched states (signature {0}) keep the block, otherwise the first group does.
                if (!has_untouched) groups.erase(groups.begin());
                plans.emplace_back(b, std::move(groups));
            }
            i = j;
        }

        for (ChoiceIndex c : touched_choices) {
            mass_[c] = 0;
            choice_touched_[c] = 0;
        }
        for (StateId s : touched_states) state_touched_[s] = 0;

        std::vector<Split> splits;
        for (auto& [b, moved] : plans) splits.push_back(apply(b, moved));
        return splits;
    }

    std::vector<Split> full_pass() {
        std::vector<std::pair<BlockId, std::vector<std::vector<StateId>>>> plans;
        for (BlockId b = 0; b < members_.size(); ++b) {
            if (members_[b].size() < 2) continue;
            std::vector<StateId> states = members_[b];
            std::sort(states.begin(), states.end());
            std::vector<FullSignature> keys;
            keys.reserve(states.size());
            for (StateId s : states) keys.push_back(full_signature(s));
            auto groups = group_by(states, keys);
            if (groups.size() < 2) continue;
            groups.erase(groups.begin());
            plans.emplace_back(b, std::move(groups));
        }
        std::vector<Split> splits;
        for (auto& [b, moved] : plans) splits.push_back(apply(b, moved));
        return splits;
    }

private:
    Signature signature(StateId s) const {
        Signature sig;
        bool missed = false;
        const ChoiceIndex first = m_.first_choice(s);
        const ChoiceIndex end = first + static_cast<ChoiceIndex>(m_.choices(s).size());
        for (ChoiceIndex c = first; c < end; ++c) {
            if (choice_touched_[c]) {
                sig.push_back(mass_[c]);
            } else {
                missed = true;
            }
        }
        if (missed) sig.push_back(0);
        std::sort(sig.begin(), sig.end());
        sig.erase(std::unique(sig.begin(), sig.end()), sig.end());
        return sig;
    }

    FullSignature full_signature(StateId s) const {
        FullSignature sig;
        for (const auto& choice : m_.choices(s)) {
            Lifted lifted;
            for (const auto& [t, p] : choice.distribution) lifted.emplace_back(block_of_[t], p);
            std::sort(lifted.begin(), lifted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
            Lifted merged;
            for (const auto& [b, p] : lifted) {
                if (!merged.empty() && merged.back().first == b) {
                    merged.back().second += p;
                } else {
                    merged.emplace_back(b, p);
                }
            }
            sig.push_back(std::move(merged));
        }
        std::sort(sig.begin(), sig.end());
        sig.erase(std::unique(sig.begin(), sig.end()), sig.end());
        return sig;
    }

    Split apply(BlockId b, const std::vector<std::vector<StateId>>& moved) {
        Split split{b, {b}};
        for (const auto& group : moved) {
            BlockId fresh = static_cast<BlockId>(members_.size());
            members_.emplace_back();
            for (StateId s : group) {
                auto& from = members_[b];
                StateId last = from.back();
                from[pos_[s]] = last;
                pos_[last] = pos_[s];
                from.pop_back();
                pos_[s] = static_cast<std::uint32_t>(members_[fresh].size());
                members_[fresh].push_back(s);
                block_of_[s] = fresh;
            }
            split.fragments.push_back(fresh);
        }
        return split;
    }

    const Mdp& m_;
    std::vector<BlockId> block_of_;
    std::vector<std::vector<StateId>> members_;
    std::vector<std::uint32_t> pos_;
    std::vector<Prob> mass_;
    std::vector<char> choice_touched_;
    std::vector<char> state_touched_;
};

class SplitterQueue {
public:
    bool empty() const { return fifo_.empty(); }
    bool pending(BlockId b) const { return b < pending_.size() && pending_[b]; }
    void push(BlockId b) {
        if (pending(b)) return;
        if (pending_.size() <= b) pending_.resize(b + 1, 0);
        pending_[b] = 1;
        fifo_.push_back(b);
    }
    BlockId pop() {
        BlockId b = fifo_.front();
        fifo_.pop_front();
        pending_[b] = 0;
        return b;
    }

private:
    std::deque<BlockId> fifo_;
    std::vector<char> pending_;
};

// All ids except the largest block's (ties keep the lowest id out).
std::vector<BlockId> all_but_largest(const Refiner& r, const std::vector<BlockId>& ids) {
    BlockId largest = ids.front();
    for (BlockId b : ids) {
        if (r.size(b) > r.size(largest) || (r.size(b) == r.size(largest) && b < largest)) largest = b;
    }
    std::vector<BlockId> out;
    for (BlockId b : ids) {
        if (b != largest) out.push_back(b);
    }
    return out;
}

}  // namespace

Partition initial_partition(const Mdp& m, std::string_view goal) {
    const auto& mask = m.label_mask(m.require_label(goal));
    std::vector<std::uint64_t> assignment(m.n_states());
    for (StateId s = 0; s < m.n_states(); ++s) assignment[s] = mask[s] ? 1 : 0;
    return Partition::from_assignment(assignment);
}

SplitResult refine_by_splitter(const Mdp& m, const Partition& p, BlockId splitter) {
    if (splitter >= p.n_blocks()) throw UsageError("splitter block " + std::to_string(splitter) + " does not exist");
    Refiner r(m, p);
    SplitResult result;
    for (auto& split : r.split_by(splitter)) {
        result.created.insert(result.created.end(), split.fragments.begin() + 1, split.fragments.end());
        result.fragments.push_back(std::move(split.fragments));
    }
    result.partition = r.partition();
    return result;
}

RefineResult refine_fixpoint(const Mdp& m, const Partition& init, const RefineOptions& options) {
    Refiner r(m, init);
    SplitterQueue queue;
    RefineStats stats;
    stats.initial_blocks = init.n_blocks();

    auto check_deadline = [&] {
        if (options.deadline && std::chrono::steady_clock::now() > *options.deadline) {
            throw ResourceError(ResourceError::Kind::time, "partition refinement timed out");
        }
    };
    auto schedule = [&](const Split& split, bool full_pass) {
        SplitEvent event{split.block, split.fragments, {}, queue.pending(split.block), full_pass};
        if (event.was_pending) {
            event.enqueued.assign(split.fragments.begin() + 1, split.fragments.end());
        } else {
            event.enqueued = all_but_largest(r, split.fragments);
        }
        for (BlockId b : event.enqueued) queue.push(b);
        if (options.on_split) options.on_split(event);
    };

    if (r.n_blocks() > 1) {
        std::vector<BlockId> all(r.n_blocks());
        for (BlockId b = 0; b < all.size(); ++b) all[b] = b;
        for (BlockId b : all_but_largest(r, all)) queue.push(b);
    }

    while (true) {
        while (!queue.empty()) {
            if ((stats.splitters_examined & 63) == 0) check_deadline();
            BlockId c = queue.pop();
            ++stats.splitters_examined;
            auto splits = r.split_by(c);
            if (!splits.empty()) ++stats.effective_splitters;
            for (const auto& split : splits) schedule(split, false);
        }
        check_deadline();
        ++stats.full_passes;
        auto splits = r.full_pass();
        if (splits.empty()) break;
        ++stats.effective_full_passes;
        stats.full_pass_splits += splits.size();
        for (const auto& split : splits) schedule(split, true);
    }

    RefineResult result{r.partition(), stats};
    result.stats.final_blocks = result.partition.n_blocks();
    return result;
}

}  // namespace mlbisim::bisim
