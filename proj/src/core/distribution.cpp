#include "mlbisim/core/distribution.h"

#include <algorithm>

#include "mlbisim/core/errors.h"

namespace mlbisim {

Distribution::Distribution(std::vector<Entry> entries) {
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
    Prob total = 0;
    for (auto& [state, p] : entries) {
        if (p < 0 || p > 1) throw ModelError("probability " + p.to_string() + " outside [0, 1]");
        total += p;
        if (p.is_zero()) continue;
        if (!entries_.empty() && entries_.back().first == state) {
            entries_.back().second += p;
        } else {
            entries_.emplace_back(state, p);
        }
    }
    if (total != 1) throw ModelError("probabilities sum to " + total.to_string() + ", not 1");
}

Distribution Distribution::dirac(StateId target) { return Distribution({{target, Prob(1)}}); }

Prob Distribution::at(StateId state) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), state,
                               [](const Entry& e, StateId s) { return e.first < s; });
    if (it != entries_.end() && it->first == state) return it->second;
    return 0;
}

Prob accumulate(const Distribution& mu, std::span<const StateId> block) {
    std::vector<StateId> sorted(block.begin(), block.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    Prob sum = 0;
    auto it = sorted.begin();
    for (const auto& [state, p] : mu) {
        it = std::lower_bound(it, sorted.end(), state);
        if (it == sorted.end()) break;
        if (*it == state) sum += p;
    }
    return sum;
}

}  // namespace mlbisim
