#include "mlbisim/bisim/quotient.h"

#include <algorithm>

#include "mlbisim/core/errors.h"

namespace mlbisim::bisim {

Quotient quotient(const Mdp& m, const Partition& p, const QuotientOptions& options) {
    if (p.n_states() != m.n_states()) throw UsageError("partition and model have different state counts");
    const std::size_t n = p.n_blocks();
    std::vector<StateId> rep(n);
    for (BlockId b = 0; b < n; ++b) {
        auto members = p.block(b);
        rep[b] = *std::min_element(members.begin(), members.end());
    }

    MdpData data;
    data.initial = p.block_of(m.initial());
    data.action_names = m.action_names();
    std::vector<std::size_t> labels;
    if (options.labels) {
        for (const auto& name : *options.labels) labels.push_back(m.require_label(name));
    } else {
        for (std::size_t l = 0; l < m.label_names().size(); ++l) labels.push_back(l);
    }
    for (auto l : labels) data.label_names.push_back(m.label_names()[l]);
    data.label_states.resize(labels.size());
    data.variables = m.variables();
    data.choices.resize(n);
    for (BlockId b = 0; b < n; ++b) {
        for (const auto& choice : m.choices(rep[b])) {
            std::vector<Distribution::Entry> lifted;
            for (const auto& [t, prob] : choice.distribution) lifted.emplace_back(p.block_of(t), prob);
            Choice c{choice.action, Distribution(std::move(lifted))};
            auto& out = data.choices[b];
            bool seen = std::any_of(out.begin(), out.end(), [&](const Choice& o) { return o.distribution == c.distribution; });
            if (!seen) out.push_back(std::move(c));
        }
        auto vals = m.valuation(rep[b]);
        data.valuations.insert(data.valuations.end(), vals.begin(), vals.end());
        if (m.is_deadlock(rep[b])) data.deadlocks.push_back(b);
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const std::size_t l = labels[i];
        for (BlockId b = 0; b < n; ++b) {
            bool value = m.has_label(rep[b], l);
            for (StateId s : p.block(b)) {
                if (m.has_label(s, l) != value) {
                    throw ModelError("label \"" + m.label_names()[l] + "\" is not constant on block " +
                                     std::to_string(b));
                }
            }
            if (value) data.label_states[i].push_back(b);
        }
    }
    return Quotient{Mdp(std::move(data)), options.verified};
}

}  // namespace mlbisim::bisim
