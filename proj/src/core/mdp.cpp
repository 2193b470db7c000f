#include "mlbisim/core/mdp.h"

#include <string>

#include "mlbisim/core/errors.h"

namespace mlbisim {

Mdp::Mdp(MdpData data) {
    const std::size_t n = data.choices.size();
    if (n == 0) throw ModelError("model has no states");
    if (data.initial >= n) throw ModelError("initial state " + std::to_string(data.initial) + " out of range");
    if (data.action_names.empty()) data.action_names.emplace_back();
    initial_ = data.initial;

    choice_begin_.reserve(n + 1);
    choice_begin_.push_back(0);
    for (StateId s = 0; s < n; ++s) {
        if (data.choices[s].empty()) throw ModelError("state " + std::to_string(s) + " has no choices");
        for (auto& c : data.choices[s]) {
            if (c.action >= data.action_names.size()) {
                throw ModelError("state " + std::to_string(s) + " uses undeclared action id " + std::to_string(c.action));
            }
            if (c.distribution.size() == 0) throw ModelError("state " + std::to_string(s) + " has an empty distribution");
            for (const auto& [target, p] : c.distribution) {
                if (target >= n) {
                    throw ModelError("state " + std::to_string(s) + " has a transition to unknown state " +
                                     std::to_string(target));
                }
            }
            n_transitions_ += c.distribution.size();
            choices_.push_back(std::move(c));
            choice_source_.push_back(s);
        }
        choice_begin_.push_back(static_cast<ChoiceIndex>(choices_.size()));
    }

    // Predecessor index, counting sort by target.
    pred_begin_.assign(n + 1, 0);
    for (const auto& c : choices_) {
        for (const auto& e : c.distribution) ++pred_begin_[e.first + 1];
    }
    for (std::size_t s = 0; s < n; ++s) pred_begin_[s + 1] += pred_begin_[s];
    preds_.resize(n_transitions_, Predecessor{0, 0, Prob(0)});
    std::vector<std::uint32_t> fill(pred_begin_.begin(), pred_begin_.end() - 1);
    for (ChoiceIndex k = 0; k < choices_.size(); ++k) {
        for (const auto& [target, p] : choices_[k].distribution) {
            preds_[fill[target]++] = Predecessor{choice_source_[k], k, p};
        }
    }

    action_names_ = std::move(data.action_names);
    if (data.label_states.size() != data.label_names.size()) throw ModelError("label names and label sets differ in size");
    label_names_ = std::move(data.label_names);
    labels_.assign(label_names_.size(), std::vector<bool>(n, false));
    for (std::size_t l = 0; l < label_names_.size(); ++l) {
        for (StateId s : data.label_states[l]) {
            if (s >= n) throw ModelError("label '" + label_names_[l] + "' references unknown state " + std::to_string(s));
            labels_[l][s] = true;
        }
    }

    variables_ = std::move(data.variables);
    valuations_ = std::move(data.valuations);
    if (valuations_.size() != n * variables_.size()) throw ModelError("valuation table does not match state count");
    for (StateId s = 0; s < n; ++s) {
        auto row = valuation(s);
        for (std::size_t v = 0; v < variables_.size(); ++v) {
            if (row[v] < variables_[v].lower || row[v] > variables_[v].upper) {
                throw ModelError("state " + std::to_string(s) + ": variable " + variables_[v].name + " = " +
                                 std::to_string(row[v]) + " outside its range");
            }
        }
    }

    if (!data.deadlocks.empty()) {
        deadlock_.assign(n, false);
        for (StateId s : data.deadlocks) {
            if (s >= n) throw ModelError("deadlock marker references unknown state " + std::to_string(s));
            if (!deadlock_[s]) ++n_deadlocks_;
            deadlock_[s] = true;
        }
    }
}

std::optional<std::size_t> Mdp::label_index(std::string_view name) const {
    for (std::size_t i = 0; i < label_names_.size(); ++i) {
        if (label_names_[i] == name) return i;
    }
    return std::nullopt;
}

std::size_t Mdp::require_label(std::string_view name) const {
    auto idx = label_index(name);
    if (!idx) throw UsageError("unknown label '" + std::string(name) + "'");
    return *idx;
}

std::vector<StateId> Mdp::label_states(std::size_t label) const {
    std::vector<StateId> out;
    for (StateId s = 0; s < n_states(); ++s) {
        if (labels_[label][s]) out.push_back(s);
    }
    return out;
}

MdpData Mdp::data() const {
    MdpData d;
    d.initial = initial_;
    d.choices.resize(n_states());
    for (StateId s = 0; s < n_states(); ++s) {
        auto cs = choices(s);
        d.choices[s].assign(cs.begin(), cs.end());
        if (is_deadlock(s)) d.deadlocks.push_back(s);
    }
    d.action_names = action_names_;
    d.label_names = label_names_;
    for (std::size_t l = 0; l < label_names_.size(); ++l) d.label_states.push_back(label_states(l));
    d.variables = variables_;
    d.valuations = valuations_;
    return d;
}

}  // namespace mlbisim
