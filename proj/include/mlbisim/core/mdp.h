#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mlbisim/core/distribution.h"

namespace mlbisim {

using ActionId = std::uint32_t;
using ChoiceIndex = std::uint32_t;

/// Metadata for one model variable. `parametric` marks variables whose upper
/// bound depends on the program parameter.
struct VariableInfo {
    std::string name;
    std::int64_t lower = 0;
    std::int64_t upper = 0;
    bool parametric = false;
    bool is_bool = false;

    friend bool operator==(const VariableInfo&, const VariableInfo&) = default;
};

struct Choice {
    ActionId action = 0;  ///< index into Mdp::action_names(); 0 is the unnamed action
    Distribution distribution;

    friend bool operator==(const Choice&, const Choice&) = default;
};

/// A positive-probability edge seen from its target: state `state` reaches the
/// target through global choice `choice`.
struct Predecessor {
    StateId state;
    ChoiceIndex choice;
    Prob probability;
};

/// Everything needed to construct an Mdp. Valuations are row-major,
/// n_states x variables.size().
struct MdpData {
    StateId initial = 0;
    std::vector<std::vector<Choice>> choices;
    std::vector<std::string> action_names{""};
    std::vector<std::string> label_names;
    std::vector<std::vector<StateId>> label_states;
    std::vector<VariableInfo> variables;
    std::vector<std::int64_t> valuations;
    std::vector<StateId> deadlocks;  ///< states that received an implicit self-loop
};

/// Explicit-state Markov decision process. Immutable after construction.
class Mdp {
public:
    Mdp() = default;

    /// Validates and takes ownership of `data`; throws ModelError on any
    /// violated invariant (dangling targets, states without choices, ...).
    explicit Mdp(MdpData data);

    std::size_t n_states() const { return choice_begin_.empty() ? 0 : choice_begin_.size() - 1; }
    std::size_t n_choices() const { return choices_.size(); }
    std::size_t n_transitions() const { return n_transitions_; }
    StateId initial() const { return initial_; }

    std::span<const Choice> choices(StateId s) const {
        return {choices_.data() + choice_begin_[s], choices_.data() + choice_begin_[s + 1]};
    }
    ChoiceIndex first_choice(StateId s) const { return choice_begin_[s]; }
    const Choice& choice(ChoiceIndex global) const { return choices_[global]; }
    StateId choice_source(ChoiceIndex global) const { return choice_source_[global]; }

    std::span<const Predecessor> predecessors(StateId s) const {
        return {preds_.data() + pred_begin_[s], preds_.data() + pred_begin_[s + 1]};
    }

    const std::vector<std::string>& action_names() const { return action_names_; }
    const std::vector<std::string>& label_names() const { return label_names_; }
    std::optional<std::size_t> label_index(std::string_view name) const;
    /// Label index by name; throws UsageError when the label is unknown.
    std::size_t require_label(std::string_view name) const;
    bool has_label(StateId s, std::size_t label) const { return labels_[label][s]; }
    const std::vector<bool>& label_mask(std::size_t label) const { return labels_[label]; }
    std::vector<StateId> label_states(std::size_t label) const;

    const std::vector<VariableInfo>& variables() const { return variables_; }
    std::span<const std::int64_t> valuation(StateId s) const {
        const std::size_t width = variables_.size();
        return {valuations_.data() + s * width, width};
    }

    bool is_deadlock(StateId s) const { return !deadlock_.empty() && deadlock_[s]; }
    std::size_t n_deadlocks() const { return n_deadlocks_; }

    /// Copies the model back into its construction form.
    MdpData data() const;

private:
    StateId initial_ = 0;
    std::vector<ChoiceIndex> choice_begin_;
    std::vector<Choice> choices_;
    std::vector<StateId> choice_source_;
    std::vector<std::uint32_t> pred_begin_;
    std::vector<Predecessor> preds_;
    std::size_t n_transitions_ = 0;
    std::vector<std::string> action_names_;
    std::vector<std::string> label_names_;
    std::vector<std::vector<bool>> labels_;
    std::vector<VariableInfo> variables_;
    std::vector<std::int64_t> valuations_;
    std::vector<bool> deadlock_;
    std::size_t n_deadlocks_ = 0;
};

}  // namespace mlbisim
