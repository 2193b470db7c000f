#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mlbisim/core/mdp.h"

namespace mlbisim::testing {

struct RandomMdpOptions {
    std::size_t max_states = 200;
    std::size_t max_actions = 4;
    std::size_t max_support = 4;
    /// Build the model as copies of a smaller skeleton so that the coarsest
    /// bisimulation is non-trivial.
    bool lumpable = true;
};

namespace detail {

// Splits `units` sixteenths into `parts` positive pieces when possible.
inline std::vector<std::int64_t> split_units(std::int64_t units, std::size_t parts, std::mt19937_64& rng) {
    parts = std::max<std::size_t>(1, std::min<std::size_t>(parts, static_cast<std::size_t>(units)));
    std::vector<std::int64_t> out(parts, 1);
    for (std::int64_t left = units - static_cast<std::int64_t>(parts); left > 0; --left) {
        out[std::uniform_int_distribution<std::size_t>(0, parts - 1)(rng)] += 1;
    }
    return out;
}

}  // namespace detail

/// Seeded random MDP with probabilities whose denominators divide 16, at most
/// `max_actions` choices per state and one label "goal". A second label
/// "odd" marks odd-numbered states so label handling is exercised.
inline Mdp random_mdp(std::uint64_t seed, const RandomMdpOptions& options = {}) {
    std::mt19937_64 rng(seed);
    auto uniform = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };

    const std::size_t n = uniform(1, options.max_states);
    std::size_t skeleton = n;
    std::vector<std::size_t> image(n);
    if (options.lumpable && n > 1) {
        skeleton = uniform(1, std::max<std::size_t>(1, n / 2));
        for (std::size_t s = 0; s < n; ++s) image[s] = s < skeleton ? s : uniform(0, skeleton - 1);
    } else {
        for (std::size_t s = 0; s < n; ++s) image[s] = s;
    }
    std::vector<std::vector<StateId>> copies(skeleton);
    for (std::size_t s = 0; s < n; ++s) copies[image[s]].push_back(static_cast<StateId>(s));

    // Skeleton choices: per skeleton state, a list of distributions over
    // skeleton states in sixteenths.
    std::vector<std::vector<std::vector<std::pair<std::size_t, std::int64_t>>>> skel(skeleton);
    std::vector<bool> goal_of(skeleton);
    for (std::size_t k = 0; k < skeleton; ++k) {
        goal_of[k] = uniform(0, 3) == 0;
        const std::size_t actions = uniform(1, options.max_actions);
        for (std::size_t a = 0; a < actions; ++a) {
            const std::size_t support = uniform(1, std::min(options.max_support, skeleton));
            auto masses = detail::split_units(16, support, rng);
            std::vector<std::pair<std::size_t, std::int64_t>> dist;
            for (auto m : masses) dist.emplace_back(uniform(0, skeleton - 1), m);
            skel[k].push_back(std::move(dist));
        }
    }

    MdpData data;
    data.action_names = {"", "a", "b"};
    data.choices.resize(n);
    for (std::size_t s = 0; s < n; ++s) {
        for (const auto& dist : skel[image[s]]) {
            std::vector<Distribution::Entry> entries;
            for (auto [target, units] : dist) {
                const auto& pool = copies[target];
                auto pieces = detail::split_units(units, uniform(1, pool.size()), rng);
                for (auto piece : pieces) entries.emplace_back(pool[uniform(0, pool.size() - 1)], Rational(piece, 16));
            }
            data.choices[s].push_back(
                Choice{static_cast<ActionId>(uniform(0, 2)), Distribution(std::move(entries))});
        }
    }
    data.label_names = {"goal", "odd"};
    data.label_states.resize(2);
    for (std::size_t s = 0; s < n; ++s) {
        if (goal_of[image[s]]) data.label_states[0].push_back(static_cast<StateId>(s));
        if (s % 2 == 1) data.label_states[1].push_back(static_cast<StateId>(s));
    }
    data.variables = {VariableInfo{"s", 0, static_cast<std::int64_t>(n) - 1, false, false}};
    for (std::size_t s = 0; s < n; ++s) data.valuations.push_back(static_cast<std::int64_t>(s));
    return Mdp(std::move(data));
}

}  // namespace mlbisim::testing
