#include <gtest/gtest.h>

#include <filesystem>

#include "mlbisim/bisim/quotient.h"
#include "mlbisim/bisim/refine.h"
#include "mlbisim/core/errors.h"
#include "mlbisim/prism/explicit_io.h"
#include "mlbisim/prism/explorer.h"
#include "mlbisim/verify/oracle.h"
#include "support/random_mdp.h"

namespace mlbisim::verify {
namespace {

const std::filesystem::path kFixtures = MLBISIM_FIXTURES;

Mdp from_choices(std::vector<std::vector<Choice>> choices, std::vector<StateId> goal) {
    MdpData d;
    d.choices = std::move(choices);
    d.label_names = {"goal"};
    d.label_states = {std::move(goal)};
    return Mdp(std::move(d));
}

Choice to(std::vector<Distribution::Entry> entries) { return Choice{0, Distribution(std::move(entries))}; }

Mdp coin(std::int64_t k) {
    return prism::explore(prism::instantiate(prism::parse_file((kFixtures / "models" / "coin2.nm").string()), {{"K", k}}));
}

TEST(Oracle, TrivialModels) {
    const Mdp one = from_choices({{Choice{0, Distribution::dirac(0)}}}, {});
    EXPECT_EQ(coarsest_bisimulation(one, "goal").n_blocks(), 1u);
    const Mdp twins = from_choices({{to({{0, Rational(1, 2)}, {1, Rational(1, 2)}})},
                                    {to({{1, Rational(1, 2)}, {0, Rational(1, 2)}})}},
                                   {});
    EXPECT_EQ(coarsest_bisimulation(twins, "goal").n_blocks(), 1u);
    const Mdp split = from_choices({{Choice{0, Distribution::dirac(0)}}, {Choice{0, Distribution::dirac(1)}}}, {1});
    EXPECT_EQ(coarsest_bisimulation(split, "goal").n_blocks(), 2u);
}

TEST(Oracle, SizeLimit) {
    const Mdp m = coin(2);
    EXPECT_THROW(coarsest_bisimulation(m, "finished", 100), ResourceError);
    EXPECT_NO_THROW(coarsest_bisimulation(m, "finished", 272));
}

TEST(Oracle, OutputIsABisimulationAndMergingBreaksIt) {
    std::vector<Mdp> models{coin(1), coin(2), prism::import_explicit(kFixtures / "explicit" / "five")};
    std::vector<std::string> goals{"finished", "finished", "goal"};
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        models.push_back(testing::random_mdp(seed));
        goals.push_back("goal");
    }
    for (std::size_t i = 0; i < models.size(); ++i) {
        SCOPED_TRACE(i);
        const Mdp& m = models[i];
        const Partition p = coarsest_bisimulation(m, goals[i]);
        ASSERT_TRUE(is_bisimulation(m, p, {goals[i]}).ok);
        EXPECT_TRUE(is_bisimulation(m, Partition::singletons(m.n_states()), {goals[i]}).ok);
        // Merge each pair of neighbouring blocks in turn.
        for (BlockId b = 0; b + 1 < p.n_blocks() && b < 10; ++b) {
            std::vector<std::uint64_t> merged(p.assignment().begin(), p.assignment().end());
            for (auto& x : merged) x = x == b + 1 ? b : x;
            const auto check = is_bisimulation(m, Partition::from_assignment(merged), {goals[i]});
            ASSERT_FALSE(check.ok) << "merge " << b;
            ASSERT_TRUE(check.witness.has_value());
            const auto& w = *check.witness;
            EXPECT_EQ(merged[w.s], merged[w.t]);
            EXPECT_NE(w.s, w.t);
            EXPECT_TRUE(w.choice.has_value() || !w.label.empty());
            EXPECT_FALSE(w.describe(m).empty());
        }
    }
}

TEST(Oracle, WitnessNamesTheLabelOrChoice) {
    const Mdp m = prism::import_explicit(kFixtures / "explicit" / "five");
    const auto by_label = is_bisimulation(m, Partition::from_blocks({{0, 1, 2, 3}, {4}}, 5), {"goal"});
    ASSERT_FALSE(by_label.ok);
    EXPECT_TRUE(by_label.witness->choice.has_value());
    const auto with_goal = is_bisimulation(m, Partition::from_blocks({{0}, {1, 2}, {3, 4}}, 5), {"goal"});
    ASSERT_FALSE(with_goal.ok);
    EXPECT_EQ(with_goal.witness->label, "goal");
    // Without the label, 3 and 4 both stay inside {3,4} with mass one.
    EXPECT_TRUE(is_bisimulation(m, Partition::from_blocks({{0}, {1, 2}, {3, 4}}, 5), {}).ok);
}

TEST(Reachability, GoalAndUnreachableStates) {
    // 0 -> goal 1; 2 loops forever.
    const Mdp m = from_choices({{to({{1, Rational(1)}})}, {Choice{0, Distribution::dirac(1)}}, {Choice{0, Distribution::dirac(2)}}},
                               {1});
    const auto v = max_reachability(m, "goal");
    EXPECT_EQ(v[1], 1.0);
    EXPECT_EQ(v[0], 1.0);
    EXPECT_EQ(v[2], 0.0);
}

TEST(Reachability, HalfStepChainReachesSurely) {
    // Each state stays with 1/2 and advances with 1/2; the last is the goal.
    const Mdp m = from_choices({{to({{0, Rational(1, 2)}, {1, Rational(1, 2)}})},
                                {to({{1, Rational(1, 2)}, {2, Rational(1, 2)}})},
                                {Choice{0, Distribution::dirac(2)}}},
                               {2});
    for (double x : max_reachability(m, "goal")) EXPECT_NEAR(x, 1.0, 1e-12);
}

TEST(Reachability, MaximisesOverChoicesAgainstClosedForm) {
    // Choice a: x = 1/4 + x/4 gives 1/3; choice b gives 3/10. State 1 is the
    // goal, state 2 a sink.
    const Mdp m = from_choices({{to({{1, Rational(1, 4)}, {0, Rational(1, 4)}, {2, Rational(1, 2)}}),
                                 to({{1, Rational(3, 10)}, {2, Rational(7, 10)}})},
                                {Choice{0, Distribution::dirac(1)}},
                                {Choice{0, Distribution::dirac(2)}}},
                               {1});
    const auto v = max_reachability(m, "goal", {.epsilon = 1e-14});
    EXPECT_NEAR(v[0], 1.0 / 3.0, 1e-12);
    EXPECT_EQ(v[2], 0.0);
    EXPECT_THROW(max_reachability(m, "goal", {.epsilon = 1e-14, .max_iterations = 2}), ResourceError);
}

TEST(Reachability, InvariantUnderBisimulationQuotient) {
    std::vector<std::pair<Mdp, std::string>> cases{{coin(2), "finished"},
                                                   {prism::import_explicit(kFixtures / "explicit" / "five"), "goal"}};
    for (std::uint64_t seed = 0; seed < 30; ++seed) cases.emplace_back(testing::random_mdp(seed), "goal");
    for (const auto& [m, goal] : cases) {
        const Partition p = coarsest_bisimulation(m, goal);
        const auto q = bisim::quotient(m, p, {.verified = true, .labels = std::vector<std::string>{goal}});
        const auto original = max_reachability(m, goal);
        const auto reduced = max_reachability(q.mdp, goal);
        EXPECT_LE(max_quotient_deviation(original, reduced, p), 2e-10);
    }
}

}  // namespace
}  // namespace mlbisim::verify
