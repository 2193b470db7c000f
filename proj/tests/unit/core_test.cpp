#include <gtest/gtest.h>

#include <limits>
#include <random>
#include <stdexcept>

#include "mlbisim/core/distribution.h"
#include "mlbisim/core/errors.h"
#include "mlbisim/core/mdp.h"
#include "mlbisim/core/partition.h"
#include "mlbisim/core/rational.h"

namespace mlbisim {
namespace {

Partition blocks(std::vector<std::vector<StateId>> b, std::size_t n) { return Partition::from_blocks(std::move(b), n); }

TEST(Rational, NormalisesSignAndLowestTerms) {
    Rational r(6, -8);
    EXPECT_EQ(r.num(), -3);
    EXPECT_EQ(r.den(), 4);
    EXPECT_EQ(Rational(0, 5), Rational(0));
    EXPECT_THROW(Rational(1, 0), std::domain_error);
}

TEST(Rational, ArithmeticMatchesHandComputation) {
    EXPECT_EQ(Rational(1, 3) + Rational(1, 6), Rational(1, 2));
    EXPECT_EQ(Rational(1, 3) - Rational(1, 2), Rational(-1, 6));
    EXPECT_EQ(Rational(2, 3) * Rational(9, 4), Rational(3, 2));
    EXPECT_EQ(Rational(2, 3) / Rational(4, 9), Rational(3, 2));
    EXPECT_THROW(Rational(1) / Rational(0), std::domain_error);
    EXPECT_LT(Rational(1, 3), Rational(1, 2));
    EXPECT_GT(Rational(-1, 3), Rational(-1, 2));
}

TEST(Rational, OverflowIsReportedNotWrapped) {
    const Rational big(std::numeric_limits<std::int64_t>::max());
    EXPECT_THROW(big + Rational(1), std::overflow_error);
    EXPECT_THROW(big * Rational(2), std::overflow_error);
    EXPECT_THROW(-Rational(std::numeric_limits<std::int64_t>::min()), std::overflow_error);
    // Large intermediate products that cancel stay exact.
    const Rational a(std::numeric_limits<std::int64_t>::max(), 3);
    EXPECT_EQ(a * Rational(3, std::numeric_limits<std::int64_t>::max()), Rational(1));
}

TEST(Rational, ParseAndPrintRoundTrip) {
    EXPECT_EQ(Rational::parse("3/12"), Rational(1, 4));
    EXPECT_EQ(Rational::parse("-7"), Rational(-7));
    EXPECT_EQ(Rational::parse("0.125"), Rational(1, 8));
    EXPECT_EQ(Rational::parse("1e-3"), Rational(1, 1000));
    EXPECT_THROW(Rational::parse("1/"), std::invalid_argument);
    EXPECT_THROW(Rational::parse("abc"), std::invalid_argument);
    std::mt19937_64 rng(7);
    for (int i = 0; i < 500; ++i) {
        Rational r(static_cast<std::int64_t>(rng() % 2001) - 1000, static_cast<std::int64_t>(rng() % 999) + 1);
        EXPECT_EQ(Rational::parse(r.to_string()), r);
        if (r.has_finite_decimal()) {
            EXPECT_EQ(Rational::parse(r.to_decimal_string()), r);
        }
    }
    EXPECT_EQ(Rational(1, 8).to_decimal_string(), "0.125");
    EXPECT_FALSE(Rational(1, 3).has_finite_decimal());
}

TEST(Rational, ApproximateRecoversSmallFractions) {
    EXPECT_EQ(Rational::approximate(1.0 / 3.0), Rational(1, 3));
    EXPECT_EQ(Rational::approximate(0.1), Rational(1, 10));
    EXPECT_EQ(Rational::approximate(3.14159, 10), Rational(22, 7));
}

TEST(Distribution, MergesDuplicatesAndDropsZeros) {
    Distribution d({{2, Rational(1, 4)}, {0, Rational(1, 2)}, {2, Rational(1, 4)}, {5, Rational(0)}});
    ASSERT_EQ(d.size(), 2u);
    EXPECT_EQ(d.entries()[0], (Distribution::Entry{0, Rational(1, 2)}));
    EXPECT_EQ(d.entries()[1], (Distribution::Entry{2, Rational(1, 2)}));
    EXPECT_EQ(d.at(1), Rational(0));
}

TEST(Distribution, RejectsBadMass) {
    EXPECT_THROW(Distribution({{0, Rational(1, 2)}}), ModelError);
    EXPECT_THROW(Distribution({{0, Rational(3, 2)}, {1, Rational(-1, 2)}}), ModelError);
}

TEST(Distribution, AccumulateOverBlocks) {
    Distribution half({{0, Rational(1, 2)}, {1, Rational(1, 2)}});
    const std::vector<StateId> both{0, 1};
    EXPECT_EQ(accumulate(half, both), Rational(1));
    EXPECT_EQ(accumulate(half, std::vector<StateId>{}), Rational(0));
    // Only state 2 of {2, 5} is in the support.
    Distribution d({{0, Rational(1, 3)}, {2, Rational(2, 3)}});
    EXPECT_EQ(accumulate(d, std::vector<StateId>{2, 5}), Rational(2, 3));
    EXPECT_EQ(accumulate(d, std::vector<StateId>{5, 2, 0}), Rational(1));
}

TEST(Partition, FinerThan) {
    EXPECT_TRUE(finer_than(blocks({{0}, {1}, {2}}, 3), blocks({{0, 1}, {2}}, 3)));
    EXPECT_FALSE(finer_than(blocks({{0, 1}, {2}}, 3), blocks({{0}, {1}, {2}}, 3)));
    // {0,2} meets both {0,1} and {2}.
    EXPECT_FALSE(finer_than(blocks({{0, 2}, {1}}, 3), blocks({{0, 1}, {2}}, 3)));
    EXPECT_TRUE(finer_than(blocks({{0, 1}, {2}}, 3), blocks({{0, 1}, {2}}, 3)));
    EXPECT_THROW(finer_than(Partition::singletons(3), Partition::singletons(4)), UsageError);
}

TEST(Partition, EqualityIsRelationEquality) {
    const std::vector<std::uint64_t> a{0, 0, 1, 2};
    const std::vector<std::uint64_t> permuted{7, 7, 3, 9};
    const std::vector<std::uint64_t> moved{0, 1, 1, 2};
    EXPECT_TRUE(partition_equal(Partition::from_assignment(a), Partition::from_assignment(a)));
    EXPECT_TRUE(partition_equal(Partition::from_assignment(a), Partition::from_assignment(permuted)));
    EXPECT_FALSE(partition_equal(Partition::from_assignment(a), Partition::from_assignment(moved)));
}

TEST(Partition, FromBlocksValidates) {
    EXPECT_THROW(blocks({{0}, {}}, 1), ModelError);
    EXPECT_THROW(blocks({{0, 1}, {1}}, 2), ModelError);
    EXPECT_THROW(blocks({{0}}, 2), ModelError);
    EXPECT_THROW(blocks({{3}}, 2), ModelError);
}

TEST(Partition, CanonicalAndMeet) {
    auto p = Partition::from_assignment(std::vector<std::uint64_t>{4, 1, 4, 0});
    auto c = p.canonical();
    EXPECT_EQ(c.assignment(), (std::vector<BlockId>{0, 1, 0, 2}));
    auto m = Partition::meet(blocks({{0, 1, 2}, {3}}, 4), blocks({{0, 3}, {1, 2}}, 4));
    EXPECT_TRUE(partition_equal(m, blocks({{0}, {1, 2}, {3}}, 4)));
    EXPECT_EQ(Partition::single_block(5).n_blocks(), 1u);
    EXPECT_EQ(Partition::singletons(5).n_blocks(), 5u);
}

MdpData two_state_data() {
    MdpData d;
    d.choices = {{Choice{0, Distribution({{0, Rational(1, 2)}, {1, Rational(1, 2)}})}},
                 {Choice{0, Distribution::dirac(1)}}};
    d.label_names = {"goal"};
    d.label_states = {{1}};
    d.variables = {VariableInfo{"x", 0, 1, false, false}};
    d.valuations = {0, 1};
    return d;
}

TEST(Mdp, BuildsPredecessorsAndLabels) {
    Mdp m(two_state_data());
    EXPECT_EQ(m.n_states(), 2u);
    EXPECT_EQ(m.n_choices(), 2u);
    EXPECT_EQ(m.n_transitions(), 3u);
    ASSERT_EQ(m.predecessors(1).size(), 2u);
    EXPECT_EQ(m.predecessors(0).size(), 1u);
    EXPECT_TRUE(m.has_label(1, m.require_label("goal")));
    EXPECT_FALSE(m.has_label(0, m.require_label("goal")));
    EXPECT_THROW(m.require_label("missing"), UsageError);
    EXPECT_EQ(Mdp(m.data()).n_transitions(), 3u);
}

TEST(Mdp, RejectsInvalidData) {
    auto dangling = two_state_data();
    dangling.choices[1] = {Choice{0, Distribution::dirac(7)}};
    EXPECT_THROW(Mdp{dangling}, ModelError);
    auto no_choice = two_state_data();
    no_choice.choices[1].clear();
    EXPECT_THROW(Mdp{no_choice}, ModelError);
    auto bad_label = two_state_data();
    bad_label.label_states = {{9}};
    EXPECT_THROW(Mdp{bad_label}, ModelError);
    auto out_of_range = two_state_data();
    out_of_range.valuations = {0, 5};
    EXPECT_THROW(Mdp{out_of_range}, ModelError);
    EXPECT_THROW(Mdp{MdpData{}}, ModelError);
}

}  // namespace
}  // namespace mlbisim
