#include <gtest/gtest.h>

#include <filesystem>
#include <map>
#include <set>

#include "mlbisim/bisim/refine.h"
#include "mlbisim/core/errors.h"
#include "mlbisim/mlinit/classifier.h"
#include "mlbisim/mlinit/model.h"
#include "mlbisim/mlinit/pipeline.h"
#include "mlbisim/mlinit/relations.h"
#include "mlbisim/mlinit/superblocks.h"
#include "mlbisim/prism/explorer.h"
#include "mlbisim/verify/oracle.h"

namespace mlbisim::mlinit {
namespace {

const std::filesystem::path kFixtures = MLBISIM_FIXTURES;

prism::Program program(const std::string& name, const std::map<std::string, std::int64_t>& bindings = {}) {
    return prism::bind(prism::parse_file((kFixtures / "models" / name).string()), bindings);
}

PipelineOptions options(const std::string& goal) {
    PipelineOptions o;
    o.goal = goal;
    o.seed = 7;
    return o;
}

// Self-loop model over the given valuations.
Mdp valuation_model(const std::vector<VariableInfo>& vars, const std::vector<std::vector<std::int64_t>>& rows) {
    MdpData d;
    d.variables = vars;
    for (std::size_t s = 0; s < rows.size(); ++s) {
        d.choices.push_back({Choice{0, Distribution::dirac(static_cast<StateId>(s))}});
        d.valuations.insert(d.valuations.end(), rows[s].begin(), rows[s].end());
    }
    return Mdp(std::move(d));
}

ProjectionSet projection_set(const Mdp& m, std::span<const StateId> block) {
    std::set<Projection> out;
    for (auto s : block) out.insert(projection(m, s));
    return {out.begin(), out.end()};
}

TEST(Features, ValuesThenSlack) {
    const Mdp m = valuation_model({{"x", 0, 9, true, false}, {"y", 0, 1, false, false}}, {{3, 1}});
    EXPECT_EQ(feature_count(m), 3u);
    EXPECT_EQ(features(m, 0), (std::vector<std::int64_t>{3, 1, 6}));
    EXPECT_EQ(projection(m, 0), Projection{1});
    EXPECT_EQ(parametric_values(m, 0), std::vector<std::int64_t>{3});
}

TEST(Superblocks, EqualProjectionSetsShareASuperblock) {
    const std::vector<VariableInfo> vars{{"x", 0, 9, true, false}, {"y", 0, 2, false, false}};
    const Mdp m = valuation_model(vars, {{0, 0}, {1, 1}, {2, 0}, {3, 1}, {4, 0}, {5, 1}, {6, 2}, {7, 2}});
    const Partition p = Partition::from_blocks({{0, 1}, {2, 3}, {4}, {5}, {6, 7}}, 8);
    const auto sb = compute_superblocks(m, p);
    ASSERT_EQ(sb.projections.size(), 3u);
    EXPECT_TRUE(sb.projections[0].empty());
    EXPECT_EQ(sb.projections[1], (ProjectionSet{{0}, {1}}));
    EXPECT_EQ(sb.projections[2], (ProjectionSet{{2}}));
    EXPECT_EQ(sb.eta, (std::vector<SuperblockId>{1, 1, 1, 1, 0, 0, 2, 2}));
    EXPECT_EQ(sb.blocks[1].size(), 2u);
    EXPECT_EQ(sb.blocks[0].size(), 2u);
}

TEST(Superblocks, SingletonsFormOnlyTheSingularSuperblock) {
    const Mdp m = valuation_model({{"x", 0, 9, true, false}}, {{0}, {1}, {2}});
    const auto sb = compute_superblocks(m, Partition::singletons(3));
    EXPECT_EQ(sb.projections.size(), 1u);
    EXPECT_EQ(sb.eta, (std::vector<SuperblockId>{0, 0, 0}));
}

TEST(Superblocks, AlignmentKeepsSetsPresentInEverySample) {
    SampleSuperblocks a;
    a.projections = {{}, {{0}, {1}}, {{2}}};
    a.blocks = {{}, {0}, {1}};
    a.eta = {1, 1, 2};
    SampleSuperblocks b;
    b.projections = {{}, {{0}, {1}}, {{3}}};
    b.blocks = {{}, {0}, {1}};
    b.eta = {1, 2, 1};
    const auto catalog = align_superblocks({a, b});
    ASSERT_EQ(catalog.size(), 2u);
    EXPECT_EQ(catalog.projections[1], (ProjectionSet{{0}, {1}}));
    EXPECT_EQ(catalog.eta[0], (std::vector<SuperblockId>{1, 1, 0}));
    EXPECT_EQ(catalog.eta[1], (std::vector<SuperblockId>{1, 0, 1}));
    EXPECT_EQ(catalog.unmatched, 2u);
    EXPECT_THROW(align_superblocks({}), UsageError);
}

TEST(Classifier, ConstantSubclassShortcut) {
    std::vector<TrainingRow> rows;
    for (std::int64_t x = 0; x < 5; ++x) rows.push_back({{1, 0}, {x, 9 - x}, 7});
    const auto model = train_classifiers(rows, 1);
    ASSERT_EQ(model.subclasses().size(), 1u);
    const auto* sub = model.find({1, 0});
    ASSERT_NE(sub, nullptr);
    EXPECT_EQ(sub->classifier->kind(), "constant");
    EXPECT_EQ(sub->n_train, 5u);
    const std::vector<std::int64_t> far{1000, -3};
    EXPECT_EQ(model.predict({1, 0}, far), 7u);
    for (const auto& r : rows) EXPECT_EQ(model.predict(r.key, r.features), 7u);
    EXPECT_EQ(model.predict({0, 0}, far), kSingular);
}

TEST(Classifier, SeparableOnSlackIsFitExactly) {
    // Two samples with bounds 6 and 8; the label is 2 when the slack is at
    // most one and 5 when it is at least four, which no threshold on the value
    // alone reproduces.
    std::vector<std::vector<std::int64_t>> x;
    std::vector<SuperblockId> y;
    for (std::int64_t bound : {6, 8}) {
        for (std::int64_t v = 0; v <= bound; ++v) {
            if (bound - v == 2 || bound - v == 3) continue;
            x.push_back({v, bound - v});
            y.push_back(bound - v <= 1 ? 2 : 5);
        }
    }
    const auto c = LinearSvmClassifier::train(x, y, 3);
    EXPECT_EQ(c.training_accuracy(), 1.0);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(c.predict(x[i]), y[i]) << i;
    EXPECT_EQ(c.data().classes, (std::vector<SuperblockId>{2, 5}));
    EXPECT_EQ(c.data().weights.size(), 2u);
    EXPECT_EQ(c.data().weights[0].size(), 3u);
    EXPECT_THROW(c.predict(std::vector<std::int64_t>{1}), UsageError);
}

TEST(Classifier, RetrainingIsBitwiseIdentical) {
    std::vector<std::vector<std::int64_t>> x;
    std::vector<SuperblockId> y;
    for (std::int64_t i = 0; i < 40; ++i) {
        x.push_back({i % 7, (i * 5) % 11, 20 - i % 13});
        y.push_back(static_cast<SuperblockId>(1 + (i * 3) % 4));
    }
    const auto a = LinearSvmClassifier::train(x, y, 42, {.c = 1.0, .max_epochs = 200});
    const auto b = LinearSvmClassifier::train(x, y, 42, {.c = 1.0, .max_epochs = 200});
    EXPECT_EQ(a.data().weights, b.data().weights);
    EXPECT_EQ(a.data().epochs, b.data().epochs);

    std::vector<TrainingRow> rows;
    for (std::size_t i = 0; i < x.size(); ++i) rows.push_back({{static_cast<std::int64_t>(i % 3)}, x[i], y[i]});
    const auto one = train_classifiers(rows, 9, {.c = 1.0, .max_epochs = 200}, 1);
    const auto four = train_classifiers(rows, 9, {.c = 1.0, .max_epochs = 200}, 4);
    ASSERT_EQ(one.subclasses().size(), four.subclasses().size());
    for (std::size_t i = 0; i < one.subclasses().size(); ++i) {
        const auto* l = dynamic_cast<const LinearSvmClassifier*>(one.subclasses()[i].classifier.get());
        const auto* r = dynamic_cast<const LinearSvmClassifier*>(four.subclasses()[i].classifier.get());
        ASSERT_TRUE(l && r);
        EXPECT_EQ(l->data().weights, r->data().weights);
    }
    EXPECT_NE(subclass_seed(9, {0}), subclass_seed(9, {1}));
}

TEST(Classifier, RejectsDegenerateTrainingSets) {
    EXPECT_THROW(LinearSvmClassifier::train({}, {}, 1), UsageError);
    EXPECT_THROW(LinearSvmClassifier::train({{1}, {2}}, {3, 3}, 1), UsageError);
    EXPECT_THROW(LinearSvmClassifier::train({{1}, {2, 3}}, {1, 2}, 1), UsageError);
    EXPECT_THROW(LinearSvmClassifier::train({{1}, {2}}, {1, 2}, 1, {.c = 0.0}), UsageError);
}

TEST(Relations, CandidateOrder) {
    const auto c = coefficient_candidates(2);
    const std::vector<std::vector<int>> expected{{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
    EXPECT_EQ(c, expected);
    EXPECT_EQ(coefficient_candidates(3).size(), 26u);
}

// Two samples whose blocks are keyed by a-b for y=0 states and by a+b-P for
// y=1 states, P being the sample parameter (the bound of a and b).
struct SlackFixture {
    std::vector<Mdp> models;
    std::vector<Partition> partitions;
    std::vector<std::int64_t> parameters{6, 9};
    std::vector<std::int64_t> key;  ///< per sample state, concatenated
};

SlackFixture slack_fixture() {
    SlackFixture f;
    for (auto p : f.parameters) {
        const std::vector<VariableInfo> vars{{"a", 0, p, true, false}, {"b", 0, p, true, false}, {"y", 0, 1, false, false}};
        std::vector<std::vector<std::int64_t>> rows;
        std::vector<std::uint64_t> block_of;
        for (std::int64_t d : {-1, 0, 1}) {
            for (std::int64_t a = 2; a <= 4; ++a) {
                rows.push_back({a, a - d, 0});
                block_of.push_back(static_cast<std::uint64_t>(d + 1));
            }
            for (std::int64_t a = 1; a <= 2; ++a) {
                rows.push_back({a, d + p - a, 1});
                block_of.push_back(static_cast<std::uint64_t>(d + 1));
            }
        }
        f.models.push_back(valuation_model(vars, rows));
        f.partitions.push_back(Partition::from_assignment(block_of));
    }
    return f;
}

TEST(Relations, RecoversSlackDifference) {
    const auto f = slack_fixture();
    std::vector<SampleSuperblocks> local;
    std::vector<MiningSample> samples;
    for (std::size_t i = 0; i < f.models.size(); ++i) {
        local.push_back(compute_superblocks(f.models[i], f.partitions[i]));
        samples.push_back({&f.models[i], &f.partitions[i], f.parameters[i]});
    }
    const auto catalog = align_superblocks(local);
    ASSERT_EQ(catalog.size(), 2u);
    const auto patterns = mine_relations(catalog, samples);
    const RelationPattern* pattern = nullptr;
    for (const auto& p : patterns) pattern = p.superblock == 1 ? &p : pattern;
    ASSERT_NE(pattern, nullptr);
    ASSERT_FALSE(pattern->pattern_free) << pattern->reason;
    const auto* ref = pattern->find({0});
    const auto* other = pattern->find({1});
    ASSERT_TRUE(ref && other);
    EXPECT_EQ(ref->coefficients, (std::vector<int>{1, -1}));
    EXPECT_EQ(other->coefficients, (std::vector<int>{1, 1}));
    EXPECT_EQ(other->alpha, Rational(-1));
    EXPECT_EQ(other->beta, Rational(0));
    // Keys agree within blocks and differ between blocks, also at an unseen
    // parameter value.
    for (std::int64_t p : {6, 9, 40}) {
        EXPECT_EQ(ref->key(std::vector<std::int64_t>{5, 4}, p), other->key(std::vector<std::int64_t>{3, p - 2}, p));
        EXPECT_NE(ref->key(std::vector<std::int64_t>{5, 4}, p), ref->key(std::vector<std::int64_t>{5, 5}, p));
    }
}

TEST(Relations, SingleBlockSuperblockIsPatternFree) {
    const std::vector<VariableInfo> vars{{"a", 0, 9, true, false}, {"y", 0, 1, false, false}};
    const Mdp m = valuation_model(vars, {{1, 0}, {2, 1}, {3, 0}});
    const Partition p = Partition::from_blocks({{0, 1, 2}}, 3);
    const auto catalog = align_superblocks({compute_superblocks(m, p)});
    const auto patterns = mine_relations(catalog, {{&m, &p, 9}});
    ASSERT_FALSE(patterns.empty());
    for (const auto& pat : patterns) {
        if (pat.superblock == kSingular) continue;
        EXPECT_TRUE(pat.pattern_free);
        EXPECT_FALSE(pat.reason.empty());
    }
}

TEST(Relations, SplitGroupsByKeyAndKeepsFallbacksWhole) {
    const auto f = slack_fixture();
    RelationPattern pattern;
    pattern.superblock = 1;
    pattern.pattern_free = false;
    pattern.relations = {{{0}, {1, -1}, Rational(0), Rational(0)}, {{1}, {1, 1}, Rational(-1), Rational(0)}};
    const std::vector<ProjectionSet> projections{{}, {{0}, {1}}};
    const Mdp& m = f.models[1];
    SplitStats stats;
    const Partition keyed = split_superblocks(m, std::vector<SuperblockId>(m.n_states(), 1), projections, {pattern}, 9, &stats);
    EXPECT_TRUE(partition_equal(keyed, f.partitions[1]));
    EXPECT_EQ(stats.keyed_states, m.n_states());
    RelationPattern free = pattern;
    free.pattern_free = true;
    free.relations.clear();
    const Partition whole = split_superblocks(m, std::vector<SuperblockId>(m.n_states(), 1), projections, {free}, 9, &stats);
    EXPECT_EQ(whole.n_blocks(), 1u);
    const Partition singular =
        split_superblocks(m, std::vector<SuperblockId>(m.n_states(), kSingular), projections, {pattern}, 9);
    EXPECT_EQ(singular.n_blocks(), 1u);
}

// Superblock of the shared-coin protocol where both processes are about to
// write opposite coins: counter values x and y of its two projections sum to
// a constant in every block.
const ProjectionSet kCoinWriteSet{{1, 0, 1, 0}, {1, 1, 1, 1}};

std::vector<std::int64_t> coin_sums(const Mdp& m, const Partition& p) {
    std::vector<std::int64_t> sums;
    for (const auto& block : p.blocks()) {
        if (block.size() < 2 || projection_set(m, block) != kCoinWriteSet) continue;
        std::set<std::int64_t> xs, ys;
        for (auto s : block) (projection(m, s) == kCoinWriteSet[0] ? xs : ys).insert(m.valuation(s)[0]);
        EXPECT_EQ(xs.size(), 1u);
        EXPECT_EQ(ys.size(), 1u);
        sums.push_back(*xs.begin() + *ys.begin());
    }
    return sums;
}

TEST(CoinSuperblock, ProjectionSetAndSumPattern) {
    const prism::Program coin = program("coin2.nm");
    // Independent derivation of the constant from the reference bisimulation
    // of each sample.
    std::map<std::int64_t, std::int64_t> constant;
    for (std::int64_t k : {3, 4}) {
        const Mdp m = prism::explore(prism::instantiate(coin, {{"K", k}}));
        const auto sums = coin_sums(m, verify::coarsest_bisimulation(m, "finished"));
        ASSERT_GE(sums.size(), 2u) << "K=" << k;
        for (auto s : sums) EXPECT_EQ(s, sums.front());
        constant[k] = sums.front();
    }
    EXPECT_EQ(constant[3], 16);
    const Rational alpha(constant[4] - constant[3]);
    const Rational beta = Rational(constant[3]) - alpha * Rational(3);
    EXPECT_EQ(alpha, Rational(4));
    EXPECT_EQ(beta, Rational(4));

    const auto learned = learn(coin, {3, 4}, 5, options("finished"));
    const auto& model = learned.model;
    SuperblockId id = kSingular;
    for (SuperblockId g = 1; g < model.superblocks.size(); ++g) id = model.superblocks[g] == kCoinWriteSet ? g : id;
    ASSERT_NE(id, kSingular);
    // Several blocks of the K=3 sample fall into this superblock.
    EXPECT_GE(learned.catalog.blocks[0][id].size(), 2u);
    EXPECT_EQ(coin_sums(learned.samples[0].mdp, learned.samples[0].partition).size(),
              learned.catalog.blocks[0][id].size());

    const RelationPattern* pattern = nullptr;
    for (const auto& p : model.patterns) pattern = p.superblock == id ? &p : pattern;
    ASSERT_NE(pattern, nullptr);
    ASSERT_FALSE(pattern->pattern_free) << pattern->reason;
    const auto* x = pattern->find(kCoinWriteSet[0]);
    const auto* y = pattern->find(kCoinWriteSet[1]);
    ASSERT_TRUE(x && y);
    EXPECT_EQ(x->coefficients, std::vector<int>{1});
    EXPECT_EQ(y->coefficients, std::vector<int>{-1});
    EXPECT_EQ(y->alpha - x->alpha, alpha);
    EXPECT_EQ(y->beta - x->beta, beta);
    // x + y = 16 at K=3 puts (x, ...) and (16 - x, ...) under one key.
    EXPECT_EQ(x->key(std::vector<std::int64_t>{5}, 3), y->key(std::vector<std::int64_t>{11}, 3));
}

TEST(CoinSuperblock, CatalogInvariants) {
    const auto learned = learn(program("coin2.nm"), {3, 4}, 5, options("finished"));
    for (std::size_t i = 0; i < learned.samples.size(); ++i) {
        const auto& run = learned.samples[i];
        const auto& eta = learned.catalog.eta[i];
        ASSERT_EQ(eta.size(), run.mdp.n_states());
        std::size_t blocks = 0;
        for (const auto& per : learned.catalog.blocks[i]) blocks += per.size();
        EXPECT_EQ(blocks, run.partition.n_blocks());
        // States of one block share a superblock.
        for (const auto& block : run.partition.blocks()) {
            for (auto s : block) EXPECT_EQ(eta[s], eta[block.front()]);
        }
    }
    // Distinct superblocks have distinct projection sets.
    std::set<ProjectionSet> sets(learned.model.superblocks.begin() + 1, learned.model.superblocks.end());
    EXPECT_EQ(sets.size(), learned.model.superblocks.size() - 1);
    // Every mined pattern is constant within and separates the training blocks.
    for (const auto& pattern : learned.model.patterns) {
        if (pattern.pattern_free) continue;
        for (std::size_t i = 0; i < learned.samples.size(); ++i) {
            const auto& run = learned.samples[i];
            std::set<Rational> keys;
            for (auto b : learned.catalog.blocks[i][pattern.superblock]) {
                std::set<Rational> within;
                for (auto s : run.partition.block(b)) {
                    const auto* rel = pattern.find(projection(run.mdp, s));
                    ASSERT_NE(rel, nullptr);
                    within.insert(rel->key(parametric_values(run.mdp, s), run.parameter));
                }
                ASSERT_EQ(within.size(), 1u);
                keys.insert(*within.begin());
            }
            EXPECT_EQ(keys.size(), learned.catalog.blocks[i][pattern.superblock].size());
            EXPECT_GE(keys.size(), 2u);
        }
    }
}

TEST(Model, TextRoundTripIsByteIdentical) {
    const auto learned = learn(program("coin2.nm"), {2, 3}, 4, options("finished"));
    const std::string text = model_to_text(learned.model);
    const auto back = model_from_text(text);
    EXPECT_EQ(model_to_text(back), text);
    EXPECT_EQ(back.parameter, "K");
    EXPECT_EQ(back.superblocks, learned.model.superblocks);
    EXPECT_THROW(model_from_text("{}"), ParseError);
    EXPECT_THROW(model_from_text("not json"), ParseError);
    const Mdp other = prism::explore(prism::instantiate(program("ring.nm"), {{"K", 3}}));
    EXPECT_THROW(back.check_compatible(other), UsageError);
}

TEST(Pipeline, PreconditionErrors) {
    const auto coin = program("coin2.nm");
    EXPECT_THROW(learn(coin, {}, 5, options("finished")), UsageError);
    EXPECT_THROW(learn(coin, {3, 6}, 5, options("finished")), UsageError);
    EXPECT_THROW(learn(coin, {3, 3}, 5, options("finished")), UsageError);
    EXPECT_THROW(single_parameter(program("brp.nm")), UsageError);
    EXPECT_EQ(single_parameter(program("brp.nm", {{"N", 4}})), "MAX");
    EXPECT_THROW(learn(coin, {3}, 5, options("no_such_label")), UsageError);
}

TEST(Pipeline, SingleSampleWarnsAndFitsConstants) {
    const auto learned = learn(program("coin2.nm"), {3}, 5, options("finished"));
    ASSERT_FALSE(learned.warnings.empty());
    for (const auto& p : learned.model.patterns) {
        for (const auto& r : p.relations) EXPECT_EQ(r.alpha, Rational(0));
    }
}

// Target equal to a sample: seeding the sample from its own prediction gives
// back the sample's bisimulation.
void expect_self_consistent(const prism::Program& p, std::vector<std::int64_t> samples, const std::string& goal) {
    const auto learned = learn(p, samples, samples.back(), options(goal));
    const auto& run = learned.samples.back();
    const auto predicted = predict_initial_partition(learned.model, run.mdp, run.parameter, goal);
    EXPECT_EQ(prediction_accuracy(predicted.predicted, learned.catalog.eta.back()), 1.0);
    const auto refined = bisim::refine_fixpoint(run.mdp, predicted.initial);
    EXPECT_TRUE(partition_equal(refined.partition, run.partition));
}

TEST(Pipeline, SelfConsistencyOnWlan) { expect_self_consistent(program("wlan.nm", {{"N", 5}}), {3, 4}, "both_sent"); }

TEST(Pipeline, SelfConsistencyOnZeroconf) {
    expect_self_consistent(program("zeroconf.nm", {{"N", 900}}), {2, 3}, "configured");
}

TEST(Pipeline, TrivialBisimulationNeedsNoSplitting) {
    const auto ring = program("ring.nm");
    const Mdp target = prism::explore(prism::instantiate(ring, {{"K", 60}}));
    const auto init = approximate_initial_partition(ring, {3, 4}, 60, target, options("done"));
    EXPECT_LE(init.predicted.initial.n_blocks(), 3u);
    const auto refined = bisim::refine_fixpoint(target, init.predicted.initial);
    EXPECT_LE(refined.stats.effective_splitters, 1u);
    EXPECT_EQ(refined.partition.n_blocks(), 2u);
    EXPECT_TRUE(partition_equal(refined.partition, verify::coarsest_bisimulation(target, "done")));
    EXPECT_FALSE(init.timings.empty());
}

TEST(Pipeline, CoinEndToEndIsSoundAndDeterministic) {
    const auto coin = program("coin2.nm");
    const Mdp target = prism::explore(prism::instantiate(coin, {{"K", 5}}));
    const auto a = approximate_initial_partition(coin, {3, 4}, 5, target, options("finished"));
    auto threaded = options("finished");
    threaded.threads = 4;
    const auto b = approximate_initial_partition(coin, {3, 4}, 5, target, threaded);
    EXPECT_EQ(a.predicted.predicted, b.predicted.predicted);
    EXPECT_EQ(model_to_text(a.learned.model), model_to_text(b.learned.model));
    const auto refined = bisim::refine_fixpoint(target, a.predicted.initial);
    EXPECT_TRUE(verify::is_bisimulation(target, refined.partition, {"finished"}).ok);
    EXPECT_TRUE(finer_than(refined.partition, verify::coarsest_bisimulation(target, "finished")));
    EXPECT_TRUE(finer_than(a.predicted.initial, bisim::initial_partition(target, "finished")));
}

}  // namespace
}  // namespace mlbisim::mlinit
