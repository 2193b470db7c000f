#include "mlbisim/mlinit/pipeline.h"

#include <algorithm>
#include <set>

#include "mlbisim/core/errors.h"
#include "parallel.h"

namespace mlbisim::mlinit {

namespace {

using Clock = std::chrono::steady_clock;

// Runs one pipeline step, recording its wall-clock time and prefixing any
// error with the step name.
template <typename Fn>
auto run_step(const std::string& name, std::vector<StepTiming>& timings, Fn fn) {
    const auto start = Clock::now();
    const std::string tag = "[" + name + "] ";
    auto record = [&] { timings.push_back({name, std::chrono::duration<double>(Clock::now() - start).count()}); };
    try {
        auto result = fn();
        record();
        return result;
    } catch (const ParseError& e) {
        throw ParseError(tag + e.what());
    } catch (const ModelError& e) {
        throw ModelError(tag + e.what());
    } catch (const ResourceError& e) {
        throw ResourceError(e.kind(), tag + e.what());
    } catch (const UsageError& e) {
        throw UsageError(tag + e.what());
    } catch (const IoError& e) {
        throw IoError(tag + e.what());
    } catch (const VerificationError& e) {
        throw VerificationError(tag + e.what());
    }
}

}  // namespace

std::string single_parameter(const prism::Program& program) {
    auto params = program.parameters();
    if (params.size() != 1) {
        std::string names;
        for (const auto& p : params) names += (names.empty() ? "" : ", ") + p;
        throw UsageError("the learning pipeline needs exactly one free parameter, found " +
                         std::to_string(params.size()) + (names.empty() ? "" : " (" + names + ")"));
    }
    return params.front();
}

LearnResult learn(const prism::Program& program, const std::vector<std::int64_t>& sample_parameters,
                  std::optional<std::int64_t> target, const PipelineOptions& options) {
    const std::string parameter = single_parameter(program);
    if (sample_parameters.empty()) throw UsageError("at least one sample parameter value is required");
    if (std::set<std::int64_t>(sample_parameters.begin(), sample_parameters.end()).size() != sample_parameters.size()) {
        throw UsageError("sample parameter values must be distinct");
    }
    if (target) {
        for (auto p : sample_parameters) {
            if (p > *target) {
                throw UsageError("sample value " + std::to_string(p) + " exceeds the target value " +
                                 std::to_string(*target));
            }
        }
    }

    LearnResult out;
    if (sample_parameters.size() == 1) {
        out.warnings.push_back("only one sample: relation offsets are fitted as constants");
    }

    out.samples = run_step("samples", out.timings, [&] {
        std::vector<SampleRun> runs(sample_parameters.size());
        detail::parallel_for(runs.size(), options.threads, [&](std::size_t i) {
            prism::ExploreOptions explore;
            explore.max_states = options.max_states;
            explore.max_memory_bytes = options.max_memory_bytes;
            explore.deadline = options.deadline;
            runs[i].parameter = sample_parameters[i];
            runs[i].mdp = prism::explore(prism::instantiate(program, {{parameter, sample_parameters[i]}}), explore);
            bisim::RefineOptions refine;
            refine.deadline = options.deadline;
            auto result = bisim::refine_fixpoint(runs[i].mdp, bisim::initial_partition(runs[i].mdp, options.goal), refine);
            runs[i].partition = std::move(result.partition);
            runs[i].stats = result.stats;
        });
        return runs;
    });

    out.catalog = run_step("superblocks", out.timings, [&] {
        std::vector<SampleSuperblocks> local;
        for (const auto& run : out.samples) local.push_back(compute_superblocks(run.mdp, run.partition));
        return align_superblocks(local);
    });
    if (out.catalog.unmatched > 0) {
        out.warnings.push_back(std::to_string(out.catalog.unmatched) +
                               " superblock(s) not present in every sample were folded into the singular superblock");
    }

    const Mdp& first = out.samples.front().mdp;
    out.model.parameter = parameter;
    for (const auto& v : first.variables()) {
        out.model.variables.push_back(v.name);
        out.model.parametric.push_back(v.parametric);
    }
    if (std::none_of(out.model.parametric.begin(), out.model.parametric.end(), [](bool b) { return b; })) {
        out.warnings.push_back("no variable range depends on parameter " + parameter);
    }
    out.model.sample_parameters = sample_parameters;
    out.model.seed = options.seed;
    out.model.svm = options.svm;
    out.model.superblocks = out.catalog.projections;

    out.model.classifier = run_step("train", out.timings, [&] {
        std::vector<TrainingRow> rows;
        for (std::size_t i = 0; i < out.samples.size(); ++i) {
            const Mdp& m = out.samples[i].mdp;
            for (StateId s = 0; s < m.n_states(); ++s) {
                rows.push_back(TrainingRow{projection(m, s), features(m, s), out.catalog.eta[i][s]});
            }
        }
        return train_classifiers(rows, options.seed, options.svm, options.threads);
    });

    out.model.patterns = run_step("mine", out.timings, [&] {
        std::vector<MiningSample> mining;
        for (const auto& run : out.samples) mining.push_back(MiningSample{&run.mdp, &run.partition, run.parameter});
        return mine_relations(out.catalog, mining);
    });
    return out;
}

PredictResult predict_initial_partition(const SuperblockModel& model, const Mdp& target, std::int64_t parameter,
                                        const std::string& goal) {
    model.check_compatible(target);
    PredictResult out;
    out.predicted = run_step("predict", out.timings, [&] {
        std::vector<SuperblockId> predicted(target.n_states());
        for (StateId s = 0; s < target.n_states(); ++s) {
            predicted[s] = model.classifier.predict(projection(target, s), features(target, s));
        }
        return predicted;
    });
    out.approximate = run_step("split", out.timings, [&] {
        return split_superblocks(target, out.predicted, model.superblocks, model.patterns, parameter, &out.split);
    });
    out.initial = Partition::meet(out.approximate, bisim::initial_partition(target, goal));
    return out;
}

InitResult approximate_initial_partition(const prism::Program& program,
                                         const std::vector<std::int64_t>& sample_parameters, std::int64_t target,
                                         const Mdp& target_model, const PipelineOptions& options) {
    InitResult out;
    out.learned = learn(program, sample_parameters, target, options);
    out.predicted = predict_initial_partition(out.learned.model, target_model, target, options.goal);
    out.timings = out.learned.timings;
    out.timings.insert(out.timings.end(), out.predicted.timings.begin(), out.predicted.timings.end());
    for (const auto& t : out.timings) out.seconds += t.seconds;
    return out;
}

InitResult approximate_initial_partition(const prism::Program& program,
                                         const std::vector<std::int64_t>& sample_parameters, std::int64_t target,
                                         const PipelineOptions& options) {
    const std::string parameter = single_parameter(program);
    prism::ExploreOptions explore;
    explore.max_states = options.max_states;
    explore.max_memory_bytes = options.max_memory_bytes;
    explore.deadline = options.deadline;
    Mdp target_model = prism::explore(prism::instantiate(program, {{parameter, target}}), explore);
    return approximate_initial_partition(program, sample_parameters, target, target_model, options);
}

double prediction_accuracy(const std::vector<SuperblockId>& predicted, const std::vector<SuperblockId>& truth) {
    if (predicted.size() != truth.size()) throw UsageError("prediction and truth differ in length");
    if (predicted.empty()) return 1.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == truth[i];
    return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

}  // namespace mlbisim::mlinit
