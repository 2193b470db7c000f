#include "mlbisim/cli/runs.h"

#include <algorithm>

#include "mlbisim/bisim/refine.h"
#include "mlbisim/core/errors.h"
#include "mlbisim/mlinit/pipeline.h"
#include "mlbisim/prism/explicit_io.h"
#include "mlbisim/prism/explorer.h"
#include "mlbisim/verify/oracle.h"

namespace mlbisim::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

void fill_sizes(RunReport& r, const Mdp& m) {
    r.n_states = m.n_states();
    r.n_choices = m.n_choices();
    r.n_transitions = m.n_transitions();
    r.peak_states = std::max(r.peak_states, m.n_states());
}

void fill_check(RunReport& r, const Mdp& m, const Partition& p, const std::string& goal) {
    auto check = verify::is_bisimulation(m, p, {goal});
    r.is_bisimulation = check.ok;
    if (check.witness) r.witness = check.witness->describe(m);
}

void fill_reference(RunReport& r, const Partition& p, const Partition& reference, const std::string& kind) {
    r.oracle = kind;
    r.finer_than_oracle = finer_than(p, reference);
    r.equal_to_oracle = partition_equal(p, reference);
}

}  // namespace

std::optional<Clock::time_point> Limits::deadline_from(Clock::time_point start) const {
    if (!timeout_seconds) return std::nullopt;
    return start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(*timeout_seconds));
}

std::optional<std::size_t> Limits::max_memory_bytes() const {
    if (!max_memory_mb) return std::nullopt;
    return *max_memory_mb * std::size_t{1024} * 1024;
}

std::pair<std::string, std::int64_t> parse_binding(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) {
        throw UsageError("expected NAME=VALUE, got '" + text + "'");
    }
    const std::string value = text.substr(eq + 1);
    std::size_t used = 0;
    std::int64_t v = 0;
    try {
        v = std::stoll(value, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != value.size()) throw UsageError("binding value must be an integer: '" + text + "'");
    return {text.substr(0, eq), v};
}

bool is_program_path(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    return ext == ".nm" || ext == ".prism" || ext == ".pm";
}

std::filesystem::path explicit_basename(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".sta" || ext == ".tra" || ext == ".lab") {
        auto base = path;
        return base.replace_extension();
    }
    return path;
}

prism::Program load_program(const std::filesystem::path& path, const Bindings& bindings) {
    auto program = prism::parse_file(path.string());
    return bindings.empty() ? program : prism::bind(program, bindings);
}

LoadedModel load_model(const std::filesystem::path& path, const Bindings& bindings, const Limits& limits) {
    LoadedModel out;
    const auto start = Clock::now();
    if (is_program_path(path)) {
        auto program = load_program(path, bindings);
        auto free = program.parameters();
        if (!free.empty()) {
            std::string names;
            for (const auto& p : free) names += (names.empty() ? "" : ", ") + p;
            throw UsageError("unbound constants: " + names + " (use --const NAME=VALUE)");
        }
        prism::ExploreOptions explore;
        explore.max_states = limits.max_states;
        explore.max_memory_bytes = limits.max_memory_bytes();
        explore.deadline = limits.deadline_from(start);
        out.mdp = prism::explore(prism::instantiate(program, {}), explore);
    } else {
        if (!bindings.empty()) throw UsageError("--const applies to program sources only");
        out.mdp = prism::import_explicit(explicit_basename(path));
    }
    out.explore_seconds = seconds_since(start);
    return out;
}

LoadedModel explore_instance(const prism::Program& program, const std::string& parameter, std::int64_t value,
                             const Limits& limits) {
    LoadedModel out;
    const auto start = Clock::now();
    prism::ExploreOptions explore;
    explore.max_states = limits.max_states;
    explore.max_memory_bytes = limits.max_memory_bytes();
    explore.deadline = limits.deadline_from(start);
    out.mdp = prism::explore(prism::instantiate(program, {{parameter, value}}), explore);
    out.explore_seconds = seconds_since(start);
    return out;
}

Partition reference_partition(const Mdp& m, const std::string& goal, std::size_t oracle_limit, std::string& kind,
                              const std::optional<Clock::time_point>& deadline) {
    if (m.n_states() <= oracle_limit) {
        kind = "brute-force";
        return verify::coarsest_bisimulation(m, goal, oracle_limit);
    }
    kind = "standard-refinement";
    bisim::RefineOptions options;
    options.deadline = deadline;
    return bisim::refine_fixpoint(m, bisim::initial_partition(m, goal), options).partition;
}

StandardRun run_standard(const Mdp& m, const StandardSettings& settings) {
    StandardRun out;
    RunReport& r = out.report;
    r.model = settings.model_name;
    r.bindings = settings.bindings;
    r.method = "standard";
    r.explore_time = settings.explore_seconds;
    fill_sizes(r, m);

    const auto start = Clock::now();
    const auto deadline = settings.limits.deadline_from(start);
    Partition init = bisim::initial_partition(m, settings.goal);
    r.init_partition_time = seconds_since(start);
    bisim::RefineOptions options;
    options.deadline = deadline;
    auto result = bisim::refine_fixpoint(m, init, options);
    r.total_time = seconds_since(start);

    out.partition = std::move(result.partition);
    r.refine = result.stats;
    r.initial_blocks = result.stats.initial_blocks;
    r.final_blocks = result.stats.final_blocks;
    r.iterations = result.stats.iterations();
    fill_check(r, m, out.partition, settings.goal);
    if (settings.check) {
        std::string kind;
        auto reference = reference_partition(m, settings.goal, settings.oracle_limit, kind, deadline);
        fill_reference(r, out.partition, reference, kind);
    }
    return out;
}

MlRun run_ml(const prism::Program& program, const MlSettings& settings, const Mdp* target_model) {
    const auto start = Clock::now();
    const auto deadline = settings.limits.deadline_from(start);
    const std::string parameter = mlinit::single_parameter(program);

    MlRun out;
    RunReport& r = out.report;
    r.model = settings.model_name;
    r.bindings = settings.bindings;
    r.bindings[parameter] = settings.target;
    r.method = "ml";
    r.seed = settings.seed;

    mlinit::PipelineOptions options;
    options.goal = settings.goal;
    options.seed = settings.seed;
    options.max_states = settings.limits.max_states;
    options.max_memory_bytes = settings.limits.max_memory_bytes();
    options.deadline = deadline;
    options.threads = settings.threads;

    std::optional<mlinit::LearnResult> learned;
    if (settings.model) {
        out.model = *settings.model;
        if (out.model.parameter != parameter) {
            throw UsageError("model was trained for parameter " + out.model.parameter + ", program has " + parameter);
        }
        r.model_loaded = true;
        r.samples = out.model.sample_parameters;
    } else {
        if (settings.samples.empty()) throw UsageError("at least one sample parameter value is required");
        learned = mlinit::learn(program, settings.samples, settings.target, options);
        out.model = learned->model;
        r.samples = settings.samples;
        r.steps = learned->timings;
        r.warnings = learned->warnings;
        for (std::size_t i = 0; i < learned->samples.size(); ++i) {
            const auto& run = learned->samples[i];
            r.training_states += run.mdp.n_states();
            r.peak_states = std::max(r.peak_states, run.mdp.n_states());
            out.eta_parameters.push_back(run.parameter);
            out.eta.push_back(learned->catalog.eta[i]);
        }
    }
    r.superblocks = out.model.superblocks.size();
    r.subclasses = out.model.classifier.subclasses().size();
    for (const auto& sub : out.model.classifier.subclasses()) r.trained_subclasses += sub.classifier->kind() != "constant";
    for (const auto& p : out.model.patterns) r.pattern_free += p.pattern_free;

    std::optional<std::size_t> same_sample;
    if (learned) {
        for (std::size_t i = 0; i < learned->samples.size(); ++i) {
            if (learned->samples[i].parameter == settings.target) same_sample = i;
        }
    }
    Mdp explored;
    const Mdp* target = target_model;
    if (!target && same_sample) {
        target = &learned->samples[*same_sample].mdp;
        r.self_consistency = true;
    }
    if (!target) {
        const auto explore_start = Clock::now();
        prism::ExploreOptions explore;
        explore.max_states = settings.limits.max_states;
        explore.max_memory_bytes = settings.limits.max_memory_bytes();
        explore.deadline = deadline;
        explored = prism::explore(prism::instantiate(program, {{parameter, settings.target}}), explore);
        r.explore_time = seconds_since(explore_start);
        target = &explored;
    }
    fill_sizes(r, *target);

    auto predicted = mlinit::predict_initial_partition(out.model, *target, settings.target, settings.goal);
    r.steps.insert(r.steps.end(), predicted.timings.begin(), predicted.timings.end());
    for (const auto& s : r.steps) r.init_partition_time += s.seconds;
    r.split = predicted.split;

    const auto refine_start = Clock::now();
    bisim::RefineOptions refine;
    refine.deadline = deadline;
    auto result = bisim::refine_fixpoint(*target, predicted.initial, refine);
    r.total_time = r.init_partition_time + seconds_since(refine_start);

    out.seed = std::move(predicted.initial);
    out.partition = std::move(result.partition);
    r.refine = result.stats;
    r.initial_blocks = result.stats.initial_blocks;
    r.final_blocks = result.stats.final_blocks;
    r.iterations = result.stats.iterations();
    fill_check(r, *target, out.partition, settings.goal);

    if (r.self_consistency) {
        const auto& sample = learned->samples[*same_sample];
        fill_reference(r, out.partition, sample.partition, "sample");
        r.accuracy = mlinit::prediction_accuracy(predicted.predicted, learned->catalog.eta[*same_sample]);
    } else if (settings.check) {
        std::string kind;
        auto reference = reference_partition(*target, settings.goal, settings.oracle_limit, kind, deadline);
        fill_reference(r, out.partition, reference, kind);
        mlinit::SuperblockCatalog catalog;
        if (learned) {
            catalog = learned->catalog;
        } else {
            catalog.projections = out.model.superblocks;
        }
        r.accuracy =
            mlinit::prediction_accuracy(predicted.predicted, mlinit::true_superblocks(*target, reference, catalog));
    }
    return out;
}

}  // namespace mlbisim::cli
