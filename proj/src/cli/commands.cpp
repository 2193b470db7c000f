#include "mlbisim/cli/commands.h"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "mlbisim/bisim/partition_io.h"
#include "mlbisim/bisim/quotient.h"
#include "mlbisim/cli/bench.h"
#include "mlbisim/cli/runs.h"
#include "mlbisim/core/errors.h"
#include "mlbisim/prism/explicit_io.h"
#include "mlbisim/verify/oracle.h"

namespace mlbisim::cli {

namespace {

struct LimitFlags {
    std::size_t max_states = 20'000'000;
    double timeout = 0.0;
    std::size_t max_memory = 0;

    void add(CLI::App* app) {
        app->add_option("--max-states", max_states, "abort exploration beyond this many states")
            ->capture_default_str();
        app->add_option("--timeout", timeout, "wall-clock limit in seconds (0: none)")->check(CLI::NonNegativeNumber);
        app->add_option("--max-memory", max_memory, "estimated model memory limit in MiB (0: none)");
    }

    Limits limits() const {
        Limits l;
        l.max_states = max_states;
        if (timeout > 0) l.timeout_seconds = timeout;
        if (max_memory > 0) l.max_memory_mb = max_memory;
        return l;
    }
};

Bindings parse_bindings(const std::vector<std::string>& items) {
    Bindings out;
    for (const auto& item : items) {
        auto [name, value] = parse_binding(item);
        if (!out.emplace(name, value).second) throw UsageError("constant " + name + " bound twice");
    }
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("error writing " + path.string());
}

void emit_report(const RunReport& report, const std::string& format, const std::string& report_path,
                 std::ostream& out) {
    out << (format == "json" ? report_json(report) : report_text(report));
    if (!report_path.empty()) write_file(report_path, report_json(report));
}

int verdict(const RunReport& r) {
    if (!r.is_bisimulation) return kExitVerification;
    if (r.finer_than_oracle && !*r.finer_than_oracle) return kExitVerification;
    return kExitOk;
}

std::string model_name(const std::string& path, const std::string& name) {
    if (!name.empty()) return name;
    if (is_program_path(path)) return std::filesystem::path(path).stem().string();
    return explicit_basename(path).filename().string();
}

int cmd_explore(const std::string& path, const std::vector<std::string>& consts, const std::string& output,
                bool decimal, const LimitFlags& limits, std::ostream& out) {
    auto model = load_model(path, parse_bindings(consts), limits.limits());
    const auto& m = model.mdp;
    prism::export_explicit(m, output, decimal ? prism::ProbFormat::decimal : prism::ProbFormat::rational);
    out << "states " << m.n_states() << " choices " << m.n_choices() << " transitions " << m.n_transitions()
        << " deadlocks " << m.n_deadlocks() << "\n";
    return kExitOk;
}

struct BisimFlags {
    std::string path;
    std::vector<std::string> consts;
    std::string goal;
    std::string name;
    std::string partition;
    std::string report;
    std::string format = "text";
    bool check = false;
    std::size_t oracle_limit = verify::kDefaultOracleLimit;
    LimitFlags limits;
};

int cmd_bisim(const BisimFlags& f, std::ostream& out) {
    const auto bindings = parse_bindings(f.consts);
    auto model = load_model(f.path, bindings, f.limits.limits());
    StandardSettings s;
    s.model_name = model_name(f.path, f.name);
    s.bindings = bindings;
    s.goal = f.goal;
    s.limits = f.limits.limits();
    s.check = f.check;
    s.oracle_limit = f.oracle_limit;
    s.explore_seconds = model.explore_seconds;
    auto run = run_standard(model.mdp, s);
    if (!f.partition.empty()) bisim::save_partition(run.partition, f.partition);
    emit_report(run.report, f.format, f.report, out);
    return verdict(run.report);
}

struct MlFlags {
    BisimFlags common;
    std::vector<std::string> samples;
    std::int64_t target = 0;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string model_out;
    std::string model_in;
    std::string eta_dir;
    std::string seed_partition;
};

std::vector<std::int64_t> parse_samples(const std::vector<std::string>& texts) {
    std::vector<std::int64_t> out;
    for (const auto& t : texts) {
        std::int64_t v = 0;
        const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (t.empty() || ec != std::errc() || end != t.data() + t.size()) {
            throw UsageError("--samples: '" + t + "' is not an integer");
        }
        out.push_back(v);
    }
    return out;
}

int cmd_bisim_ml(const MlFlags& f, std::ostream& out) {
    const auto& c = f.common;
    if (!is_program_path(c.path)) throw UsageError("bisim-ml needs a program source (.nm, .prism or .pm)");
    MlSettings s;
    s.bindings = parse_bindings(c.consts);
    const auto program = load_program(c.path, s.bindings);
    s.model_name = model_name(c.path, c.name);
    s.goal = c.goal;
    s.samples = parse_samples(f.samples);
    s.target = f.target;
    s.seed = f.seed;
    s.threads = std::max(1u, f.threads);
    s.limits = c.limits.limits();
    s.check = c.check;
    s.oracle_limit = c.oracle_limit;
    if (!f.model_in.empty()) {
        if (!f.samples.empty()) throw UsageError("--samples and --model-in cannot be combined");
        s.model = mlinit::load_model(f.model_in);
    } else if (f.samples.empty()) {
        throw UsageError("--samples needs at least one parameter value");
    }
    auto run = run_ml(program, s);
    if (!c.partition.empty()) bisim::save_partition(run.partition, c.partition);
    if (!f.seed_partition.empty()) bisim::save_partition(run.seed, f.seed_partition);
    if (!f.model_out.empty()) mlinit::save_model(run.model, f.model_out);
    if (!f.eta_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(f.eta_dir, ec);
        if (ec) throw IoError("cannot create " + f.eta_dir + ": " + ec.message());
        for (std::size_t i = 0; i < run.eta.size(); ++i) {
            mlinit::save_eta(run.eta[i], std::filesystem::path(f.eta_dir) /
                                             ("eta_" + std::to_string(run.eta_parameters[i]) + ".txt"));
        }
    }
    emit_report(run.report, c.format, c.report, out);
    return verdict(run.report);
}

int cmd_bench(const std::string& config_path, const std::string& format, const std::string& output,
              unsigned workers, std::ostream& out) {
    auto config = load_bench_config(config_path);
    if (workers > 0) config.workers = workers;
    const auto rows = run_bench(config);
    const std::string text = format == "csv" ? bench_csv(rows) : format == "json" ? bench_json(rows) : bench_text(rows);
    if (output.empty()) {
        out << text;
    } else {
        write_file(output, text);
    }
    return kExitOk;
}

int cmd_verify(const std::string& path, const std::vector<std::string>& consts, const std::string& partition_path,
               const std::string& goal, double epsilon, const LimitFlags& limits, std::ostream& out) {
    auto model = load_model(path, parse_bindings(consts), limits.limits());
    const Mdp& m = model.mdp;
    const Partition p = bisim::load_partition(partition_path);
    if (p.n_states() != m.n_states()) {
        throw UsageError("partition covers " + std::to_string(p.n_states()) + " states, model has " +
                         std::to_string(m.n_states()));
    }
    std::vector<std::string> labels;
    if (goal.empty()) {
        labels = m.label_names();
    } else {
        m.require_label(goal);
        labels = {goal};
    }
    auto check = verify::is_bisimulation(m, p, labels);
    if (!check.ok) {
        out << "FAILED: partition is not a bisimulation\n";
        if (check.witness) out << "witness: " << check.witness->describe(m) << "\n";
        return kExitVerification;
    }
    out << "OK: " << p.n_blocks() << " blocks over " << m.n_states() << " states form a bisimulation\n";
    if (goal.empty()) return kExitOk;

    verify::ReachabilityOptions options;
    options.epsilon = epsilon;
    bisim::QuotientOptions q;
    q.verified = true;
    q.labels = labels;
    const auto quotient = bisim::quotient(m, p, q);
    const auto original = verify::max_reachability(m, goal, options);
    const auto reduced = verify::max_reachability(quotient.mdp, goal, options);
    const double deviation = verify::max_quotient_deviation(original, reduced, p);
    const double tolerance = 2 * epsilon;
    out << "max reachability of " << goal << ": initial state " << original[m.initial()] << ", quotient deviation "
        << deviation << " (tolerance " << tolerance << ")\n";
    if (deviation > tolerance) {
        out << "FAILED: quotient does not preserve reachability\n";
        return kExitVerification;
    }
    return kExitOk;
}

int exit_code_for(std::exception_ptr error, std::ostream& err) {
    try {
        std::rethrow_exception(error);
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const ResourceError& e) {
        err << "resource limit: " << e.what() << "\n";
        return kExitResource;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const VerificationError& e) {
        err << "verification failed: " << e.what() << "\n";
        return kExitVerification;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const ModelError& e) {
        err << "model error: " << e.what() << "\n";
        return kExitFailure;
    } catch (const std::bad_alloc&) {
        err << "resource limit: out of memory\n";
        return kExitResource;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

void add_common(CLI::App* app, BisimFlags& f) {
    app->add_option("model", f.path, "program source (.nm) or explicit .sta/.tra/.lab basename")->required();
    app->add_option("-c,--const", f.consts, "bind a constant, NAME=VALUE (repeatable)");
    app->add_option("-g,--goal-label", f.goal, "label defining the goal set G")->required();
    app->add_option("--name", f.name, "model name used in reports");
    app->add_option("--emit-partition", f.partition, "write the final partition here");
    app->add_option("--report", f.report, "write the JSON run report here");
    app->add_option("--format", f.format, "stdout format")->check(CLI::IsMember({"text", "json"}));
    app->add_flag("--check", f.check, "compare against a reference partition");
    app->add_option("--oracle-limit", f.oracle_limit, "largest model for the brute-force reference")
        ->capture_default_str();
    f.limits.add(app);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Probabilistic bisimulation minimisation of MDPs with learned initial partitions", "mlbisim"};
    app.require_subcommand(1);

    std::string explore_path, explore_out;
    std::vector<std::string> explore_consts;
    bool explore_decimal = false;
    LimitFlags explore_limits;
    auto* explore = app.add_subcommand("explore", "explore a program and write .sta/.tra/.lab files");
    explore->add_option("model", explore_path, "program source")->required();
    explore->add_option("-c,--const", explore_consts, "bind a constant, NAME=VALUE (repeatable)");
    explore->add_option("-o,--output", explore_out, "output basename")->required();
    explore->add_flag("--decimal", explore_decimal, "write probabilities as decimals");
    explore_limits.add(explore);

    BisimFlags bisim_flags;
    auto* bisim = app.add_subcommand("bisim", "minimise from {G, S\\G}");
    add_common(bisim, bisim_flags);

    MlFlags ml_flags;
    auto* bisim_ml = app.add_subcommand("bisim-ml", "minimise from a partition predicted by models of small instances");
    add_common(bisim_ml, ml_flags.common);
    bisim_ml->add_option("--samples", ml_flags.samples, "sample parameter values, comma separated")->delimiter(',');
    bisim_ml->add_option("--target", ml_flags.target, "parameter value of the model to minimise")->required();
    bisim_ml->add_option("--seed", ml_flags.seed, "training seed")->capture_default_str();
    bisim_ml->add_option("--threads", ml_flags.threads, "worker threads for samples and training")
        ->capture_default_str();
    bisim_ml->add_option("--emit-model", ml_flags.model_out, "write the trained model here");
    bisim_ml->add_option("--model-in", ml_flags.model_in, "use a trained model instead of learning");
    bisim_ml->add_option("--eta-dir", ml_flags.eta_dir, "write one superblock mapping per sample here");
    bisim_ml->add_option("--emit-seed", ml_flags.seed_partition, "write the predicted initial partition here");

    std::string bench_config, bench_format = "text", bench_output;
    unsigned bench_workers = 0;
    auto* bench = app.add_subcommand("bench", "run a benchmark matrix described by a YAML file");
    bench->add_option("config", bench_config, "YAML configuration")->required();
    bench->add_option("--format", bench_format, "table format")->check(CLI::IsMember({"csv", "text", "json"}));
    bench->add_option("-o,--output", bench_output, "write the table here instead of stdout");
    bench->add_option("--workers", bench_workers, "parallel rows (overrides the config)");

    std::string verify_path, verify_partition, verify_goal;
    std::vector<std::string> verify_consts;
    double verify_epsilon = 1e-10;
    LimitFlags verify_limits;
    auto* verify_cmd = app.add_subcommand("verify", "check that a partition is a bisimulation and preserves reachability");
    verify_cmd->add_option("model", verify_path, "program source or explicit basename")->required();
    verify_cmd->add_option("-p,--partition", verify_partition, "partition file")->required();
    verify_cmd->add_option("-c,--const", verify_consts, "bind a constant, NAME=VALUE (repeatable)");
    verify_cmd->add_option("-g,--goal-label", verify_goal, "respect only this label and check its reachability");
    verify_cmd->add_option("--epsilon", verify_epsilon, "value iteration threshold")->capture_default_str();
    verify_limits.add(verify_cmd);

    if (args.empty()) {
        err << app.help();
        return kExitUsage;
    }
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*explore) return cmd_explore(explore_path, explore_consts, explore_out, explore_decimal, explore_limits, out);
        if (*bisim) return cmd_bisim(bisim_flags, out);
        if (*bisim_ml) return cmd_bisim_ml(ml_flags, out);
        if (*bench) return cmd_bench(bench_config, bench_format, bench_output, bench_workers, out);
        if (*verify_cmd) {
            return cmd_verify(verify_path, verify_consts, verify_partition, verify_goal, verify_epsilon, verify_limits,
                              out);
        }
    } catch (...) {
        return exit_code_for(std::current_exception(), err);
    }
    return kExitUsage;
}

}  // namespace mlbisim::cli
