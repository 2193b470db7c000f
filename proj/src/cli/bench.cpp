#include "mlbisim/cli/bench.h"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <new>
#include <sstream>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "../mlinit/parallel.h"
#include "mlbisim/core/errors.h"
#include "mlbisim/mlinit/pipeline.h"

namespace mlbisim::cli {

namespace {

template <typename T>
T scalar(const YAML::Node& node, const std::string& key, T fallback) {
    const auto child = node[key];
    if (!child) return fallback;
    return child.as<T>();
}

std::vector<std::int64_t> integer_list(const YAML::Node& node, const std::string& key) {
    const auto child = node[key];
    if (!child) return {};
    if (child.IsScalar()) return {child.as<std::int64_t>()};
    if (!child.IsSequence()) throw ParseError("bench config: '" + key + "' must be a list of integers");
    std::vector<std::int64_t> out;
    for (const auto& v : child) out.push_back(v.as<std::int64_t>());
    return out;
}

BenchOutcome outcome_of(std::exception_ptr error) {
    BenchOutcome out;
    try {
        std::rethrow_exception(error);
    } catch (const ResourceError& e) {
        out.status = e.kind() == ResourceError::Kind::time ? BenchOutcome::Status::timeout
                     : e.kind() == ResourceError::Kind::iterations ? BenchOutcome::Status::error
                                                                   : BenchOutcome::Status::killed;
        out.message = e.what();
    } catch (const std::bad_alloc&) {
        out.status = BenchOutcome::Status::killed;
        out.message = "out of memory";
    } catch (const std::exception& e) {
        out.message = e.what();
    }
    return out;
}

template <typename Fn>
BenchOutcome attempt(Fn fn) {
    try {
        BenchOutcome out;
        out.report = fn();
        out.status = BenchOutcome::Status::ok;
        return out;
    } catch (...) {
        return outcome_of(std::current_exception());
    }
}

std::string thousands(const std::optional<std::size_t>& n) {
    if (!n) return "-";
    std::ostringstream os;
    os << std::fixed << std::setprecision(3) << static_cast<double>(*n) / 1000.0;
    return os.str();
}

std::string seconds(double s) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(3) << s;
    return os.str();
}

std::string count(const BenchOutcome& o, std::size_t RunReport::*field) {
    return o.report ? std::to_string((*o.report).*field) : "-";
}

const std::vector<std::string> kHeader{"model",         "parameter",           "states_k",        "actions_k",
                                       "transitions_k", "standard_total",      "ml_init_part",    "ml_total",
                                       "standard_iterations", "ml_iterations", "standard_blocks", "ml_blocks"};

std::vector<std::string> cells(const BenchRow& row) {
    return {row.model,
            row.parameter,
            thousands(row.n_states),
            thousands(row.n_choices),
            thousands(row.n_transitions),
            row.standard.token(),
            row.ml.report ? seconds(row.ml.report->init_partition_time) : row.ml.token(),
            row.ml.token(),
            count(row.standard, &RunReport::iterations),
            count(row.ml, &RunReport::iterations),
            count(row.standard, &RunReport::final_blocks),
            count(row.ml, &RunReport::final_blocks)};
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

std::string status_name(BenchOutcome::Status s) {
    switch (s) {
        case BenchOutcome::Status::ok: return "ok";
        case BenchOutcome::Status::timeout: return "timeout";
        case BenchOutcome::Status::killed: return "killed";
        case BenchOutcome::Status::error: return "error";
    }
    return "error";
}

}  // namespace

std::string BenchOutcome::token() const {
    if (status == Status::ok && report) return seconds(report->total_time);
    return status_name(status);
}

BenchConfig parse_bench_config(const std::string& text, const std::filesystem::path& base_dir) {
    BenchConfig config;
    try {
        const YAML::Node root = YAML::Load(text);
        if (!root.IsMap()) throw ParseError("bench config: expected a mapping at top level");
        config.limits.max_states = scalar<std::size_t>(root, "max_states", config.limits.max_states);
        if (root["timeout"]) config.limits.timeout_seconds = root["timeout"].as<double>();
        if (root["max_memory_mb"]) config.limits.max_memory_mb = root["max_memory_mb"].as<std::size_t>();
        config.workers = std::max(1u, scalar<unsigned>(root, "workers", config.workers));
        config.threads = std::max(1u, scalar<unsigned>(root, "threads", config.threads));
        config.seed = scalar<std::uint64_t>(root, "seed", config.seed);
        config.check = scalar<bool>(root, "check", config.check);
        const auto models = root["models"];
        if (!models || !models.IsSequence() || models.size() == 0) {
            throw ParseError("bench config: 'models' must be a non-empty list");
        }
        for (const auto& node : models) {
            BenchModel m;
            if (!node["program"]) throw ParseError("bench config: model without 'program'", node.Mark().line + 1);
            if (!node["goal"]) throw ParseError("bench config: model without 'goal'", node.Mark().line + 1);
            m.program = node["program"].as<std::string>();
            if (m.program.is_relative() && !base_dir.empty()) m.program = base_dir / m.program;
            m.name = scalar<std::string>(node, "name", m.program.stem().string());
            m.goal = node["goal"].as<std::string>();
            if (const auto constants = node["const"]) {
                if (!constants.IsMap()) throw ParseError("bench config: 'const' must be a mapping", constants.Mark().line + 1);
                for (const auto& kv : constants) m.constants[kv.first.as<std::string>()] = kv.second.as<std::int64_t>();
            }
            m.samples = integer_list(node, "samples");
            m.targets = integer_list(node, "targets");
            if (m.samples.empty() || m.targets.empty()) {
                throw ParseError("bench config: model '" + m.name + "' needs 'samples' and 'targets'",
                                 node.Mark().line + 1);
            }
            config.models.push_back(std::move(m));
        }
    } catch (const YAML::Exception& e) {
        throw ParseError("bench config: " + e.msg, e.mark.line >= 0 ? e.mark.line + 1 : 0);
    }
    return config;
}

BenchConfig load_bench_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_bench_config(text.str(), path.parent_path());
}

std::vector<BenchRow> run_bench(const BenchConfig& config) {
    struct Job {
        const BenchModel* model;
        std::int64_t target;
    };
    std::vector<Job> jobs;
    for (const auto& m : config.models) {
        for (auto t : m.targets) jobs.push_back({&m, t});
    }
    std::vector<BenchRow> rows(jobs.size());
    mlinit::detail::parallel_for(jobs.size(), config.workers, [&](std::size_t i) {
        const BenchModel& m = *jobs[i].model;
        BenchRow& row = rows[i];
        row.model = m.name;
        row.parameter = std::to_string(jobs[i].target);

        prism::Program program;
        std::string parameter;
        LoadedModel target;
        try {
            program = load_program(m.program, m.constants);
            parameter = mlinit::single_parameter(program);
            row.parameter = parameter + "=" + row.parameter;
            target = explore_instance(program, parameter, jobs[i].target, config.limits);
        } catch (...) {
            row.standard = row.ml = outcome_of(std::current_exception());
            return;
        }
        row.n_states = target.mdp.n_states();
        row.n_choices = target.mdp.n_choices();
        row.n_transitions = target.mdp.n_transitions();

        row.standard = attempt([&] {
            StandardSettings s;
            s.model_name = m.name;
            s.bindings = m.constants;
            s.bindings[parameter] = jobs[i].target;
            s.goal = m.goal;
            s.limits = config.limits;
            s.check = config.check;
            s.explore_seconds = target.explore_seconds;
            return run_standard(target.mdp, s).report;
        });
        row.ml = attempt([&] {
            MlSettings s;
            s.model_name = m.name;
            s.bindings = m.constants;
            s.goal = m.goal;
            s.samples = m.samples;
            s.target = jobs[i].target;
            s.seed = config.seed;
            s.threads = config.threads;
            s.limits = config.limits;
            s.check = config.check;
            auto report = run_ml(program, s, &target.mdp).report;
            report.explore_time = target.explore_seconds;
            return report;
        });
    });
    return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::ostringstream os;
    for (std::size_t c = 0; c < kHeader.size(); ++c) os << (c ? "," : "") << kHeader[c];
    os << "\n";
    for (const auto& row : rows) {
        const auto fields = cells(row);
        for (std::size_t c = 0; c < fields.size(); ++c) os << (c ? "," : "") << csv_field(fields[c]);
        os << "\n";
    }
    return os.str();
}

std::string bench_text(const std::vector<BenchRow>& rows) {
    const std::vector<std::string> top{"Model", "Parameter", "|S|",      "|Act|",    "|Trns|",   "Standard",
                                       "ML-based", "",       "Iterations", "",       "Blocks",   ""};
    const std::vector<std::string> sub{"",       "",      "x10^-3",   "x10^-3", "x10^-3", "total",
                                       "init-part", "total", "standard", "ML",     "standard", "ML"};
    std::vector<std::vector<std::string>> table{top, sub};
    for (const auto& row : rows) table.push_back(cells(row));
    std::vector<std::size_t> width(top.size(), 0);
    for (const auto& line : table) {
        for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
    }
    std::ostringstream os;
    auto rule = [&] {
        std::size_t total = 0;
        for (auto w : width) total += w + 2;
        os << std::string(total - 2, '-') << "\n";
    };
    rule();
    for (std::size_t r = 0; r < table.size(); ++r) {
        for (std::size_t c = 0; c < table[r].size(); ++c) {
            os << (c ? "  " : "") << (c < 2 ? std::left : std::right) << std::setw(static_cast<int>(width[c]))
               << table[r][c];
        }
        os << "\n";
        if (r == 1) rule();
    }
    rule();
    for (const auto& row : rows) {
        for (const auto* o : {&row.standard, &row.ml}) {
            if (o->status != BenchOutcome::Status::ok) {
                os << row.model << " " << row.parameter << " (" << (o == &row.standard ? "standard" : "ML") << "): "
                   << status_name(o->status) << ": " << o->message << "\n";
            }
        }
    }
    return os.str();
}

std::string bench_json(const std::vector<BenchRow>& rows) {
    using nlohmann::ordered_json;
    ordered_json out = ordered_json::array();
    for (const auto& row : rows) {
        ordered_json j;
        j["model"] = row.model;
        j["parameter"] = row.parameter;
        if (row.n_states) {
            j["n_states"] = *row.n_states;
            j["n_choices"] = *row.n_choices;
            j["n_transitions"] = *row.n_transitions;
        }
        for (const auto& [name, o] : {std::pair{"standard", &row.standard}, std::pair{"ml", &row.ml}}) {
            ordered_json cell;
            cell["status"] = status_name(o->status);
            if (!o->message.empty()) cell["message"] = o->message;
            if (o->report) cell["report"] = ordered_json::parse(report_json(*o->report));
            j[name] = std::move(cell);
        }
        out.push_back(std::move(j));
    }
    return out.dump(2) + "\n";
}

}  // namespace mlbisim::cli
