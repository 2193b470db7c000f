#include "mlbisim/cli/report.h"

#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace mlbisim::cli {

using nlohmann::ordered_json;

std::string report_json(const RunReport& r) {
    ordered_json j;
    j["model"] = r.model;
    j["bindings"] = r.bindings;
    j["method"] = r.method;
    j["n_states"] = r.n_states;
    j["n_choices"] = r.n_choices;
    j["n_transitions"] = r.n_transitions;
    j["peak_states"] = r.peak_states;
    j["explore_time"] = r.explore_time;
    j["init_partition_time"] = r.init_partition_time;
    j["total_time"] = r.total_time;
    j["initial_blocks"] = r.initial_blocks;
    j["final_blocks"] = r.final_blocks;
    j["iterations"] = r.iterations;
    j["refine"] = {{"splitters_examined", r.refine.splitters_examined},
                   {"effective_splitters", r.refine.effective_splitters},
                   {"full_passes", r.refine.full_passes},
                   {"full_pass_splits", r.refine.full_pass_splits},
                   {"effective_full_passes", r.refine.effective_full_passes}};
    j["is_bisimulation"] = r.is_bisimulation;
    if (r.witness) j["witness"] = *r.witness;
    if (!r.oracle.empty()) {
        j["oracle"] = r.oracle;
        if (r.finer_than_oracle) j["finer_than_oracle"] = *r.finer_than_oracle;
        if (r.equal_to_oracle) j["equal_to_oracle"] = *r.equal_to_oracle;
    }
    if (r.accuracy) j["accuracy"] = *r.accuracy;
    if (r.method == "ml") {
        ordered_json ml;
        ml["samples"] = r.samples;
        ml["seed"] = r.seed;
        ml["self_consistency"] = r.self_consistency;
        ml["model_loaded"] = r.model_loaded;
        ml["training_states"] = r.training_states;
        ml["superblocks"] = r.superblocks;
        ml["subclasses"] = r.subclasses;
        ml["trained_subclasses"] = r.trained_subclasses;
        ml["pattern_free"] = r.pattern_free;
        ml["split"] = {{"keyed_states", r.split.keyed_states},
                       {"stray_states", r.split.stray_states},
                       {"unsplit_states", r.split.unsplit_states}};
        ordered_json steps = ordered_json::array();
        for (const auto& s : r.steps) steps.push_back({{"step", s.step}, {"seconds", s.seconds}});
        ml["steps"] = std::move(steps);
        ml["warnings"] = r.warnings;
        j["ml"] = std::move(ml);
    }
    return j.dump(2) + "\n";
}

std::string report_text(const RunReport& r) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(3);
    os << r.model;
    for (const auto& [k, v] : r.bindings) os << " " << k << "=" << v;
    os << " [" << r.method << "]\n";
    os << "  states " << r.n_states << ", choices " << r.n_choices << ", transitions " << r.n_transitions << "\n";
    os << "  blocks " << r.initial_blocks << " -> " << r.final_blocks << " in " << r.iterations << " iterations\n";
    os << "  init-part " << r.init_partition_time << " s, total " << r.total_time << " s (explore "
       << r.explore_time << " s)\n";
    os << "  bisimulation: " << (r.is_bisimulation ? "yes" : "NO") << "\n";
    if (r.witness) os << "  witness: " << *r.witness << "\n";
    if (!r.oracle.empty() && r.finer_than_oracle) {
        os << "  finer than " << r.oracle << " reference: " << (*r.finer_than_oracle ? "yes" : "NO");
        if (r.equal_to_oracle) os << (*r.equal_to_oracle ? " (equal)" : " (strictly finer)");
        os << "\n";
    }
    if (r.accuracy) os << "  superblock prediction accuracy " << *r.accuracy << "\n";
    for (const auto& w : r.warnings) os << "  warning: " << w << "\n";
    return os.str();
}

}  // namespace mlbisim::cli
