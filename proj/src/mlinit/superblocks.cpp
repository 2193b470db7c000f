#include "mlbisim/mlinit/superblocks.h"

#include <algorithm>
#include <map>

#include "mlbisim/core/errors.h"

namespace mlbisim::mlinit {

namespace {

ProjectionSet projection_set(const Mdp& m, std::span<const StateId> block) {
    ProjectionSet set;
    for (StateId s : block) set.push_back(projection(m, s));
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
    return set;
}

}  // namespace

std::vector<std::int64_t> features(const Mdp& m, StateId s) {
    const auto& vars = m.variables();
    auto vals = m.valuation(s);
    std::vector<std::int64_t> out(vals.begin(), vals.end());
    for (std::size_t v = 0; v < vars.size(); ++v) {
        if (vars[v].parametric) out.push_back(vars[v].upper - vals[v]);
    }
    return out;
}

std::size_t feature_count(const Mdp& m) {
    const auto& vars = m.variables();
    return vars.size() + static_cast<std::size_t>(std::count_if(vars.begin(), vars.end(),
                                                                [](const VariableInfo& v) { return v.parametric; }));
}

Projection projection(const Mdp& m, StateId s) {
    const auto& vars = m.variables();
    auto vals = m.valuation(s);
    Projection out;
    for (std::size_t v = 0; v < vars.size(); ++v) {
        if (!vars[v].parametric) out.push_back(vals[v]);
    }
    return out;
}

std::vector<std::int64_t> parametric_values(const Mdp& m, StateId s) {
    const auto& vars = m.variables();
    auto vals = m.valuation(s);
    std::vector<std::int64_t> out;
    for (std::size_t v = 0; v < vars.size(); ++v) {
        if (vars[v].parametric) out.push_back(vals[v]);
    }
    return out;
}

SampleSuperblocks compute_superblocks(const Mdp& m, const Partition& p) {
    if (p.n_states() != m.n_states()) throw UsageError("partition and model have different state counts");
    std::map<ProjectionSet, std::vector<BlockId>> groups;
    std::vector<BlockId> singletons;
    for (BlockId b = 0; b < p.n_blocks(); ++b) {
        if (p.block(b).size() == 1) {
            singletons.push_back(b);
        } else {
            groups[projection_set(m, p.block(b))].push_back(b);
        }
    }
    SampleSuperblocks out;
    out.projections.emplace_back();
    out.blocks.push_back(std::move(singletons));
    for (auto& [set, blocks] : groups) {
        out.projections.push_back(set);
        out.blocks.push_back(std::move(blocks));
    }
    out.eta.assign(m.n_states(), kSingular);
    for (SuperblockId g = 0; g < out.blocks.size(); ++g) {
        for (BlockId b : out.blocks[g]) {
            for (StateId s : p.block(b)) out.eta[s] = g;
        }
    }
    return out;
}

SuperblockCatalog align_superblocks(const std::vector<SampleSuperblocks>& samples) {
    if (samples.empty()) throw UsageError("no samples to align");
    std::map<ProjectionSet, std::size_t> occurrences;
    for (const auto& sample : samples) {
        for (std::size_t g = 1; g < sample.projections.size(); ++g) ++occurrences[sample.projections[g]];
    }
    SuperblockCatalog catalog;
    catalog.projections.emplace_back();
    std::map<ProjectionSet, SuperblockId> global;
    for (const auto& [set, count] : occurrences) {
        if (count == samples.size()) {
            global.emplace(set, static_cast<SuperblockId>(catalog.projections.size()));
            catalog.projections.push_back(set);
        }
    }
    for (const auto& sample : samples) {
        std::vector<SuperblockId> local_to_global(sample.projections.size(), kSingular);
        for (std::size_t g = 1; g < sample.projections.size(); ++g) {
            auto it = global.find(sample.projections[g]);
            if (it == global.end()) {
                ++catalog.unmatched;
            } else {
                local_to_global[g] = it->second;
            }
        }
        std::vector<SuperblockId> eta(sample.eta.size());
        for (std::size_t s = 0; s < eta.size(); ++s) eta[s] = local_to_global[sample.eta[s]];
        catalog.eta.push_back(std::move(eta));
        std::vector<std::vector<BlockId>> blocks(catalog.size());
        for (std::size_t g = 0; g < sample.blocks.size(); ++g) {
            auto& dst = blocks[local_to_global[g]];
            dst.insert(dst.end(), sample.blocks[g].begin(), sample.blocks[g].end());
        }
        for (auto& list : blocks) std::sort(list.begin(), list.end());
        catalog.blocks.push_back(std::move(blocks));
    }
    return catalog;
}

std::vector<SuperblockId> true_superblocks(const Mdp& m, const Partition& p, const SuperblockCatalog& catalog) {
    std::map<ProjectionSet, SuperblockId> index;
    for (SuperblockId g = 1; g < catalog.size(); ++g) index.emplace(catalog.projections[g], g);
    std::vector<SuperblockId> eta(m.n_states(), kSingular);
    for (BlockId b = 0; b < p.n_blocks(); ++b) {
        if (p.block(b).size() < 2) continue;
        auto it = index.find(projection_set(m, p.block(b)));
        if (it == index.end()) continue;
        for (StateId s : p.block(b)) eta[s] = it->second;
    }
    return eta;
}

}  // namespace mlbisim::mlinit
