#include "mlbisim/mlinit/relations.h"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "mlbisim/core/errors.h"

namespace mlbisim::mlinit {

namespace {

std::int64_t dot(const std::vector<int>& w, std::span<const std::int64_t> v) {
    std::int64_t sum = 0;
    for (std::size_t j = 0; j < w.size(); ++j) sum += w[j] * v[j];
    return sum;
}

// Parametric values of a superblock's states in one sample: per block, per
// projection, one row per state.
using BlockRows = std::map<Projection, std::vector<std::vector<std::int64_t>>>;

std::string show(const Projection& p) {
    std::string s = "(";
    for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + std::to_string(p[i]);
    return s + ")";
}

// Per-sample block keys when `w` is a valid reference relation.
std::optional<std::vector<std::vector<std::int64_t>>> reference_keys(const std::vector<std::vector<BlockRows>>& data,
                                                                      const Projection& ref, const std::vector<int>& w) {
    std::vector<std::vector<std::int64_t>> keys(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        std::set<std::int64_t> seen;
        for (const auto& block : data[i]) {
            const auto& rows = block.at(ref);
            std::int64_t key = dot(w, rows.front());
            for (const auto& row : rows) {
                if (dot(w, row) != key) return std::nullopt;
            }
            if (!seen.insert(key).second) return std::nullopt;
            keys[i].push_back(key);
        }
    }
    return keys;
}

// Exact line through (p_i, c_i); alpha = 0 when all parameters coincide.
std::optional<std::pair<Rational, Rational>> affine_fit(const std::vector<std::int64_t>& p,
                                                        const std::vector<std::int64_t>& c) {
    std::size_t j = 1;
    while (j < p.size() && p[j] == p[0]) ++j;
    Rational alpha = 0;
    if (j < p.size()) alpha = Rational(c[j] - c[0]) / Rational(p[j] - p[0]);
    Rational beta = Rational(c[0]) - alpha * Rational(p[0]);
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (alpha * Rational(p[i]) + beta != Rational(c[i])) return std::nullopt;
    }
    return std::make_pair(alpha, beta);
}

}  // namespace

Rational ProjectionRelation::key(std::span<const std::int64_t> parametric, std::int64_t parameter) const {
    return Rational(dot(coefficients, parametric)) + alpha * Rational(parameter) + beta;
}

const ProjectionRelation* RelationPattern::find(const Projection& p) const {
    for (const auto& r : relations) {
        if (r.projection == p) return &r;
    }
    return nullptr;
}

std::vector<std::vector<int>> coefficient_candidates(std::size_t n) {
    std::vector<std::vector<int>> out;
    for (std::size_t nnz = 1; nnz <= n; ++nnz) {
        // Positions: combinations of nnz out of n in lexicographic order.
        std::vector<std::size_t> pos(nnz);
        for (std::size_t i = 0; i < nnz; ++i) pos[i] = i;
        while (true) {
            for (std::uint64_t signs = 0; signs < (std::uint64_t{1} << nnz); ++signs) {
                std::vector<int> w(n, 0);
                for (std::size_t i = 0; i < nnz; ++i) w[pos[i]] = (signs >> (nnz - 1 - i)) & 1 ? -1 : 1;
                out.push_back(std::move(w));
            }
            std::size_t i = nnz;
            while (i > 0 && pos[i - 1] == n - nnz + (i - 1)) --i;
            if (i == 0) break;
            ++pos[i - 1];
            for (std::size_t j = i; j < nnz; ++j) pos[j] = pos[j - 1] + 1;
        }
    }
    return out;
}

std::vector<RelationPattern> mine_relations(const SuperblockCatalog& catalog, const std::vector<MiningSample>& samples) {
    if (samples.empty()) throw UsageError("relation mining needs at least one sample");
    if (samples.size() != catalog.blocks.size()) throw UsageError("catalog and sample counts differ");
    const std::size_t k = parametric_values(*samples[0].mdp, 0).size();
    const auto candidates = coefficient_candidates(k);
    std::vector<std::int64_t> params;
    for (const auto& s : samples) params.push_back(s.parameter);

    std::vector<RelationPattern> patterns;
    for (SuperblockId g = 1; g < catalog.size(); ++g) {
        RelationPattern pattern;
        pattern.superblock = g;
        patterns.push_back(pattern);
        auto& out = patterns.back();
        if (k == 0) {
            out.reason = "no parametric variables";
            continue;
        }
        bool several = false;
        std::vector<std::vector<BlockRows>> data(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const auto& blocks = catalog.blocks[i][g];
            several = several || blocks.size() > 1;
            for (BlockId b : blocks) {
                BlockRows rows;
                for (StateId s : samples[i].partition->block(b)) {
                    rows[projection(*samples[i].mdp, s)].push_back(parametric_values(*samples[i].mdp, s));
                }
                data[i].push_back(std::move(rows));
            }
        }
        if (!several) {
            out.reason = "single block in every sample";
            continue;
        }

        const auto& projections = catalog.projections[g];
        const Projection& ref = projections.front();
        std::optional<std::vector<std::vector<std::int64_t>>> keys;
        for (const auto& w : candidates) {
            keys = reference_keys(data, ref, w);
            if (keys) {
                out.relations.push_back(ProjectionRelation{ref, w, 0, 0});
                break;
            }
        }
        if (!keys) {
            out.reason = "no relation separates the blocks on projection " + show(ref);
            continue;
        }

        bool complete = true;
        for (std::size_t pi = 1; pi < projections.size() && complete; ++pi) {
            const Projection& proj = projections[pi];
            bool found = false;
            for (const auto& w : candidates) {
                std::vector<std::int64_t> offsets;
                bool ok = true;
                for (std::size_t i = 0; i < data.size() && ok; ++i) {
                    std::optional<std::int64_t> offset;
                    for (std::size_t b = 0; b < data[i].size() && ok; ++b) {
                        for (const auto& row : data[i][b].at(proj)) {
                            std::int64_t c = (*keys)[i][b] - dot(w, row);
                            if (!offset) offset = c;
                            if (*offset != c) {
                                ok = false;
                                break;
                            }
                        }
                    }
                    if (ok) offsets.push_back(offset.value_or(0));
                }
                if (!ok) continue;
                auto fit = affine_fit(params, offsets);
                if (!fit) continue;
                out.relations.push_back(ProjectionRelation{proj, w, fit->first, fit->second});
                found = true;
                break;
            }
            if (!found) {
                out.reason = "no relation for projection " + show(proj);
                complete = false;
            }
        }
        if (!complete) {
            out.relations.clear();
            continue;
        }
        out.pattern_free = false;
    }
    return patterns;
}

Partition split_superblocks(const Mdp& target, const std::vector<SuperblockId>& predicted,
                            const std::vector<ProjectionSet>& projections, const std::vector<RelationPattern>& patterns,
                            std::int64_t parameter, SplitStats* stats) {
    if (predicted.size() != target.n_states()) throw UsageError("prediction does not cover the target model");
    std::vector<const RelationPattern*> by_superblock(projections.size(), nullptr);
    for (const auto& p : patterns) {
        if (p.superblock < by_superblock.size() && !p.pattern_free) by_superblock[p.superblock] = &p;
    }
    enum Tag { keyed = 0, stray = 1, whole = 2 };
    std::map<std::tuple<SuperblockId, int, Rational>, std::uint64_t> ids;
    std::vector<std::uint64_t> assignment(target.n_states());
    SplitStats local;
    for (StateId s = 0; s < target.n_states(); ++s) {
        const SuperblockId g = predicted[s];
        if (g >= projections.size()) throw UsageError("predicted superblock " + std::to_string(g) + " is unknown");
        std::tuple<SuperblockId, int, Rational> key{g, whole, 0};
        if (const RelationPattern* pattern = by_superblock[g]) {
            if (const ProjectionRelation* rel = pattern->find(projection(target, s))) {
                key = {g, keyed, rel->key(parametric_values(target, s), parameter)};
                ++local.keyed_states;
            } else {
                key = {g, stray, 0};
                ++local.stray_states;
            }
        } else {
            ++local.unsplit_states;
        }
        auto [it, inserted] = ids.emplace(key, ids.size());
        assignment[s] = it->second;
    }
    if (stats) *stats = local;
    return Partition::from_assignment(assignment);
}

}  // namespace mlbisim::mlinit
