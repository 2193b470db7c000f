#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mlbisim/core/mdp.h"
#include "mlbisim/mlinit/classifier.h"
#include "mlbisim/mlinit/relations.h"
#include "mlbisim/mlinit/superblocks.h"

namespace mlbisim::mlinit {

/// Everything learned from the samples that is needed to seed a target model.
struct SuperblockModel {
    static constexpr int kVersion = 1;

    std::string parameter;
    std::vector<std::string> variables;
    std::vector<bool> parametric;
    std::vector<std::int64_t> sample_parameters;
    std::uint64_t seed = 0;
    SvmOptions svm;
    std::vector<ProjectionSet> superblocks;  ///< projection set per global superblock
    ClassifierModel classifier;
    std::vector<RelationPattern> patterns;

    /// Throws UsageError unless `m` has the same variables and parametric flags.
    void check_compatible(const Mdp& m) const;
};

/// Versioned JSON text. Doubles are written with round-trip precision, so
/// loading and saving reproduces the same bytes.
std::string model_to_text(const SuperblockModel& model);
SuperblockModel model_from_text(const std::string& text);

void save_model(const SuperblockModel& model, const std::filesystem::path& path);
SuperblockModel load_model(const std::filesystem::path& path);

/// "state superblock" lines, one per state.
void save_eta(const std::vector<SuperblockId>& eta, const std::filesystem::path& path);

}  // namespace mlbisim::mlinit
