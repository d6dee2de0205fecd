#pragma once

#include <string>
#include <vector>

#include "aaklab/analysis.hpp"
#include "aaklab/config.hpp"
#include "aaklab/hankel.hpp"
#include "aaklab/potential.hpp"
#include "aaklab/rational_l2.hpp"

namespace aaklab {

struct RunOptions {
    int threads = 1;
    bool trace = false;
};

struct RunOutcome {
    nlohmann::json summary;
    std::vector<std::string> files;
};

/// Full batch: measure -> Hankel/L2 -> potential -> analysis, with all
/// artifacts written under cfg.output_dir. Output bytes depend only on the
/// config and seed, not on the thread count. Partial outputs are removed
/// when a stage fails.
RunOutcome run_pipeline(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// Single-stage helpers backing the debug subcommands.
nlohmann::json moments_json(const ExperimentConfig& cfg);
std::string equilibrium_csv(const EquilibriumMeasure& mu);
nlohmann::json equilibrium_summary(const EquilibriumMeasure& mu);
nlohmann::json approximant_json(const Approximant& g);

/// Max relative deviation of the Green potential from its constant over
/// off-collocation probe points (panel quarter points).
double equilibrium_flatness(const EquilibriumMeasure& mu);

}  // namespace aaklab
