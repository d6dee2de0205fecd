#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aaklab/measure.hpp"

namespace aaklab {

struct ExperimentConfig {
    nlohmann::json measure;                      // MeasureSpec serialization
    std::vector<std::string> methods{"aak"};     // subset of {aak, rational-l2}
    std::vector<int> degrees;                    // ascending
    int truncation_N = 256;
    int panels_M = 400;
    std::vector<cplx> probes;
    std::string output_dir = "out";
    std::uint64_t seed = 1;

    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig from_file(const std::string& path);
    nlohmann::json to_json() const;
};

/// All invariant violations, human-readable; empty iff a run may proceed.
std::vector<std::string> validate(const ExperimentConfig& cfg);

}  // namespace aaklab
