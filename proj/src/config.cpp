#include "aaklab/config.hpp"

#include <algorithm>
#include <fstream>

#include "aaklab/emit.hpp"

namespace aaklab {

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    cfg.measure = j.at("measure");
    if (j.contains("methods")) cfg.methods = j["methods"].get<std::vector<std::string>>();
    cfg.degrees = j.at("degrees").get<std::vector<int>>();
    if (j.contains("truncation_N")) cfg.truncation_N = j["truncation_N"].get<int>();
    if (j.contains("panels_M")) cfg.panels_M = j["panels_M"].get<int>();
    if (j.contains("probes")) {
        for (const auto& p : j["probes"])
            cfg.probes.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    }
    if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    return from_json(j);
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["measure"] = measure;
    j["methods"] = methods;
    j["degrees"] = degrees;
    j["truncation_N"] = truncation_N;
    j["panels_M"] = panels_M;
    j["probes"] = nlohmann::json::array();
    for (const cplx& p : probes) j["probes"].push_back({p.real(), p.imag()});
    j["output_dir"] = output_dir;
    j["seed"] = seed;
    return j;
}

std::vector<std::string> validate(const ExperimentConfig& cfg) {
    std::vector<std::string> bad;
    try {
        MeasureSpec::from_json(cfg.measure);
    } catch (const std::exception& e) {
        bad.push_back(std::string("measure: ") + e.what());
    }
    if (cfg.degrees.empty()) bad.push_back("degrees: list is empty");
    if (!std::is_sorted(cfg.degrees.begin(), cfg.degrees.end()))
        bad.push_back("degrees: must be sorted ascending");
    for (int n : cfg.degrees)
        if (n < 1) bad.push_back("degrees: entries must be >= 1");
    if (!cfg.degrees.empty() && cfg.truncation_N <= 2 * cfg.degrees.back())
        bad.push_back("truncation_N: must exceed twice the largest degree");
    if (cfg.panels_M < 50) bad.push_back("panels_M: must be at least 50");
    if (cfg.methods.empty()) bad.push_back("methods: list is empty");
    for (const std::string& m : cfg.methods) {
        if (m != "aak" && m != "rational-l2")
            bad.push_back("methods: unknown method '" + m + "'");
    }
    if (cfg.output_dir.empty()) bad.push_back("output_dir: empty path");
    return bad;
}

}  // namespace aaklab
