#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "aaklab/emit.hpp"
#include "aaklab/pipeline.hpp"

using namespace aaklab;
namespace fs = std::filesystem;

namespace {

nlohmann::json small_markov_config(const std::string& out) {
    nlohmann::json j;
    j["measure"] = {{"intervals", {{{"a", -0.5}, {"b", 0.5}, {"density", "1"}}}},
                    {"poles", nlohmann::json::array()}};
    j["methods"] = {"aak", "rational-l2"};
    j["degrees"] = {2, 3};
    j["truncation_N"] = 64;
    j["panels_M"] = 80;
    j["probes"] = {{0.0, 0.9}};
    j["output_dir"] = out;
    j["seed"] = 11;
    return j;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("config validation catches the documented violations") {
    ExperimentConfig cfg = ExperimentConfig::from_json(small_markov_config("x"));
    CHECK(validate(cfg).empty());

    ExperimentConfig bad = cfg;
    bad.degrees = {};
    CHECK_FALSE(validate(bad).empty());

    bad = cfg;
    bad.degrees = {13};
    bad.truncation_N = 10;  // must exceed twice the largest degree
    CHECK_FALSE(validate(bad).empty());

    bad = cfg;
    bad.degrees = {5, 3};
    CHECK_FALSE(validate(bad).empty());

    bad = cfg;
    bad.panels_M = 10;
    CHECK_FALSE(validate(bad).empty());

    bad = cfg;
    bad.measure["poles"] = {{{"eta", {1.2, 0.0}}, {"coeffs", {{1.0, 0.0}}}}};
    std::vector<std::string> v = validate(bad);
    REQUIRE_FALSE(v.empty());
    CHECK(v[0].find("measure") != std::string::npos);

    bad = cfg;
    bad.methods = {"newton"};
    CHECK_FALSE(validate(bad).empty());
}

TEST_CASE("pipeline writes the artifact set and is thread-count invariant") {
    fs::path tmp = fs::temp_directory_path() / "aaklab_pipe_t1";
    fs::path tmp8 = fs::temp_directory_path() / "aaklab_pipe_t8";
    fs::remove_all(tmp);
    fs::remove_all(tmp8);

    ExperimentConfig cfg = ExperimentConfig::from_json(small_markov_config(tmp.string()));
    RunOptions one;
    one.threads = 1;
    RunOutcome r1 = run_pipeline(cfg, one);

    for (const char* f : {"moments.json", "equilibrium.csv", "rates.csv", "circle_errors.csv",
                          "diagnostics.json", "summary.json", "approximants/aak_2.json",
                          "approximants/aak_3.json", "approximants/rational-l2_2.json",
                          "approximants/rational-l2_3.json"}) {
        CHECK(fs::exists(tmp / f));
    }
    CHECK(r1.summary["capacity"].get<double>() > 0.0);
    CHECK(r1.summary["audits"]["angle_bound"].get<bool>());
    CHECK(r1.summary["audits"]["orthogonality_ok"].get<bool>());

    ExperimentConfig cfg8 = cfg;
    cfg8.output_dir = tmp8.string();
    RunOptions eight;
    eight.threads = 8;
    RunOutcome r8 = run_pipeline(cfg8, eight);
    REQUIRE(r1.files == r8.files);
    for (const std::string& rel : r1.files) CHECK(slurp(tmp / rel) == slurp(tmp8 / rel));

    // repeated run in place is byte-identical as well
    RunOutcome r1b = run_pipeline(cfg, one);
    for (const std::string& rel : r1b.files) CHECK(slurp(tmp / rel) == slurp(tmp8 / rel));

    fs::remove_all(tmp);
    fs::remove_all(tmp8);
}

TEST_CASE("aak-only run never produces optimizer artifacts") {
    fs::path tmp = fs::temp_directory_path() / "aaklab_pipe_aak";
    fs::remove_all(tmp);
    nlohmann::json j = small_markov_config(tmp.string());
    j["methods"] = {"aak"};
    ExperimentConfig cfg = ExperimentConfig::from_json(j);
    run_pipeline(cfg, {});
    CHECK(fs::exists(tmp / "approximants/aak_2.json"));
    CHECK_FALSE(fs::exists(tmp / "approximants/rational-l2_2.json"));
    std::string rates = slurp(tmp / "rates.csv");
    CHECK(rates.find("rational-l2") == std::string::npos);
    fs::remove_all(tmp);
}

TEST_CASE("validation failure leaves no partial outputs") {
    fs::path tmp = fs::temp_directory_path() / "aaklab_pipe_bad";
    fs::remove_all(tmp);
    nlohmann::json j = small_markov_config(tmp.string());
    j["degrees"] = nlohmann::json::array();
    ExperimentConfig cfg = ExperimentConfig::from_json(j);
    CHECK_THROWS_AS(run_pipeline(cfg, {}), ValidationError);
    CHECK_FALSE(fs::exists(tmp / "summary.json"));
    fs::remove_all(tmp);
}

TEST_CASE("approximant json carries the declared fields") {
    Approximant g;
    g.n = 3;
    g.method = "aak";
    g.sigma = 0.25;
    g.poles = {cplx(0.1, -0.2)};
    nlohmann::json j = approximant_json(g);
    CHECK(j["n"] == 3);
    CHECK(j["method"] == "aak");
    CHECK(j["sigma"] == 0.25);
    CHECK(j["poles"][0][0] == 0.1);
    CHECK(j["poles"][0][1] == -0.2);
}

TEST_CASE("float formatting is shortest round-trip") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
    CHECK(format_double(1e-300) == "1e-300");
    double v = 0.1234567890123456789;
    CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("trace flag writes optimizer traces") {
    fs::path tmp = fs::temp_directory_path() / "aaklab_pipe_trace";
    fs::remove_all(tmp);
    ExperimentConfig cfg = ExperimentConfig::from_json(small_markov_config(tmp.string()));
    RunOptions opts;
    opts.trace = true;
    run_pipeline(cfg, opts);
    CHECK(fs::exists(tmp / "trace/rational-l2_2.csv"));
    std::string body = slurp(tmp / "trace/rational-l2_2.csv");
    CHECK(body.rfind("iter,objective,grad_norm\n", 0) == 0);
    fs::remove_all(tmp);
}

#ifdef AAKLAB_CLI_PATH
namespace {
int run_cli(const std::string& args) {
    std::string cmd = std::string(AAKLAB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}
}  // namespace

TEST_CASE("cli exit codes") {
    fs::path tmp = fs::temp_directory_path() / "aaklab_cli_codes";
    fs::remove_all(tmp);
    fs::create_directories(tmp);

    // 3: unreadable config
    CHECK(run_cli("validate --config " + (tmp / "missing.json").string()) == 3);

    // 1: invariant violations
    nlohmann::json bad = small_markov_config((tmp / "out").string());
    bad["degrees"] = nlohmann::json::array();
    write_text_file(tmp / "bad.json", bad.dump());
    CHECK(run_cli("validate --config " + (tmp / "bad.json").string()) == 1);
    CHECK(run_cli("run --config " + (tmp / "bad.json").string()) == 1);

    // 0: well-formed config through the single-stage subcommands
    nlohmann::json good = small_markov_config((tmp / "out").string());
    write_text_file(tmp / "good.json", good.dump());
    CHECK(run_cli("validate --config " + (tmp / "good.json").string()) == 0);
    CHECK(run_cli("moments --config " + (tmp / "good.json").string()) == 0);
    CHECK(fs::exists(tmp / "out/moments.json"));
    CHECK(run_cli("equilibrium --config " + (tmp / "good.json").string()) == 0);
    CHECK(fs::exists(tmp / "out/equilibrium.csv"));
    CHECK(run_cli("approx --config " + (tmp / "good.json").string() + " --degree 2") == 0);
    CHECK(fs::exists(tmp / "out/approximants/aak_2.json"));
    fs::remove_all(tmp);
}
#endif
