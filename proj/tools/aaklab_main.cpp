// aaklab: batch driver for meromorphic/rational approximation experiments on
// Cauchy transforms. Subcommands expose individual pipeline stages for
// debugging; `run` produces the full artifact set.

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "aaklab/emit.hpp"
#include "aaklab/pipeline.hpp"

namespace fs = std::filesystem;
using namespace aaklab;

namespace {

// exit codes: 0 ok, 1 validation, 2 numerical failure, 3 I/O
constexpr int kOk = 0, kValidation = 1, kNumerical = 2, kIo = 3;

void print_error(const std::string& type, const std::string& message) {
    nlohmann::json err;
    err["error"] = {{"type", type}, {"message", message}};
    std::cerr << err.dump() << std::endl;
}

int guarded(const std::function<void()>& body) {
    try {
        body();
        return kOk;
    } catch (const ValidationError& e) {
        print_error("validation", e.what());
        return kValidation;
    } catch (const ParseError& e) {
        print_error("validation", e.what());
        return kValidation;
    } catch (const IoError& e) {
        print_error("io", e.what());
        return kIo;
    } catch (const fs::filesystem_error& e) {
        print_error("io", e.what());
        return kIo;
    } catch (const std::exception& e) {
        print_error("numerical", e.what());
        return kNumerical;
    }
}

ExperimentConfig load(const std::string& config_path, const std::string& out_override) {
    ExperimentConfig cfg = ExperimentConfig::from_file(config_path);
    if (!out_override.empty()) cfg.output_dir = out_override;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"meromorphic and rational approximants to Cauchy transforms"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int threads = 1;
    bool trace = false;

    auto add_common = [&](CLI::App* cmd, bool with_threads) {
        cmd->add_option("--config", config_path, "experiment config (JSON)")->required();
        cmd->add_option("--out", out_dir, "output directory (overrides config)");
        if (with_threads) {
            cmd->add_option("--threads", threads, "worker threads for the per-degree fanout");
            cmd->add_flag("--trace", trace, "write optimizer trace CSVs");
        }
    };

    CLI::App* cmd_run = app.add_subcommand("run", "full pipeline, all artifacts");
    add_common(cmd_run, true);
    CLI::App* cmd_validate = app.add_subcommand("validate", "check config invariants");
    add_common(cmd_validate, false);
    CLI::App* cmd_moments = app.add_subcommand("moments", "moment stage only");
    add_common(cmd_moments, false);
    CLI::App* cmd_equilibrium =
        app.add_subcommand("equilibrium", "Green equilibrium measure stage only");
    add_common(cmd_equilibrium, false);
    CLI::App* cmd_approx = app.add_subcommand("approx", "single approximant");
    add_common(cmd_approx, false);
    int approx_degree = -1;
    std::string approx_method = "aak";
    cmd_approx->add_option("--degree", approx_degree, "degree n")->required();
    cmd_approx->add_option("--method", approx_method, "aak | rational-l2");
    CLI::App* cmd_diagnose = app.add_subcommand("diagnose", "full run (alias kept for scripts)");
    add_common(cmd_diagnose, true);

    CLI11_PARSE(app, argc, argv);

    if (cmd_validate->parsed()) {
        return guarded([&] {
            ExperimentConfig cfg = load(config_path, out_dir);
            std::vector<std::string> bad = validate(cfg);
            for (const std::string& b : bad) std::cout << b << '\n';
            if (!bad.empty()) throw ValidationError("config has " + std::to_string(bad.size()) +
                                                    " violation(s)");
            std::cout << "ok\n";
        });
    }
    if (cmd_moments->parsed()) {
        return guarded([&] {
            ExperimentConfig cfg = load(config_path, out_dir);
            write_text_file(fs::path(cfg.output_dir) / "moments.json",
                            dump_json(moments_json(cfg)));
            std::cout << "wrote moments.json\n";
        });
    }
    if (cmd_equilibrium->parsed()) {
        return guarded([&] {
            ExperimentConfig cfg = load(config_path, out_dir);
            MeasureSpec spec = MeasureSpec::from_json(cfg.measure);
            EquilibriumMeasure mu = equilibrium_measure(support_of(spec), cfg.panels_M);
            write_text_file(fs::path(cfg.output_dir) / "equilibrium.csv", equilibrium_csv(mu));
            std::cout << dump_json(equilibrium_summary(mu));
        });
    }
    if (cmd_approx->parsed()) {
        return guarded([&] {
            ExperimentConfig cfg = load(config_path, out_dir);
            MeasureSpec spec = MeasureSpec::from_json(cfg.measure);
            MomentSequence mom = moments(spec, cfg.truncation_N);
            HankelSystem sys = build_hankel(mom);
            if (approx_degree < 1 || approx_degree >= cfg.truncation_N)
                throw ValidationError("degree out of range for the configured truncation");
            std::vector<SingularTriple> triples = singular_triples(sys, approx_degree);
            nlohmann::json j;
            if (approx_method == "aak") {
                Approximant g = aak_approximant(sys, triples[approx_degree]);
                j = approximant_json(g);
            } else if (approx_method == "rational-l2") {
                CircleGrid grid =
                    make_circle_grid(spec, default_grid_size(cfg.truncation_N, approx_degree));
                std::vector<cplx> init = split_blaschke(triples[approx_degree]).zeros_in_disk;
                DenominatorPoint pt = multistart_optimize(
                    grid, approx_degree, init, cfg.seed * 1000003ULL + approx_degree);
                Approximant g;
                g.n = approx_degree;
                g.method = "rational-l2";
                g.sigma = std::sqrt(std::max(0.0, pt.objective));
                g.poles = pt.zeros;
                j = approximant_json(g);
            } else {
                throw ValidationError("unknown method '" + approx_method + "'");
            }
            fs::path rel = fs::path("approximants") /
                           (approx_method + "_" + std::to_string(approx_degree) + ".json");
            write_text_file(fs::path(cfg.output_dir) / rel, dump_json(j));
            std::cout << dump_json(j);
        });
    }
    // run / diagnose
    return guarded([&] {
        ExperimentConfig cfg = load(config_path, out_dir);
        RunOptions ro;
        ro.threads = threads;
        ro.trace = trace;
        RunOutcome out = run_pipeline(cfg, ro);
        std::cout << "wrote " << out.files.size() << " files under " << cfg.output_dir << "\n";
    });
}
