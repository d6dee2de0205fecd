#include "aaklab/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <sstream>
#include <thread>

#include "aaklab/emit.hpp"

namespace aaklab {

namespace fs = std::filesystem;

namespace {

struct DegreeResult {
    int n = 0;
    // aak branch
    bool aak_done = false;
    bool aak_degenerate = false;
    Approximant aak;
    CircleErrorStats circle;
    double aak_orth = 0.0;
    AngleBoundAudit aak_angle;
    PoleDiagnostics aak_diag;
    // rational-l2 branch
    bool l2_done = false;
    DenominatorPoint l2;
    double l2_error = 0.0;  // sqrt(objective)
    double l2_orth = 0.0;
    double l2_interp = 0.0;
    AngleBoundAudit l2_angle;
    PoleDiagnostics l2_diag;
    std::string l2_trace;
};

nlohmann::json pole_list(const std::vector<cplx>& poles) {
    nlohmann::json arr = nlohmann::json::array();
    for (const cplx& p : poles) arr.push_back({p.real(), p.imag()});
    return arr;
}

double normalized_orthogonality(const MeasureSpec& spec, const Poly& num, const Poly& den,
                                int n) {
    if (n == 0) return 0.0;
    std::vector<cplx> r = orthogonality_residuals(spec, num, den, n);
    double scale = orthogonality_scale(spec, num, den);
    double mx = 0.0;
    for (const cplx& v : r) mx = std::max(mx, std::abs(v));
    return scale > 0.0 ? mx / scale : mx;
}

}  // namespace

nlohmann::json approximant_json(const Approximant& g) {
    nlohmann::json j;
    j["n"] = g.n;
    j["method"] = g.method;
    j["sigma"] = g.sigma;
    j["poles"] = pole_list(g.poles);
    return j;
}

nlohmann::json moments_json(const ExperimentConfig& cfg) {
    MeasureSpec spec = MeasureSpec::from_json(cfg.measure);
    MomentSequence mom = moments(spec, cfg.truncation_N);
    nlohmann::json j;
    j["N"] = mom.N;
    j["rho"] = mom.rho;
    j["decay_constant"] = mom.decay_C;
    j["excess"] = mom.excess;
    nlohmann::json arr = nlohmann::json::array();
    for (const cplx& m : mom.m) arr.push_back({m.real(), m.imag()});
    j["moments"] = arr;
    return j;
}

std::string equilibrium_csv(const EquilibriumMeasure& mu) {
    std::ostringstream os;
    os << "x,density,potential\n";
    for (const auto& p : mu.panels) {
        os << format_double(p.mid()) << ',' << format_double(p.density) << ','
           << format_double(green_potential(mu, cplx(p.mid(), 0.0))) << '\n';
    }
    return os.str();
}

nlohmann::json equilibrium_summary(const EquilibriumMeasure& mu) {
    nlohmann::json j;
    j["capacity"] = mu.capacity;
    j["potential_constant"] = mu.potential_constant;
    j["predicted_rate"] = predicted_rate(mu);
    j["mass_error"] = std::abs(mu.mass() - 1.0);
    j["panels"] = static_cast<int>(mu.panels.size());
    return j;
}

double equilibrium_flatness(const EquilibriumMeasure& mu) {
    double worst = 0.0;
    for (const auto& p : mu.panels) {
        for (double frac : {0.25, 0.75}) {
            double x = p.a + frac * p.length();
            double u = green_potential(mu, cplx(x, 0.0));
            worst = std::max(worst, std::abs(u - mu.potential_constant) / mu.potential_constant);
        }
    }
    return worst;
}

RunOutcome run_pipeline(const ExperimentConfig& cfg, const RunOptions& opts) {
    {
        std::vector<std::string> bad = validate(cfg);
        if (!bad.empty()) {
            std::string msg = "config validation failed:";
            for (const std::string& b : bad) msg += "\n  - " + b;
            throw ValidationError(msg);
        }
    }
    const MeasureSpec spec = MeasureSpec::from_json(cfg.measure);
    const bool want_aak =
        std::find(cfg.methods.begin(), cfg.methods.end(), "aak") != cfg.methods.end();
    const bool want_l2 =
        std::find(cfg.methods.begin(), cfg.methods.end(), "rational-l2") != cfg.methods.end();

    RunOutcome outcome;
    std::vector<fs::path> written;
    auto emit = [&](const fs::path& rel, const std::string& content) {
        fs::path full = fs::path(cfg.output_dir) / rel;
        write_text_file(full, content);
        written.push_back(full);
        outcome.files.push_back(rel.string());
    };

    try {
        // ---- shared stages -------------------------------------------------
        const MomentSequence mom = moments(spec, cfg.truncation_N);
        const HankelSystem sys = build_hankel(mom);
        const int max_degree = cfg.degrees.back();
        const std::vector<SingularTriple> triples = singular_triples(sys, max_degree);
        const EquilibriumMeasure mu = equilibrium_measure(support_of(spec), cfg.panels_M);

        CircleGrid grid;
        if (want_l2) grid = make_circle_grid(spec, default_grid_size(cfg.truncation_N, max_degree));

        // ---- per-degree fanout ---------------------------------------------
        const std::vector<Interval> S = support_of(spec);
        std::vector<DegreeResult> results(cfg.degrees.size());
        std::atomic<std::size_t> next{0};
        std::atomic<bool> failed{false};
        std::string failure;
        std::mutex failure_mu;

        auto work = [&]() {
            for (;;) {
                std::size_t idx = next.fetch_add(1);
                if (idx >= cfg.degrees.size() || failed.load()) return;
                try {
                    DegreeResult& r = results[idx];
                    r.n = cfg.degrees[idx];
                    const SingularTriple& t = triples[r.n];
                    if (want_aak) {
                        if (t.degenerate) {
                            r.aak_degenerate = true;
                        } else {
                            r.aak = aak_approximant(sys, t);
                            r.circle = circle_error(sys, t, 4096);
                            BlaschkeSplit split = split_blaschke(t);
                            r.aak_orth = normalized_orthogonality(spec, t.v_poly(),
                                                                  split.q_tilde, r.n);
                            r.aak_angle = angle_bound_audit(r.aak.poles, spec, split.w);
                            r.aak_diag = weak_star_distance(r.aak.poles, mu);
                            r.aak_done = true;
                        }
                    }
                    if (want_l2) {
                        std::vector<cplx> init = split_blaschke(triples[r.n]).zeros_in_disk;
                        std::ostringstream trace;
                        OptimOptions oo;
                        if (opts.trace) oo.trace = &trace;
                        r.l2 = multistart_optimize(grid, r.n, init,
                                                   cfg.seed * 1000003ULL + r.n, 4, oo);
                        r.l2 = refine_critical_point(spec, grid, r.l2);
                        CriticalityCertificate cert = certify_critical(spec, grid, r.l2);
                        r.l2_error = std::sqrt(std::max(0.0, r.l2.objective));
                        r.l2_orth = cert.orthogonality;
                        r.l2_interp = cert.interpolation;
                        r.l2_angle = angle_bound_audit(r.l2.zeros, spec, Poly{cplx(1.0, 0.0)});
                        r.l2_diag = weak_star_distance(r.l2.zeros, mu);
                        r.l2_trace = trace.str();
                        r.l2_done = true;
                    }
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(failure_mu);
                    failed.store(true);
                    if (failure.empty())
                        failure = "degree " + std::to_string(cfg.degrees[idx]) + ": " + e.what();
                }
            }
        };
        {
            int nthreads = std::max(1, opts.threads);
            std::vector<std::thread> pool;
            for (int i = 1; i < nthreads; ++i) pool.emplace_back(work);
            work();
            for (auto& th : pool) th.join();
        }
        if (failed.load()) throw NumericalError(failure);

        // ---- emission (deterministic order) --------------------------------
        emit("moments.json", dump_json(moments_json(cfg)));
        emit("equilibrium.csv", equilibrium_csv(mu));

        for (const DegreeResult& r : results) {
            if (r.aak_done)
                emit(fs::path("approximants") / ("aak_" + std::to_string(r.n) + ".json"),
                     dump_json(approximant_json(r.aak)));
            if (r.l2_done) {
                Approximant g;
                g.n = r.n;
                g.method = "rational-l2";
                g.sigma = r.l2_error;
                g.poles = r.l2.zeros;
                emit(fs::path("approximants") / ("rational-l2_" + std::to_string(r.n) + ".json"),
                     dump_json(approximant_json(g)));
                if (opts.trace && !r.l2_trace.empty()) {
                    emit(fs::path("trace") / ("rational-l2_" + std::to_string(r.n) + ".csv"),
                         "iter,objective,grad_norm\n" + r.l2_trace);
                }
            }
        }

        if (want_aak) {
            std::ostringstream os;
            os << "n,sigma,max_err,min_err\n";
            for (const DegreeResult& r : results) {
                if (!r.aak_done) continue;
                os << r.n << ',' << format_double(r.aak.sigma) << ','
                   << format_double(r.circle.max_err) << ',' << format_double(r.circle.min_err)
                   << '\n';
            }
            emit("circle_errors.csv", os.str());
        }

        // rates table (per method); the fit needs at least five usable degrees
        nlohmann::json fitted = nlohmann::json::object();
        {
            std::ostringstream os;
            os << "method,n,error,root_rate,predicted\n";
            const double pred = predicted_rate(mu);
            for (const std::string& method : {std::string("aak"), std::string("rational-l2")}) {
                if ((method == "aak" && !want_aak) || (method == "rational-l2" && !want_l2))
                    continue;
                std::vector<std::pair<int, double>> errs;
                for (const DegreeResult& r : results) {
                    if (method == "aak" && r.aak_done) errs.emplace_back(r.n, r.aak.sigma);
                    if (method == "rational-l2" && r.l2_done) errs.emplace_back(r.n, r.l2_error);
                }
                int usable = 0;
                for (const auto& [n, e] : errs)
                    if (e > 1e-14) ++usable;
                if (usable >= 5) {
                    RateTable table = rate_table(errs, mu.capacity);
                    fitted[method] = table.fitted_limit;
                    for (const RateRecord& rec : table.records) {
                        os << method << ',' << rec.n << ',' << format_double(rec.error) << ','
                           << format_double(rec.root_rate) << ',' << format_double(rec.predicted)
                           << '\n';
                    }
                } else {
                    fitted[method] = nullptr;
                    for (const auto& [n, e] : errs) {
                        double rr = e > 1e-14 ? std::pow(e, 1.0 / (2.0 * n)) : 0.0;
                        os << method << ',' << n << ',' << format_double(e) << ','
                           << format_double(rr) << ',' << format_double(pred) << '\n';
                    }
                }
            }
            emit("rates.csv", os.str());
        }

        // attraction audits need the whole per-degree pole family
        std::vector<AttractionRecord> attraction_aak, attraction_l2;
        nlohmann::json upper_audits = nlohmann::json::object();
        if (!spec.poles().empty()) {
            std::vector<std::pair<int, std::vector<cplx>>> fam_aak, fam_l2;
            double v_w = 0.0;
            for (const DegreeResult& r : results) {
                if (r.aak_done) {
                    fam_aak.emplace_back(r.n, r.aak.poles);
                    v_w = std::max(v_w, r.aak_angle.w_variation);
                }
                if (r.l2_done) fam_l2.emplace_back(r.n, r.l2.zeros);
            }
            if (!fam_aak.empty()) {
                attraction_aak = attraction_audit(fam_aak, spec);
                UpperAttractionAudit ua = upper_attraction_audit(attraction_aak, spec, v_w);
                upper_audits["aak"] = {{"lhs", ua.lhs},
                                       {"rhs", ua.rhs},
                                       {"v_w", ua.v_w},
                                       {"holds", ua.holds}};
            }
            if (!fam_l2.empty()) {
                attraction_l2 = attraction_audit(fam_l2, spec);
                UpperAttractionAudit ua = upper_attraction_audit(attraction_l2, spec, 0.0);
                upper_audits["rational-l2"] = {{"lhs", ua.lhs},
                                               {"rhs", ua.rhs},
                                               {"v_w", ua.v_w},
                                               {"holds", ua.holds}};
            }
        }
        auto attraction_for = [&](const std::vector<AttractionRecord>& recs, int n) {
            nlohmann::json arr = nlohmann::json::array();
            for (const AttractionRecord& rec : recs) {
                int count = 0;
                for (const auto& [nn, c] : rec.count_per_n)
                    if (nn == n) count = c;
                arr.push_back({{"eta", {rec.eta.real(), rec.eta.imag()}}, {"count", count}});
            }
            return arr;
        };

        nlohmann::json diag;
        if (!upper_audits.empty()) diag["upper_attraction"] = upper_audits;
        diag["records"] = nlohmann::json::array();
        for (const DegreeResult& r : results) {
            if (r.aak_done) {
                nlohmann::json rec;
                rec["method"] = "aak";
                rec["n"] = r.n;
                rec["sigma"] = r.aak.sigma;
                rec["ks_distance"] = r.aak_diag.ks_distance;
                rec["outliers"] = static_cast<int>(r.aak_diag.outliers.size());
                rec["max_imag_near"] = r.aak_diag.max_imag_near;
                rec["attraction"] = attraction_for(attraction_aak, r.n);
                rec["angle_bound"] = {{"lhs", r.aak_angle.lhs},
                                      {"rhs", r.aak_angle.rhs},
                                      {"holds", r.aak_angle.holds}};
                rec["orthogonality_residual"] = r.aak_orth;
                rec["circle"] = {{"max", r.circle.max_err},
                                 {"min", r.circle.min_err},
                                 {"mean", r.circle.mean_err}};
                diag["records"].push_back(rec);
            }
            if (r.l2_done) {
                nlohmann::json rec;
                rec["method"] = "rational-l2";
                rec["n"] = r.n;
                rec["sigma"] = r.l2_error;
                rec["objective"] = r.l2.objective;
                rec["grad_norm"] = r.l2.grad_norm;
                rec["converged"] = r.l2.converged;
                rec["refined"] = r.l2.refined;
                rec["ks_distance"] = r.l2_diag.ks_distance;
                rec["outliers"] = static_cast<int>(r.l2_diag.outliers.size());
                rec["max_imag_near"] = r.l2_diag.max_imag_near;
                rec["attraction"] = attraction_for(attraction_l2, r.n);
                rec["angle_bound"] = {{"lhs", r.l2_angle.lhs},
                                      {"rhs", r.l2_angle.rhs},
                                      {"holds", r.l2_angle.holds}};
                rec["orthogonality_residual"] = r.l2_orth;
                rec["interpolation_residual"] = r.l2_interp;
                diag["records"].push_back(rec);
            }
        }

        // field probes against the potential prediction, largest degree only
        if (!cfg.probes.empty()) {
            diag["field"] = nlohmann::json::array();
            for (auto it = results.rbegin(); it != results.rend(); ++it) {
                if (it->aak_done) {
                    nlohmann::json f;
                    f["method"] = "aak";
                    f["n"] = it->n;
                    f["probes"] = nlohmann::json::array();
                    for (const FieldProbe& p :
                         capacity_convergence_field(spec, it->aak, mu, cfg.probes)) {
                        f["probes"].push_back({{"z", {p.z.real(), p.z.imag()}},
                                               {"observed", p.observed},
                                               {"predicted", p.predicted},
                                               {"near_reflected_support", p.near_reflected_support}});
                    }
                    diag["field"].push_back(f);
                    break;
                }
            }
            for (auto it = results.rbegin(); it != results.rend(); ++it) {
                if (it->l2_done) {
                    Approximant g;
                    g.n = it->n;
                    g.method = "rational-l2";
                    g.sigma = it->l2_error;
                    g.poles = it->l2.zeros;
                    g.numerator = it->l2.numerator;
                    g.denominator = it->l2.denominator;
                    nlohmann::json f;
                    f["method"] = "rational-l2";
                    f["n"] = it->n;
                    f["probes"] = nlohmann::json::array();
                    for (const FieldProbe& p : capacity_convergence_field(spec, g, mu, cfg.probes)) {
                        f["probes"].push_back({{"z", {p.z.real(), p.z.imag()}},
                                               {"observed", p.observed},
                                               {"predicted", p.predicted},
                                               {"near_reflected_support", p.near_reflected_support}});
                    }
                    diag["field"].push_back(f);
                    break;
                }
            }
        }
        emit("diagnostics.json", dump_json(diag));

        // summary with audit verdicts
        nlohmann::json summary;
        summary["capacity"] = mu.capacity;
        summary["potential_constant"] = mu.potential_constant;
        summary["predicted_rate"] = predicted_rate(mu);
        summary["fitted_rate"] = fitted;
        summary["degrees"] = cfg.degrees;
        summary["methods"] = cfg.methods;
        summary["truncation_N"] = cfg.truncation_N;
        summary["panels_M"] = cfg.panels_M;
        summary["seed"] = cfg.seed;
        nlohmann::json skipped = nlohmann::json::array();
        bool angle_all = true;
        double orth_max = 0.0, circle_flat = 0.0;
        for (const DegreeResult& r : results) {
            if (r.aak_degenerate) skipped.push_back(r.n);
            if (r.aak_done) {
                angle_all = angle_all && r.aak_angle.holds;
                orth_max = std::max(orth_max, r.aak_orth);
                if (r.aak.sigma > 0.0)
                    circle_flat = std::max(circle_flat,
                                           (r.circle.max_err - r.circle.min_err) / r.aak.sigma);
            }
            if (r.l2_done) {
                angle_all = angle_all && r.l2_angle.holds;
                // the certificate binds converged points; non-converged ones
                // are flagged in the per-degree records
                if (r.l2.converged) orth_max = std::max(orth_max, r.l2_orth);
            }
        }
        bool attraction_ok = true;
        bool have_attraction = !attraction_aak.empty() || !attraction_l2.empty();
        for (const AttractionRecord& rec : attraction_aak) attraction_ok &= rec.lower_ok;
        for (const AttractionRecord& rec : attraction_l2) attraction_ok &= rec.lower_ok;
        nlohmann::json audits;
        audits["angle_bound"] = angle_all;
        audits["attraction_lower"] = have_attraction ? nlohmann::json(attraction_ok)
                                                     : nlohmann::json(nullptr);
        audits["orthogonality_max_residual"] = orth_max;
        audits["orthogonality_ok"] = orth_max <= 1e-6;
        audits["equilibrium_mass_error"] = std::abs(mu.mass() - 1.0);
        audits["equilibrium_flatness"] = equilibrium_flatness(mu);
        audits["circle_flatness_max"] = circle_flat;
        summary["audits"] = audits;
        summary["skipped_degenerate"] = skipped;
        emit("summary.json", dump_json(summary));
        outcome.summary = summary;
        return outcome;
    } catch (...) {
        std::error_code ec;
        for (const fs::path& p : written) fs::remove(p, ec);
        throw;
    }
}

}  // namespace aaklab
