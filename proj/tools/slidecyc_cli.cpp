// Command-line pipeline: load model config, certify the two-fold assumptions,
// build and classify the sliding cycle, evaluate the slow divergence integral,
// emit the cyclicity verdict, and (optionally) run simulation sweeps.
//
// Exit codes: 0 success, 1 bad usage/config, 2 certificate failure,
// 3 numerical failure.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "slidecyc/config.hpp"
#include "slidecyc/cycle.hpp"
#include "slidecyc/cyclicity.hpp"
#include "slidecyc/filippov.hpp"
#include "slidecyc/pwl.hpp"
#include "slidecyc/sdi.hpp"
#include "slidecyc/simulator.hpp"

using nlohmann::json;
using namespace slidecyc;

namespace {

constexpr const char* kToolVersion = "1.0.0";
constexpr int kSchemaVersion = 1;

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json json_tolerances(const Tolerances& t) {
    return json{{"tau_sw", t.tau_sw},
                {"tau_mult", t.tau_mult},
                {"tau_margin", t.tau_margin},
                {"quad_rel", t.quad_rel},
                {"ode_abs", t.ode_abs},
                {"ode_rel", t.ode_rel},
                {"event_tol", t.event_tol},
                {"grid_nodes", t.grid_nodes},
                {"m_max", t.m_max},
                {"t_max", t.t_max},
                {"box", t.box},
                {"delta_hausdorff", t.delta_hausdorff}};
}

json json_certificate(const TwoFoldCertificate& cert) {
    json conds = json::array();
    for (const auto& c : cert.conditions)
        conds.push_back({{"name", c.name}, {"holds", c.holds}, {"margin", c.margin}});
    return json{{"passes", cert.passes}, {"nu", cert.nu}, {"conditions", conds}};
}

json json_zero(const SlidingZero& z) {
    const char* pos = z.position == ZeroPosition::CornerMinus  ? "corner-"
                      : z.position == ZeroPosition::CornerPlus ? "corner+"
                                                               : "interior";
    return json{{"x0", z.x0},
                {"multiplicity", z.multiplicity},
                {"at_least_m_max", z.at_least_m_max},
                {"position", pos},
                {"even_parity", z.even_parity}};
}

json json_sdi_value(const SdiValue& v) {
    json j{{"divergent", v.divergent}, {"error_estimate", v.error_estimate}};
    if (v.divergent)
        j["blamed_zero"] = v.blamed_zero;
    else
        j["value"] = v.value;
    return j;
}

void write_csv(const std::filesystem::path& path, const std::string& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    out << header << "\n";
    for (const auto& r : rows) {
        for (size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << fmt17(r[i]);
        out << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sliding-cycle cyclicity analyzer"};
    std::string config_path, out_dir = ".", phi_override, tol_path;
    bool simulate = false;
    std::vector<double> eps_grid{0.1, 0.05};
    std::vector<double> lambda_grid{-0.2, -0.15, -0.1, -0.05, 0.0, 0.05, 0.1, 0.15, 0.2};
    int jobs = 1;
    app.add_option("config", config_path, "model config file")->required();
    app.add_flag("--simulate", simulate, "run limit-cycle counting sweeps");
    app.add_option("--eps-grid", eps_grid, "epsilon sweep values");
    app.add_option("--lambda-grid", lambda_grid, "lambda_tilde sweep values");
    app.add_option("--phi", phi_override, "regularization family: arctan|algebraic");
    app.add_option("--tolerances", tol_path, "tolerance overrides config file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--jobs", jobs, "sweep parallelism")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    Problem prob;
    try {
        prob = load_problem(Config::parse_file(config_path));
        if (!phi_override.empty()) prob.reg = Regularization::by_name(phi_override);
        if (!tol_path.empty()) apply_tolerances(Config::parse_file(tol_path), prob.tol);
        std::filesystem::create_directories(out_dir);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }
    const std::filesystem::path out(out_dir);

    json report;
    report["schema_version"] = kSchemaVersion;
    report["tool_version"] = kToolVersion;
    report["config_file"] = config_path;
    report["regularization"] = prob.reg.name();
    report["context"] = {{"eps", prob.ctx.eps},
                         {"lambda_tilde", prob.ctx.lambda_tilde},
                         {"s_max", prob.ctx.s_max}};
    report["tolerances"] = json_tolerances(prob.tol);
    report["eta_plus_requested"] = prob.eta_plus;
    if (prob.pwl) {
        const auto& k = *prob.pwl;
        report["model"] = {{"kind", "pwl"},       {"d_minus", k.d_minus}, {"t_minus", k.t_minus},
                           {"b_plus", k.b_plus},  {"a11", k.a11},         {"a12", k.a12},
                           {"a21", k.a21},        {"a22", k.a22}};
    } else {
        report["model"] = {{"kind", "polynomial"}};
    }
    auto flush_report = [&]() {
        std::ofstream o(out / "report.json");
        o << report.dump(2) << "\n";
    };

    // Stage 1: assumption certificate.
    TwoFoldCertificate cert;
    try {
        cert = certify_two_fold(prob.model, prob.tol);
    } catch (const std::exception& e) {
        std::cerr << "numerical failure in certificate: " << e.what() << "\n";
        return 3;
    }
    report["certificate"] = json_certificate(cert);
    if (!cert.passes) {
        std::cerr << "assumption certificate failed:\n";
        for (const auto& c : cert.conditions)
            if (!c.holds) std::cerr << "  violated: " << c.name << " (margin " << c.margin << ")\n";
        flush_report();
        return 2;
    }

    // Stage 2: cycle, case, integrals, verdict.
    try {
        SlidingCycle cycle = build_cycle(prob.model, prob.eta_plus, {prob.tol, true});
        CaseLabel label = classify_case(prob.model, cycle, prob.tol);
        report["cycle"] = {{"eta_plus", cycle.eta_plus},
                           {"eta_minus", cycle.eta_minus},
                           {"s0", cycle.s0},
                           {"transit_time", cycle.half_map.transit_time},
                           {"Pi_prime", cycle.half_map.derivative},
                           {"Pi_prime_agreement", cycle.half_map.derivative_agreement}};
        json zeros = json::array();
        for (const auto& z : cycle.zeros) zeros.push_back(json_zero(z));
        report["cycle"]["zeros"] = zeros;
        report["case"] = {{"tag", to_string(label.tag)}, {"detail", label.detail}};

        std::optional<SdiEvaluation> sdi;
        try {
            sdi = sdi_evaluate(prob.model, prob.reg, prob.eta_plus, prob.tol);
            report["sdi"] = {{"I", json_sdi_value(sdi->I)},
                             {"I_minus", json_sdi_value(sdi->I_minus)},
                             {"I_plus", json_sdi_value(sdi->I_plus)},
                             {"dIdx", sdi->dIdx}};
            if (sdi->mult_I_at_eta_plus) report["sdi"]["mult_I"] = *sdi->mult_I_at_eta_plus;
            if (sdi->mult_dIdx_at_eta_plus)
                report["sdi"]["mult_dIdx"] = *sdi->mult_dIdx_at_eta_plus;
        } catch (const std::exception& e) {
            report["sdi"] = {{"error", e.what()}};
        }

        std::optional<CornerSaddleData> saddle;
        if (label.tag == CaseTag::VII || label.tag == CaseTag::VIII) {
            saddle = corner_saddle_data(prob.model, prob.reg, cycle, prob.ctx.eps, prob.tol);
            report["corner_saddle"] = {{"rho_minus", saddle->rho_minus},
                                       {"rho_plus", saddle->rho_plus}};
            auto jval = [](const RhoValidation& v) {
                return json{{"measured_ratio", v.measured_ratio},
                            {"predicted", v.predicted},
                            {"rel_err", v.rel_err},
                            {"ok", v.ok}};
            };
            if (saddle->validated_minus)
                report["corner_saddle"]["validated_minus"] = jval(*saddle->validated_minus);
            if (saddle->validated_plus)
                report["corner_saddle"]["validated_plus"] = jval(*saddle->validated_plus);
        }

        CyclicityVerdict verdict = cyclicity_bound(label, cycle, sdi, saddle, prob.tol);
        const char* stab = verdict.stability == Stability::Attracting   ? "attracting"
                           : verdict.stability == Stability::Repelling ? "repelling"
                                                                       : "unspecified";
        report["verdict"] = {{"bound", verdict.bound_string()},
                             {"stability", stab},
                             {"theorem", verdict.theorem},
                             {"inputs_used", verdict.inputs_used},
                             {"explanation", verdict.explanation}};

        // CSV artifacts.
        {
            std::vector<std::vector<double>> rows;
            const int n = 401;
            for (int i = 0; i < n; ++i) {
                const double x =
                    cycle.eta_minus + (cycle.eta_plus - cycle.eta_minus) * i / (n - 1);
                rows.push_back({x, sliding_vf(prob.model, x, prob.tol)});
            }
            write_csv(out / "sliding_field.csv", "x,X_sl", rows);
        }
        {
            std::vector<std::vector<double>> rows;
            const int n = 101;
            for (int i = 1; i <= n; ++i) {
                const double x = cycle.eta_plus * i / n;
                double I = 0, dIdx = 0, divflag = 0;
                try {
                    SdiValue v = sdi_I(prob.model, prob.reg, x, prob.tol);
                    divflag = v.divergent ? 1.0 : 0.0;
                    if (v.finite()) I = v.value;
                    dIdx = sdi_dIdx(prob.model, prob.reg, x, prob.tol);
                } catch (const std::exception&) {
                    divflag = -1.0;  // not evaluable at this x
                }
                rows.push_back({x, I, dIdx, divflag});
            }
            write_csv(out / "sdi_curve.csv", "x,I,dIdx,divergent", rows);
        }
        {
            std::vector<std::vector<double>> rows;
            for (const auto& p : cycle.half_map.orbit) rows.push_back({p.t, p.x, p.y});
            write_csv(out / "orbit.csv", "t,x,y", rows);
        }

        // Stage 3: optional simulation sweeps.
        if (simulate) {
            const auto gamma = gamma_polyline(cycle);
            struct Job {
                double eps, lam;
            };
            std::vector<Job> jobs_list;
            for (double e : eps_grid)
                for (double l : lambda_grid) jobs_list.push_back({e, l});
            std::vector<json> results(jobs_list.size());
            std::atomic<size_t> next{0};
            std::mutex rm_mutex;
            std::vector<std::vector<double>> rm_rows;
            auto worker = [&]() {
                for (;;) {
                    const size_t i = next.fetch_add(1);
                    if (i >= jobs_list.size()) return;
                    const Job jb = jobs_list[i];
                    ReturnMapSpec spec;
                    spec.ctx = prob.ctx;
                    spec.ctx.eps = jb.eps;
                    spec.ctx.lambda_tilde = jb.lam;
                    spec.sigma1 = cycle.s0 * 1.2;
                    spec.sigma2 = cycle.s0 * 0.8;
                    json r{{"eps", jb.eps}, {"lambda_tilde", jb.lam}};
                    try {
                        LimitCycleReport rep = count_limit_cycles(prob.model, prob.reg, spec,
                                                                  gamma, 64, prob.tol);
                        r["count"] = rep.count;
                        r["evaluated"] = rep.evaluated;
                        json fps = json::array();
                        for (const auto& fp : rep.fixed_points)
                            fps.push_back({{"y_star", fp.y_star},
                                           {"slope", fp.slope},
                                           {"attracting", fp.attracting}});
                        r["fixed_points"] = fps;
                        // Return-map samples for plotting (coarse grid).
                        for (int k = 0; k < 17; ++k) {
                            const double y0 =
                                spec.sigma1 + (spec.sigma2 - spec.sigma1) * k / 16.0;
                            try {
                                ReturnMapSample s =
                                    return_map(prob.model, prob.reg, spec, y0, gamma, prob.tol);
                                std::lock_guard<std::mutex> lk(rm_mutex);
                                rm_rows.push_back({jb.eps, jb.lam, y0, s.P, s.slope});
                            } catch (const std::exception&) {
                            }
                        }
                    } catch (const std::exception& e) {
                        r["error"] = e.what();
                    }
                    results[i] = std::move(r);
                }
            };
            std::vector<std::thread> pool;
            const int nthreads = std::max(1, std::min<int>(jobs, (int)jobs_list.size()));
            for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
            for (auto& th : pool) th.join();
            std::sort(rm_rows.begin(), rm_rows.end());
            write_csv(out / "return_map.csv", "eps,lambda_tilde,y0,P,slope", rm_rows);
            report["simulation"] = results;
        }

        flush_report();
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        flush_report();
        return 3;
    }
    return 0;
}
