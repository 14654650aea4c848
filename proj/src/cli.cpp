#include "fkpp/cli.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>

#include "fkpp/diagnostics.hpp"
#include "fkpp/io.hpp"
#include "fkpp/nonlocal_operator.hpp"
#include "fkpp/quadrature.hpp"
#include "fkpp/speed_finder.hpp"

namespace fkpp {

namespace fs = std::filesystem;

namespace {

std::string fmtg(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

// spectral symbol constant of the unnormalized kernel by quadrature:
// c(s) = int over R of (1 - cos z)/|z|^{1+2s} dz
double spectral_constant(double s) {
    const double two_s = 2.0 * s;
    auto f = [&](double z) { return (1.0 - std::cos(z)) * std::pow(z, -1.0 - two_s); };
    const double cutoff = 1e4;
    double core = quad::with_left_singularity(f, 0.0, M_PI, 1e-12) +
                  quad::semi_infinite(f, M_PI, 1e-12, cutoff - M_PI);
    // analytic remainder of the non-oscillatory part beyond the cutoff
    double tail = std::pow(cutoff, -two_s) / two_s;
    return 2.0 * (core + tail);
}

double cos_oracle_error(FractionalOrder s, double span, int n) {
    GridSpec grid(-span, span, n, TailModel::constant(0.0), TailModel::constant(0.0));
    std::vector<double> u(n);
    for (int i = 0; i < n; ++i) u[i] = std::cos(grid.point(i));
    FrontProfile profile(grid, u, s);
    std::vector<double> lap = frac_laplacian_apply(profile);
    double cs = spectral_constant(s.value());
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        if (std::abs(grid.point(i)) > 0.5 * span) continue;
        worst = std::max(worst, std::abs(lap[i] - cs * u[i]));
    }
    return worst / cs;
}

std::vector<std::pair<std::string, std::string>> report_rows(const RunConfig& cfg,
                                                             const ContinuationResult& res) {
    const DiagnosticsReport& d = res.report;
    std::vector<std::pair<std::string, std::string>> rows;
    rows.emplace_back("kind", cfg.kind);
    rows.emplace_back("p", fmt17(cfg.p));
    rows.emplace_back("scale", fmt17(cfg.scale));
    rows.emplace_back("theta", fmt17(cfg.theta));
    rows.emplace_back("s", fmt17(cfg.s));
    rows.emplace_back("mu", fmt17(cfg.mu));
    rows.emplace_back("epsilon_final", fmt17(res.front.epsilon));
    rows.emplace_back("right_extensions", std::to_string(res.right_extensions));
    for (const auto& st : res.stages) {
        rows.emplace_back("stage_eps_" + fmtg(st.epsilon),
                          st.normalized ? "vartheta=" + fmt17(st.vartheta) : "no_normalization");
    }
    rows.emplace_back("speed_identity_rel_err", fmt17(d.speed_identity_rel_err));
    rows.emplace_back("decay_slope", fmt17(d.decay_slope));
    rows.emplace_back("decay_slope_target", fmt17(d.decay_slope_target));
    rows.emplace_back("tail_limit_estimate", fmt17(d.tail_limit_estimate));
    rows.emplace_back("tail_limit_spread", fmt17(d.tail_limit_spread));
    rows.emplace_back("l2_du", fmt17(d.l2.du));
    rows.emplace_back("l2_d2u", fmt17(d.l2.d2u));
    rows.emplace_back("l2_fraclap", fmt17(d.l2.fraclap_u));
    rows.emplace_back("l2_one_minus_u_right", fmt17(d.l2.one_minus_u_right));
    rows.emplace_back("energy_identity_rel_defect", fmt17(d.l2.identity_rel_defect));
    rows.emplace_back("invariants_ok", d.invariants_ok ? "true" : "false");
    rows.emplace_back("identity_ok", d.identity_ok ? "true" : "false");
    rows.emplace_back("decay_ok", d.decay_ok ? "true" : "false");
    rows.emplace_back("tail_ok", d.tail_ok ? "true" : "false");
    rows.emplace_back("pass", d.pass ? "true" : "false");
    if (!d.pass) rows.emplace_back("fail_reason", d.fail_reason);
    return rows;
}

}  // namespace

int cmd_op_test(const RunConfig& cfg, const fs::path& out_dir) {
    try {
        ensure_dir(out_dir);
        std::vector<OpTestRow> rows;
        FractionalOrder s = cfg.order();

        {
            // annihilation of constants by the full operator
            const double c = 0.37;
            GridSpec g(-60.0, 60.0, 512, TailModel::constant(c), TailModel::constant(c));
            FrontProfile prof(g, std::vector<double>(512, c), s);
            std::vector<double> lv = operator_apply(prof, cfg.epsilon, cfg.mu, 0.0);
            double worst = 0.0;
            for (double v : lv) worst = std::max(worst, std::abs(v));
            rows.push_back({"constant_annihilation", "sup_abs", worst, 1e-12, worst < 1e-12});
        }
        {
            double rel = cos_oracle_error(s, 100.0, 2048);
            rows.push_back({"cos_spectral_oracle", "rel_sup_err", rel, 1e-3, rel < 1e-3});
        }
        {
            double e1 = cos_oracle_error(s, 100.0, 512);
            double e2 = cos_oracle_error(s, 100.0, 1024);
            double e3 = cos_oracle_error(s, 100.0, 2048);
            double rate = 0.5 * (std::log2(e1 / e2) + std::log2(e2 / e3));
            double threshold = 2.0 - 2.0 * cfg.s - 0.1;
            rows.push_back({"refinement_rate", "observed_rate", rate, threshold,
                            rate >= threshold});
        }
        write_op_test_csv(out_dir / "op_test.csv", rows);
        for (const auto& r : rows)
            if (!r.pass) return 1;
        return 0;
    } catch (const IoError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
}

int cmd_solve_front(const RunConfig& cfg, const fs::path& out_dir) {
    try {
        ensure_dir(out_dir);
        if (cfg.kind != "kpp") {
            std::cerr << "solve-front requires kind=kpp\n";
            return 2;
        }
        Nonlinearity f = cfg.nonlinearity();
        try {
            ContinuationResult res = epsilon_continuation_front(
                f, cfg.order(), cfg.mu, cfg.epsilon_schedule, cfg.grid(), cfg.solve_params());
            write_front_csv(out_dir / "front.csv", res.front);
            write_plot_script(out_dir / "plot_front.gp", "front.csv");
            write_report(out_dir / "report.txt", report_rows(cfg, res));
            return res.report.pass ? 0 : 1;
        } catch (const ContinuationError& ce) {
            std::vector<std::pair<std::string, std::string>> rows;
            rows.emplace_back("fail_reason", "no_normalization");
            rows.emplace_back("mu", fmt17(cfg.mu));
            for (const auto& st : ce.stages)
                rows.emplace_back("stage_eps_" + fmtg(st.epsilon),
                                  st.normalized ? "vartheta=" + fmt17(st.vartheta)
                                                : "no_normalization");
            write_report(out_dir / "report.txt", rows);
            return 1;
        } catch (const IterationError& ie) {
            write_report(out_dir / "report.txt", {{"fail_reason", "iteration_error"},
                                                  {"detail", ie.what()}});
            return 1;
        }
    } catch (const IoError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
}

int cmd_combustion_speed(const RunConfig& cfg, const fs::path& out_dir) {
    try {
        ensure_dir(out_dir);
        if (cfg.kind != "combustion") {
            std::cerr << "combustion-speed requires kind=combustion\n";
            return 2;
        }
        Nonlinearity f = cfg.nonlinearity();
        try {
            CombustionSpeedResult r = combustion_speed(f, cfg.order(), cfg.epsilon, cfg.grid(),
                                                       cfg.solve_params());
            write_speeds_csv(out_dir / "speeds.csv",
                             {{cfg.sigma, cfg.epsilon, r.mu_c, r.identity_rel_err}});
            write_front_csv(out_dir / "front.csv", r.profile);
            write_report(out_dir / "report.txt",
                         {{"sigma", fmt17(cfg.sigma)},
                          {"epsilon", fmt17(cfg.epsilon)},
                          {"mu_c", fmt17(r.mu_c)},
                          {"identity_rel_err", fmt17(r.identity_rel_err)},
                          {"pass", "true"}});
            return 0;
        } catch (const BracketError& be) {
            write_report(out_dir / "report.txt",
                         {{"fail_reason", "bracket_error"}, {"detail", be.what()}});
            return 1;
        } catch (const std::runtime_error& re) {
            write_report(out_dir / "report.txt",
                         {{"fail_reason", "identity_error"}, {"detail", re.what()}});
            return 1;
        }
    } catch (const IoError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
}

int cmd_critical_speed(const RunConfig& cfg, const fs::path& out_dir) {
    try {
        ensure_dir(out_dir);
        if (cfg.kind != "kpp") {
            std::cerr << "critical-speed requires kind=kpp (the combustion family is derived)\n";
            return 2;
        }
        Nonlinearity f = cfg.nonlinearity();
        std::vector<SpeedRow> rows;
        std::vector<std::pair<std::string, std::string>> summary;
        double liminf_proxy = std::numeric_limits<double>::infinity();
        bool all_ok = true;
        try {
            for (double eps : cfg.epsilon_schedule) {
                SpeedEstimate est = estimate_mu_star(f, cfg.order(), eps, cfg.sigma_schedule,
                                                     cfg.grid(), cfg.solve_params());
                for (size_t i = 0; i < est.mu_values.size(); ++i)
                    rows.push_back({est.sigma_schedule[i], eps, est.mu_values[i],
                                    est.identity_errs[i]});
                bool bound_ok = est.extrapolated_mu_star <= est.nu_bound + 1e-9;
                all_ok = all_ok && bound_ok;
                liminf_proxy = std::min(liminf_proxy, est.extrapolated_mu_star);
                std::string tag = "eps_" + fmtg(eps);
                summary.emplace_back("extrapolated_mu_star_" + tag,
                                     fmt17(est.extrapolated_mu_star));
                summary.emplace_back("fit_exponent_q_" + tag, fmt17(est.fit_exponent_q));
                summary.emplace_back("fit_residual_" + tag, fmt17(est.fit_residual));
                summary.emplace_back("nu_bound_" + tag, fmt17(est.nu_bound));
                summary.emplace_back("bound_ok_" + tag, bound_ok ? "true" : "false");
            }
            summary.emplace_back("ordering_ok", "true");
            summary.emplace_back("mu_double_star_proxy", fmt17(liminf_proxy));
            summary.emplace_back("pass", all_ok ? "true" : "false");
            write_speeds_csv(out_dir / "speeds.csv", rows);
            write_report(out_dir / "speed_estimate.txt", summary);
            return all_ok ? 0 : 1;
        } catch (const OrderingError& oe) {
            write_speeds_csv(out_dir / "speeds.csv", rows);
            write_report(out_dir / "speed_estimate.txt",
                         {{"ordering_ok", "false"},
                          {"fail_reason", "ordering_error"},
                          {"detail", oe.what()}});
            return 1;
        } catch (const BracketError& be) {
            write_report(out_dir / "speed_estimate.txt",
                         {{"fail_reason", "bracket_error"}, {"detail", be.what()}});
            return 1;
        }
    } catch (const IoError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
}

int cmd_diagnose(const RunConfig& cfg, const fs::path& out_dir, const fs::path& front_csv) {
    try {
        ensure_dir(out_dir);
        FrontSamples samples = read_front_csv(front_csv);
        GridSpec g(samples.x.front(), samples.x.back(), static_cast<int>(samples.x.size()),
                   TailModel::constant(0.0), TailModel::constant(1.0));
        FrontProfile prof(g, samples.phi, cfg.order());
        prof.mu = cfg.mu;
        prof.epsilon = cfg.epsilon;
        prof.normalization_value = cfg.theta;
        if (cfg.kind == "kpp") {
            TailModel t = fit_power_tail(prof);
            GridSpec tagged = g.with_left_tail(t);
            prof = FrontProfile(tagged, samples.phi, cfg.order());
            prof.mu = cfg.mu;
            prof.epsilon = cfg.epsilon;
            prof.normalization_value = cfg.theta;
        }
        DiagnosticsReport rep = run_diagnostics(prof, cfg.nonlinearity());
        std::vector<std::pair<std::string, std::string>> rows;
        rows.emplace_back("speed_identity_rel_err", fmt17(rep.speed_identity_rel_err));
        rows.emplace_back("decay_slope", fmt17(rep.decay_slope));
        rows.emplace_back("decay_slope_target", fmt17(rep.decay_slope_target));
        rows.emplace_back("tail_limit_estimate", fmt17(rep.tail_limit_estimate));
        rows.emplace_back("tail_limit_spread", fmt17(rep.tail_limit_spread));
        rows.emplace_back("l2_du", fmt17(rep.l2.du));
        rows.emplace_back("l2_d2u", fmt17(rep.l2.d2u));
        rows.emplace_back("l2_fraclap", fmt17(rep.l2.fraclap_u));
        rows.emplace_back("l2_one_minus_u_right", fmt17(rep.l2.one_minus_u_right));
        rows.emplace_back("energy_identity_rel_defect", fmt17(rep.l2.identity_rel_defect));
        rows.emplace_back("pass", rep.pass ? "true" : "false");
        if (!rep.pass) rows.emplace_back("fail_reason", rep.fail_reason);
        for (const auto& [k, v] : rows) std::cout << k << '=' << v << '\n';
        write_report(out_dir / "report.txt", rows);
        return rep.pass ? 0 : 1;
    } catch (const IoError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
}

int cmd_sweep(const RunConfig& cfg, const fs::path& out_dir) {
    try {
        ensure_dir(out_dir);
        std::vector<std::pair<std::string, std::string>> summary;
        if (cfg.kind == "combustion") {
            for (double sigma : cfg.sigma_schedule)
                for (double eps : cfg.epsilon_schedule) {
                    RunConfig point = cfg;
                    point.sigma = sigma;
                    point.epsilon = eps;
                    fs::path sub = out_dir / ("sigma_" + fmtg(sigma) + "_eps_" + fmtg(eps));
                    int code = cmd_combustion_speed(point, sub);
                    summary.emplace_back(sub.filename().string(), std::to_string(code));
                }
        } else {
            if (cfg.mu_list.empty()) {
                std::cerr << "sweep with kind=kpp requires mu_list\n";
                return 2;
            }
            for (double mu : cfg.mu_list)
                for (double eps : cfg.epsilon_schedule) {
                    RunConfig point = cfg;
                    point.mu = mu;
                    point.epsilon_schedule = {eps};
                    fs::path sub = out_dir / ("mu_" + fmtg(mu) + "_eps_" + fmtg(eps));
                    int code = cmd_solve_front(point, sub);
                    summary.emplace_back(sub.filename().string(), std::to_string(code));
                }
        }
        write_report(out_dir / "summary.txt", summary);
        return 0;
    } catch (const IoError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
}

}  // namespace fkpp
