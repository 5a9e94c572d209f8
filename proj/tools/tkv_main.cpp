// Command-line front end: batch simulation, spectrum extraction, resolvent
// scans, and property-suite verification, all driven by a JSON config.
// Output is CSV with '#'-prefixed metadata lines. Exit codes: 0 success,
// 1 verification-suite failure, 2 configuration error, 3 numerical failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tkv/beam.hpp"
#include "tkv/config.hpp"
#include "tkv/evolve.hpp"
#include "tkv/generator.hpp"
#include "tkv/resolvent.hpp"
#include "tkv/rng.hpp"
#include "tkv/spectra.hpp"
#include "tkv/types.hpp"

namespace {

using tkv::cplx;

constexpr const char* kVersion = "1.0.0";

struct NumericalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt(double x) {
    if (!std::isfinite(x)) throw NumericalFailure("non-finite number in output");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Complex scalar in one CSV-safe token: re+im*i with no comma.
std::string fmt_cplx(cplx z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw NumericalFailure("non-finite number in output");
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.real(), z.imag());
    return buf;
}

void write_preamble(std::ostream& os, const tkv::config::RunConfig& cfg,
                    const char* command) {
    os << "# tool_version," << kVersion << "\n";
    os << "# command," << command << "\n";
    os << "# seed," << cfg.seed << "\n";
    os << "# config," << cfg.echo.dump() << "\n";
}

bool spans_whole_beam(const tkv::config::RunConfig& cfg) {
    return cfg.damping_kind == "constant" && cfg.damping.support_lo == 0.0 &&
           cfg.damping.support_hi == cfg.beam.length;
}

// --- simulate ---------------------------------------------------------------

int cmd_simulate(const tkv::config::RunConfig& cfg, std::ostream& os) {
    tkv::DiscreteGenerator gen(cfg.beam, cfg.damping, cfg.bc, cfg.n_cells,
                               cfg.damping_kind == "zero");
    const tkv::GridState u0 =
        tkv::make_modal_state(cfg.beam, cfg.bc, cfg.n_cells, cfg.init_n_max,
                              cfg.init_amplitude_power, cfg.seed);
    const double dt = cfg.dt > 0.0 ? cfg.dt : tkv::default_dt(cfg.beam, cfg.n_cells);
    const tkv::EnergyTrace trace = tkv::simulate(gen, u0, dt, cfg.t_final, cfg.stride);

    write_preamble(os, cfg, "simulate");
    os << "t,E,E_t\n";
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        const double t = trace.times[i], e = trace.energies[i];
        os << fmt(t) << ',' << fmt(e) << ',' << fmt(e * t) << "\n";
    }

    const double t_lo = cfg.fit_t_hi > 0.0 ? cfg.fit_t_lo : cfg.t_final / 10.0;
    const double t_hi = cfg.fit_t_hi > 0.0 ? cfg.fit_t_hi : cfg.t_final;
    const tkv::DecayFit fit = tkv::fit_decay_exponent(trace, t_lo, t_hi);
    os << "# fit_window," << fmt(t_lo) << ' ' << fmt(t_hi) << "\n";
    os << "# fitted_p," << fmt(fit.p) << "\n";
    os << "# fit_prefactor," << fmt(fit.C) << "\n";
    os << "# fit_r2," << fmt(fit.r2) << "\n";
    os << "# power_law," << (fit.power_law ? "true" : "false") << "\n";
    os << "# graph_norm0," << fmt(trace.graph_norm0) << "\n";
    os << "# max_mean_drift," << fmt(trace.max_mean_drift) << "\n";
    return 0;
}

// --- spectrum ---------------------------------------------------------------

int cmd_spectrum(const tkv::config::RunConfig& cfg, std::ostream& os) {
    write_preamble(os, cfg, "spectrum");
    os << "branch,n,re_lambda,im_lambda,residual,prediction_error,prediction,"
          "status\n";
    if (cfg.n_lo > cfg.n_hi) return 0;  // empty range: header-only table

    const tkv::spectra::SpectralConfig scfg{cfg.c};
    std::vector<tkv::spectra::RootRecord> records;
    for (int branch : cfg.branches) {
        auto part = tkv::spectra::find_roots(cfg.n_lo, cfg.n_hi, branch, scfg,
                                             cfg.threads, cfg.verify_boxes,
                                             cfg.case_override);
        records.insert(records.end(), part.begin(), part.end());
    }
    std::sort(records.begin(), records.end(),
              [](const tkv::spectra::RootRecord& a,
                 const tkv::spectra::RootRecord& b) {
                  return a.branch != b.branch ? a.branch < b.branch : a.n < b.n;
              });

    std::size_t n_converged = 0;
    for (const auto& r : records) {
        const cplx lam = r.converged ? r.lambda : r.prediction;
        os << r.branch << ',' << r.n << ',' << fmt(lam.real()) << ','
           << fmt(lam.imag()) << ',' << fmt(r.residual) << ','
           << fmt(std::abs(r.lambda - r.prediction)) << ','
           << fmt_cplx(r.prediction) << ','
           << (r.converged ? "converged" : "unresolved") << "\n";
        if (r.converged) ++n_converged;
    }
    if (!records.empty() && n_converged == 0)
        throw NumericalFailure("no root converged in the requested range");
    return 0;
}

// --- resolvent ---------------------------------------------------------------

std::vector<double> scan_frequencies(const tkv::config::RunConfig& cfg) {
    std::string mode = cfg.res_frequencies;
    if (mode == "auto")
        mode = spans_whole_beam(cfg) &&
                       cfg.bc == tkv::BoundaryConditions::DirichletNeumann
                   ? "blowup"
                   : "branch1";
    std::vector<double> omegas;
    const tkv::spectra::SpectralConfig scfg{cfg.c};
    for (long n = cfg.res_n_lo; n <= cfg.res_n_hi; ++n) {
        if (mode == "blowup") {
            // Resonances of the discrete operator itself: the grid analogue
            // of the shear-wave frequency n pi sqrt(k1/rho1)/L replaces the
            // wavenumber with its first-difference dispersion
            // (2/h) sin(n pi h / (2 L)), at which the quasimode relation
            // holds exactly on the grid.
            if (static_cast<std::size_t>(n) >= cfg.n_cells)
                throw tkv::config::ConfigError(
                    "resolvent.n_hi", "must be < grid.n_cells for the "
                                      "discrete resonance scan");
            const double h = cfg.beam.length / static_cast<double>(cfg.n_cells);
            const double sigma =
                2.0 / h *
                std::sin(static_cast<double>(n) * std::numbers::pi * h /
                         (2.0 * cfg.beam.length));
            omegas.push_back(sigma * std::sqrt(cfg.beam.k1 / cfg.beam.rho1));
        } else {
            const int branch = mode == "branch2" ? 2 : 1;
            omegas.push_back(
                tkv::spectra::predict_branch(branch, n, scfg, cfg.case_override)
                    .lambda.imag());
        }
    }
    return omegas;
}

int cmd_resolvent(const tkv::config::RunConfig& cfg, std::ostream& os) {
    tkv::DiscreteGenerator gen(cfg.beam, cfg.damping, cfg.bc, cfg.n_cells,
                               cfg.damping_kind == "zero");
    const std::vector<double> omegas = scan_frequencies(cfg);
    const tkv::resolvent::ScanResult scan = tkv::resolvent::resolvent_growth_scan(
        gen, omegas, cfg.res_tol, cfg.threads, cfg.seed);

    write_preamble(os, cfg, "resolvent");
    os << "omega,norm,iterations,converged\n";
    for (const auto& s : scan.samples) {
        os << fmt(s.omega) << ',' << fmt(s.norm) << ',' << s.iterations << ','
           << (s.converged ? "true" : "false") << "\n";
    }
    os << "# slope," << fmt(scan.slope) << "\n";
    os << "# intercept," << fmt(scan.intercept) << "\n";
    os << "# diverging," << (scan.diverging ? "true" : "false") << "\n";
    return 0;
}

// --- verify -------------------------------------------------------------------

struct CheckRow {
    std::string suite, check, outcome, measured;
};

void identity_checks(const tkv::config::RunConfig& cfg, std::vector<CheckRow>& rows) {
    tkv::Rng rng(cfg.seed);
    double worst_f0 = 0.0, worst_wave = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double cc = 0.3 + 9.7 * rng.uniform01();
        const cplx lam{-0.5 * rng.uniform01(),
                       (rng.uniform01() < 0.5 ? -1.0 : 1.0) *
                           (3.0 + 120.0 * rng.uniform01())};
        const tkv::spectra::SpectralConfig scfg{cc};
        const cplx a = tkv::spectra::f0_series(lam, scfg);
        const cplx b = tkv::spectra::f0_factored(lam, scfg);
        worst_f0 = std::max(worst_f0,
                            std::abs(a - b) / std::max(1.0, std::abs(a)));

        const auto w = tkv::spectra::wavenumbers(lam, scfg);
        const cplx l2 = lam * lam, ic{0.0, cc};
        const double scale = std::max(1.0, std::abs(l2));
        worst_wave = std::max(
            {worst_wave,
             std::abs(w.r1 * w.r1 + w.r2 * w.r2 - 2.0 * l2) / scale,
             std::abs(w.r1 * w.r1 - w.r2 * w.r2 - 2.0 * ic * lam) / scale,
             std::abs(w.s1 * w.s1 + w.s2 * w.s2 -
                      l2 * (lam + 2.0) / (lam + 1.0)) /
                 scale,
             std::abs(w.s1 * w.s1 * w.s2 * w.s2 -
                      l2 * (l2 + cc * cc) / (1.0 + lam)) /
                 std::max(1.0, std::abs(l2 * l2))});
    }
    rows.push_back({"identities", "f0_factorization",
                    worst_f0 <= 1e-12 ? "pass" : "fail", fmt(worst_f0)});
    rows.push_back({"identities", "wavenumber_identities",
                    worst_wave <= 1e-12 ? "pass" : "fail", fmt(worst_wave)});

    tkv::BeamParameters unit;
    double worst_coeff = 0.0;
    for (long n = 1; n <= 20; ++n) {
        const auto pair = tkv::resolvent::build_blowup_pair(
            n, unit, 1.0, 8 * static_cast<std::size_t>(n) + 8);
        worst_coeff = std::max({worst_coeff, std::abs(pair.C1 - 1.0),
                                std::abs(pair.C2)});
    }
    rows.push_back({"identities", "quasimode_coefficients",
                    worst_coeff <= 1e-12 ? "pass" : "fail", fmt(worst_coeff)});
}

void decay_checks(const tkv::config::RunConfig& cfg, std::vector<CheckRow>& rows) {
    const tkv::ValidationReport report =
        tkv::validate_hypothesis(cfg.damping, cfg.beam);
    if (!report.passes) {
        rows.push_back({"decay", "simulation", "not-applicable (H violated)", ""});
        return;
    }
    try {
        tkv::DiscreteGenerator gen(cfg.beam, cfg.damping, cfg.bc, cfg.n_cells);
        const tkv::GridState u0 =
            tkv::make_modal_state(cfg.beam, cfg.bc, cfg.n_cells, cfg.init_n_max,
                                  cfg.init_amplitude_power, cfg.seed);
        const double dt =
            cfg.dt > 0.0 ? cfg.dt : tkv::default_dt(cfg.beam, cfg.n_cells);
        const tkv::EnergyTrace trace =
            tkv::simulate(gen, u0, dt, cfg.t_final, cfg.stride);
        rows.push_back({"decay", "energy_monotone", "pass", "0"});

        const double t_lo = cfg.fit_t_hi > 0.0 ? cfg.fit_t_lo : cfg.t_final / 10.0;
        const double t_hi = cfg.fit_t_hi > 0.0 ? cfg.fit_t_hi : cfg.t_final;
        const tkv::DecayFit fit = tkv::fit_decay_exponent(trace, t_lo, t_hi);
        rows.push_back({"decay", "decay_exponent_band",
                        (fit.p >= 0.7 && fit.p <= 1.4) ? "pass" : "fail",
                        fmt(fit.p)});

        double start_et = 0.0, max_et = 0.0;
        bool have_start = false;
        for (std::size_t i = 0; i < trace.times.size(); ++i) {
            const double t = trace.times[i];
            if (t < t_lo || t > t_hi) continue;
            const double et = trace.energies[i] * t;
            if (!have_start) {
                start_et = et;
                have_start = true;
            }
            max_et = std::max(max_et, et);
        }
        const double ratio = have_start && start_et > 0.0 ? max_et / start_et : 0.0;
        rows.push_back({"decay", "energy_times_t_bounded",
                        (have_start && ratio <= 1.5) ? "pass" : "fail",
                        fmt(ratio)});
    } catch (const std::exception& e) {
        rows.push_back({"decay", "energy_monotone", "fail", "0"});
        std::cerr << "decay suite: " << e.what() << "\n";
    }
}

void blowup_checks(const tkv::config::RunConfig& cfg, std::vector<CheckRow>& rows) {
    if (!spans_whole_beam(cfg) ||
        cfg.bc != tkv::BoundaryConditions::DirichletNeumann) {
        rows.push_back(
            {"blowup", "norm_ratio_slope", "not-applicable (needs global damping)", ""});
        return;
    }
    std::vector<long> n_list;
    for (long n = 20; n <= 200; n += 10)
        if (8 * static_cast<std::size_t>(n) <= cfg.n_cells) n_list.push_back(n);
    if (n_list.size() < 2) {
        rows.push_back(
            {"blowup", "norm_ratio_slope", "not-applicable (grid too coarse)", ""});
        return;
    }
    const auto scan = tkv::resolvent::blowup_exponent(
        n_list, cfg.beam, cfg.damping.floor, cfg.n_cells);
    rows.push_back({"blowup", "norm_ratio_slope",
                    std::abs(scan.slope - 2.0) <= 0.1 ? "pass" : "fail",
                    fmt(scan.slope)});
}

void resolvent_checks(const tkv::config::RunConfig& cfg,
                      std::vector<CheckRow>& rows) {
    const tkv::ValidationReport report =
        tkv::validate_hypothesis(cfg.damping, cfg.beam);
    if (!report.passes) {
        rows.push_back(
            {"resolvent", "growth_slope", "not-applicable (H violated)", ""});
        return;
    }
    tkv::DiscreteGenerator gen(cfg.beam, cfg.damping, cfg.bc, cfg.n_cells);
    const std::vector<double> omegas = scan_frequencies(cfg);
    const auto scan = tkv::resolvent::resolvent_growth_scan(
        gen, omegas, cfg.res_tol, cfg.threads, cfg.seed);
    const bool global = spans_whole_beam(cfg);
    const bool ok = global ? std::abs(scan.slope - 2.0) <= 0.3
                           : scan.slope <= 2.3;
    rows.push_back(
        {"resolvent", "growth_slope", ok ? "pass" : "fail", fmt(scan.slope)});
}

int cmd_verify(const tkv::config::RunConfig& cfg, std::ostream& os) {
    std::vector<CheckRow> rows;
    const bool all = cfg.suite == "all";
    if (all || cfg.suite == "identities") identity_checks(cfg, rows);
    if (all || cfg.suite == "decay") decay_checks(cfg, rows);
    if (all || cfg.suite == "blowup") blowup_checks(cfg, rows);
    if (all || cfg.suite == "resolvent") resolvent_checks(cfg, rows);

    write_preamble(os, cfg, "verify");
    os << "suite,check,outcome,measured\n";
    bool any_fail = false;
    for (const auto& r : rows) {
        os << r.suite << ',' << r.check << ',' << r.outcome << ',' << r.measured
           << "\n";
        if (r.outcome == "fail") any_fail = true;
    }
    return any_fail ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Damped-beam energy decay, spectrum, and resolvent toolkit"};
    app.fallthrough();
    std::string config_path, out_override;
    int threads_override = 0;

    app.add_option("--config", config_path, "JSON configuration file")
        ->required();
    app.add_option("--out", out_override, "output file (default: config, else stdout)");
    app.add_option("--threads", threads_override, "worker threads override");
    app.require_subcommand(1);

    CLI::App* c_sim = app.add_subcommand("simulate", "energy trace of the damped beam");
    CLI::App* c_spec = app.add_subcommand(
        "spectrum", "characteristic roots vs asymptotic predictions");
    CLI::App* c_res =
        app.add_subcommand("resolvent", "resolvent-norm growth scan");
    CLI::App* c_ver = app.add_subcommand("verify", "property suite summary");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        tkv::config::RunConfig cfg = tkv::config::load_run_config(config_path);
        if (!out_override.empty()) {
            cfg.out = out_override;
            cfg.echo["out"] = cfg.out;
        }
        if (threads_override > 0) {
            cfg.threads = threads_override;
            cfg.echo["threads"] = cfg.threads;
        }

        std::ofstream file;
        std::ostream* os = &std::cout;
        if (!cfg.out.empty()) {
            file.open(cfg.out, std::ios::trunc);
            if (!file)
                throw tkv::config::ConfigError("out", "cannot open for writing");
            os = &file;
        }

        const auto t0 = std::chrono::steady_clock::now();
        int rc = 0;
        if (*c_sim) rc = cmd_simulate(cfg, *os);
        else if (*c_spec) rc = cmd_spectrum(cfg, *os);
        else if (*c_res) rc = cmd_resolvent(cfg, *os);
        else if (*c_ver) rc = cmd_verify(cfg, *os);
        const std::chrono::duration<double> wall =
            std::chrono::steady_clock::now() - t0;
        // wall time goes to stderr so identical config + seed reruns produce
        // bit-identical output files
        std::cerr << "# wall_time_seconds," << wall.count() << "\n";
        return rc;
    } catch (const tkv::config::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}
