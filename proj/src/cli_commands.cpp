#include <cmath>
#include <limits>
#include <ostream>
#include <vector>

#include "nextjump/cli.hpp"
#include "nextjump/propagator.hpp"
#include "nextjump/regimes.hpp"
#include "nextjump/spectral.hpp"
#include "nextjump/trajectories.hpp"

namespace nextjump::cli {

namespace {

void kv(std::ostream& os, const char* key, const std::string& value) {
    os << "# " << key << " = " << value << "\n";
}

void kv(std::ostream& os, const char* key, double value) {
    kv(os, key, fmt(value));
}

std::string fmt_complex(const Complex& z) {
    return "(" + fmt(z.real()) + "," + fmt(z.imag()) + ")";
}

std::string fmt_triple(const std::array<Complex, 3>& v) {
    return fmt_complex(v[0]) + ";" + fmt_complex(v[1]) + ";" + fmt_complex(v[2]);
}

void emit_params_block(std::ostream& os, const char* command,
                       const ResolvedParams& rp) {
    os << "# nextjump " << command << "\n";
    kv(os, "command", command);
    kv(os, "units", rp.units);
    kv(os, "omega1_input", rp.omega1_input);
    kv(os, "omega2_input", rp.omega2_input);
    kv(os, "omega1", rp.params.omega1);
    kv(os, "omega2", rp.params.omega2);
    kv(os, "beta1", rp.params.beta1);
    kv(os, "beta2", rp.params.beta2);
}

// Derived rates, regime tag and the eigenvalue spectrum (exact plus the
// applicable asymptotics with their deviations), so every CSV is
// self-describing.
void emit_derived_block(std::ostream& os, const SystemParams& p) {
    const EigenCompareReport rep = eigen_compare(p);
    if (rep.rates) {
        kv(os, "epsilon", rep.rates->epsilon);
        kv(os, "eta", rep.rates->eta);
        kv(os, "alpha", rep.rates->alpha);
        kv(os, "beta_ell", rep.rates->beta_ell);
    }
    if (rep.regime) {
        kv(os, "regime", to_string(rep.regime->tag));
        kv(os, "margin", rep.regime->margin);
    } else {
        kv(os, "regime", "undefined (no drive, no |2> decay)");
    }
    kv(os, "lambda_exact", fmt_triple(rep.exact.lambdas));
    if (rep.underdamped) {
        kv(os, "lambda_asym_underdamped", fmt_triple(rep.underdamped->paired));
        kv(os, "asym_underdamped_max_rel_err", rep.underdamped->max_rel_error);
    }
    if (rep.overdamped) {
        kv(os, "lambda_asym_overdamped", fmt_triple(rep.overdamped->paired));
        kv(os, "asym_overdamped_max_rel_err", rep.overdamped->max_rel_error);
    }
    for (const std::string& w : rep.warnings) {
        kv(os, "warning", w);
    }
}

void emit_warnings(std::ostream& os, const std::vector<std::string>& warnings) {
    for (const std::string& w : warnings) kv(os, "warning", w);
}

DerivedRates rates_or_config_error(const SystemParams& p) {
    try {
        return derive_rates(p);
    } catch (const Error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

long positive_steps(double span, double step, const char* what) {
    if (!(step > 0.0) || !(span >= 0.0)) {
        throw ConfigError(std::string("config: bad grid for ") + what);
    }
    return std::llround(span / step);
}

// ---- figure2 ---------------------------------------------------------------

void cmd_figure2(const RunConfig& user, std::ostream& os) {
    RunConfig def;
    def.omega1 = 1.0 / 24.0;
    def.omega2 = 1.0 / 48.0;
    def.beta1 = 1.0;
    def.beta2 = 0.0;
    def.units = "angular";
    def.grid_start = 0.0;
    def.grid_stop = 200.0;
    def.grid_step = 0.05;
    const RunConfig cfg = merge(def, user);

    const ResolvedParams rp = resolve_params(cfg);
    const SystemParams& p = rp.params;
    const DerivedRates rates = rates_or_config_error(p);

    const double dt_tau = kDefaultStepTau;  // grid is in tau = beta1 t
    const long n_sub =
        std::max<long>(1, std::llround(*cfg.grid_step / dt_tau));
    const double step_eff = static_cast<double>(n_sub) * dt_tau;
    const long n_steps = positive_steps(*cfg.grid_stop, dt_tau, "figure2");

    std::vector<std::string> warnings;
    (void)underdamped_after_reset(0.0, p, &warnings);

    emit_params_block(os, "figure2", rp);
    emit_derived_block(os, p);
    emit_warnings(os, warnings);
    kv(os, "axis", "tau (dimensionless, beta1*t)");
    kv(os, "grid_start", *cfg.grid_start);
    kv(os, "grid_stop", *cfg.grid_stop);
    kv(os, "grid_step_effective", step_eff);
    kv(os, "dt_tau", dt_tau);
    os << "tau,c0,c1,c2,W,Pbar10_numeric,Pbar10_closed\n";

    const Generator g = build_generator(p);
    const double dt = dt_tau / p.beta1;
    const double inv4e2 = 1.0 / (4.0 * rates.epsilon * rates.epsilon);
    AmplitudeState s = reset_state();
    for (long k = 0; k <= n_steps; ++k) {
        const double tau = static_cast<double>(k) * dt_tau;
        if (k % n_sub == 0 && tau >= *cfg.grid_start - 1e-12) {
            const Amplitudes closed =
                underdamped_after_reset(tau / p.beta1, p, nullptr);
            os << fmt(tau) << ',' << fmt(s.c0) << ',' << fmt(s.c1) << ','
               << fmt(s.c2) << ',' << fmt(survival(s)) << ','
               << fmt(s.c1 * s.c1 * inv4e2) << ','
               << fmt(closed.c1 * closed.c1 * inv4e2) << "\n";
        }
        if (k < n_steps) s = rk4_step(s, g, dt).state;
    }
}

// ---- figure3 ---------------------------------------------------------------

void cmd_figure3(const RunConfig& user, std::ostream& os) {
    RunConfig def;
    // Any (eps, eta) pair realizing alpha = 1/10; the emitted columns depend
    // on alpha and the rate scale only.
    def.omega1 = 0.05;
    def.omega2 = 2.0 * 0.05 * 0.05 * std::sqrt(0.1);
    def.beta1 = 1.0;
    def.beta2 = 0.0;
    def.units = "angular";
    def.grid_start = 0.0;
    def.grid_stop = 10.0;
    def.grid_step = 0.005;
    const RunConfig cfg = merge(def, user);

    const ResolvedParams rp = resolve_params(cfg);
    const SystemParams& p = rp.params;
    const DerivedRates rates = rates_or_config_error(p);
    if (rates.alpha >= 1.0) {
        throw ConfigError("figure3: alpha = eta^2/4eps^2 must be < 1");
    }

    std::vector<std::string> warnings;
    (void)overdamped_dark(0.0, p, &warnings);
    const double t2 = full_shelving_time(p);
    const double lam2_abs = 2.0 * p.beta1 * rates.epsilon * rates.epsilon;

    emit_params_block(os, "figure3", rp);
    emit_derived_block(os, p);
    emit_warnings(os, warnings);
    kv(os, "axis", "tau_prime (dimensionless, 2*beta1*eps^2*t from dark onset)");
    kv(os, "t2_full_shelving", t2);
    kv(os, "tau_prime_2", lam2_abs * t2);
    kv(os, "Z_late_exact", (1.0 - rates.alpha) / (1.0 + rates.alpha));
    kv(os, "Z_late_leading_order", 1.0 - 2.0 * rates.alpha);
    kv(os, "grid_start", *cfg.grid_start);
    kv(os, "grid_stop", *cfg.grid_stop);
    kv(os, "grid_step", *cfg.grid_step);
    os << "tau_prime,P20,Z\n";

    const long n_rows = positive_steps(*cfg.grid_stop - *cfg.grid_start,
                                       *cfg.grid_step, "figure3");
    for (long j = 0; j <= n_rows; ++j) {
        const double tp = *cfg.grid_start + static_cast<double>(j) * *cfg.grid_step;
        const double t = tp / lam2_abs;
        const Amplitudes a = overdamped_dark(t, p, nullptr);
        os << fmt(tp) << ',' << fmt(a.c2 * a.c2) << ','
           << fmt(relative_occupation_Z(a.c0, a.c2)) << "\n";
    }
}

// ---- figure4 ---------------------------------------------------------------

void cmd_figure4(const RunConfig& user, std::ostream& os) {
    RunConfig def;
    def.omega1 = 1.0e6;  // quoted as Omega/2pi in Hz
    def.omega2 = 2.0e4;
    def.beta1 = 4.8e7;
    def.beta2 = 0.0;
    def.units = "hertz";
    RunConfig cfg = merge(def, user);

    const ResolvedParams rp = resolve_params(cfg);
    const SystemParams& p = rp.params;
    (void)rates_or_config_error(p);

    const EigenTriple over = asymptotic_overdamped(p);
    const double lam3_abs = std::abs(over.lambdas[0].real());
    if (!(lam3_abs > 0.0)) {
        throw ConfigError("figure4: omega2 = 0 leaves no slow scale to span");
    }
    if (!cfg.grid_stop) cfg.grid_stop = 5.2 / lam3_abs;
    if (!cfg.grid_start) cfg.grid_start = 0.0;
    const double dt = kDefaultStepTau / p.beta1;
    if (!cfg.grid_step) cfg.grid_step = *cfg.grid_stop / 2000.0;
    const long n_sub = std::max<long>(1, std::llround(*cfg.grid_step / dt));
    const double step_eff = static_cast<double>(n_sub) * dt;

    const double t0p = cfg.t0_prime.value_or(default_dark_onset(p));
    const long cond_step = std::max<long>(0, std::llround(t0p / dt));
    const long n_steps = positive_steps(*cfg.grid_stop, dt, "figure4");

    emit_params_block(os, "figure4", rp);
    emit_derived_block(os, p);
    kv(os, "axis", "t (seconds)");
    kv(os, "t0_prime", static_cast<double>(cond_step) * dt);
    kv(os, "conditioning", "condition_on_no_jump applied at t0_prime");
    kv(os, "grid_start", *cfg.grid_start);
    kv(os, "grid_stop", *cfg.grid_stop);
    kv(os, "grid_step_effective", step_eff);
    kv(os, "dt", dt);
    os << "t,P10,P20,Z\n";

    const Generator g = build_generator(p);
    AmplitudeState s = reset_state();
    for (long k = 0; k <= n_steps; ++k) {
        if (k == cond_step) s = condition_on_no_jump(s);
        const double t = static_cast<double>(k) * dt;
        if (k % n_sub == 0 && t >= *cfg.grid_start - 1e-300) {
            const double denom = s.c0 * s.c0 + s.c2 * s.c2;
            const double z = denom > 0.0
                                 ? relative_occupation_Z(s.c0, s.c2)
                                 : std::numeric_limits<double>::quiet_NaN();
            os << fmt(t) << ',' << fmt(s.c1 * s.c1) << ',' << fmt(s.c2 * s.c2)
               << ',' << fmt(z) << "\n";
        }
        if (k < n_steps) s = rk4_step(s, g, dt).state;
    }
}

// ---- figure5 ---------------------------------------------------------------

void cmd_figure5(const RunConfig& user, std::ostream& os) {
    RunConfig def;
    def.omega1 = 1.0e6;
    def.omega2 = 2.0e5;
    def.beta1 = 1.0e6;
    def.beta2 = 0.0;
    def.units = "angular";
    def.grid_start = 0.0;
    def.grid_stop = 2.0e-5;
    RunConfig cfg = merge(def, user);

    const ResolvedParams rp = resolve_params(cfg);
    const SystemParams& p = rp.params;
    const DerivedRates rates = rates_or_config_error(p);

    const double dt = kDefaultStepTau / p.beta1;
    if (!cfg.grid_step) cfg.grid_step = dt;
    const long n_sub = std::max<long>(1, std::llround(*cfg.grid_step / dt));
    const long n_steps = positive_steps(*cfg.grid_stop, dt, "figure5");

    emit_params_block(os, "figure5", rp);
    emit_derived_block(os, p);
    kv(os, "axis", "t (seconds)");
    if (rates.epsilon >= 0.5) {
        kv(os, "drive_regime",
           "crossover (epsilon ~ 1; weak-drive closed forms out of validity)");
    }
    kv(os, "closed_forms", "disabled (numeric propagator only)");
    kv(os, "grid_start", *cfg.grid_start);
    kv(os, "grid_stop", *cfg.grid_stop);
    kv(os, "grid_step_effective", static_cast<double>(n_sub) * dt);
    kv(os, "dt", dt);
    os << "t,P10,P20,W\n";

    const Generator g = build_generator(p);
    AmplitudeState s = reset_state();
    for (long k = 0; k <= n_steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        if (k % n_sub == 0 && t >= *cfg.grid_start - 1e-300) {
            os << fmt(t) << ',' << fmt(s.c1 * s.c1) << ',' << fmt(s.c2 * s.c2)
               << ',' << fmt(survival(s)) << "\n";
        }
        if (k < n_steps) s = rk4_step(s, g, dt).state;
    }
}

// ---- eigen -----------------------------------------------------------------

void cmd_eigen(const RunConfig& user, std::ostream& os) {
    const ResolvedParams rp = resolve_params(user);
    const SystemParams& p = rp.params;
    const EigenCompareReport rep = eigen_compare(p);

    emit_params_block(os, "eigen", rp);
    emit_derived_block(os, p);
    os << "exact eigenvalues (1/s), descending real part:\n";
    for (std::size_t i = 0; i < 3; ++i) {
        os << "  lambda[" << i << "] = " << fmt_complex(rep.exact.lambdas[i])
           << "\n";
    }
    const auto print_cmp = [&os](const char* name, const EigenComparison& c) {
        os << name << ":\n";
        for (std::size_t i = 0; i < 3; ++i) {
            os << "  " << fmt_complex(c.paired[i])
               << "  rel_err = " << fmt(c.rel_error[i]) << "\n";
        }
        os << "  max_rel_err = " << fmt(c.max_rel_error) << "\n";
    };
    if (rep.underdamped) {
        print_cmp("asymptotic underdamped (paired to exact)", *rep.underdamped);
    }
    if (rep.overdamped) {
        print_cmp("asymptotic overdamped (paired to exact)", *rep.overdamped);
    }
    if (rep.exact.lambdas[0].real() != 0.0) {
        os << "slowest decay time 1/|Re lambda[0]| = "
           << fmt(1.0 / std::abs(rep.exact.lambdas[0].real())) << " s\n";
    }
}

// ---- trajectories ----------------------------------------------------------

void cmd_trajectories(const RunConfig& user, std::ostream& os) {
    RunConfig def;
    def.beta2 = 0.0;
    def.seed = 1;
    def.n_traj = 1;
    def.threads = 1;
    def.bins = 48;
    const RunConfig cfg = merge(def, user);

    const ResolvedParams rp = resolve_params(cfg);
    const SystemParams& p = rp.params;
    if (!cfg.horizon || !(*cfg.horizon > 0.0)) {
        throw ConfigError("trajectories: a positive 'horizon' (seconds) is required");
    }
    if (*cfg.n_traj < 1) {
        throw ConfigError("trajectories: n_traj must be >= 1");
    }
    if (*cfg.threads < 1) {
        throw ConfigError("trajectories: threads must be >= 1");
    }
    if (*cfg.bins < 1) {
        throw ConfigError("trajectories: bins must be >= 1");
    }

    const double t0p = cfg.t0_prime.value_or(default_dark_onset(p));
    double t3 = std::numeric_limits<double>::infinity();
    if (cfg.t3_threshold) {
        t3 = *cfg.t3_threshold;
    } else if (p.omega1 > 0.0) {
        t3 = default_t3_threshold(p);
    }

    emit_params_block(os, "trajectories", rp);
    emit_derived_block(os, p);
    kv(os, "seed", std::to_string(*cfg.seed));
    kv(os, "n_traj", std::to_string(*cfg.n_traj));
    kv(os, "horizon", *cfg.horizon);
    kv(os, "t0_prime", t0p);
    kv(os, "t3_threshold", t3);
    kv(os, "threads", std::to_string(*cfg.threads));
    kv(os, "bins", std::to_string(*cfg.bins));
    os << "bin_lo,bin_hi,count,terminal_channel_bright,terminal_channel_dark\n";

    const auto records =
        simulate_ensemble(p, static_cast<int>(*cfg.n_traj), *cfg.horizon,
                          *cfg.seed, *cfg.threads);
    std::size_t total_events = 0;
    for (const auto& r : records) total_events += r.events.size();
    if (total_events == 0) {
        os << "# summary = no events\n";
        return;
    }

    DarkStatsOptions dopts;
    dopts.n_bins = *cfg.bins;
    const DarkStats st = dark_stats(records, p, t0p, t3, dopts);
    for (std::size_t b = 0; b < st.bin_counts.size(); ++b) {
        os << fmt(st.bin_edges[b]) << ',' << fmt(st.bin_edges[b + 1]) << ','
           << st.bin_counts[b] << ',' << st.bin_bright[b] << ','
           << st.bin_dark[b] << "\n";
    }

    os << "# summary\n";
    kv(os, "n_intervals", std::to_string(st.n_intervals));
    kv(os, "n_censored", std::to_string(st.n_censored));
    kv(os, "fraction_dark", st.fraction_dark);
    kv(os, "fraction_dark_se", st.se_dark);
    kv(os, "fraction_extralong", st.fraction_extralong);
    kv(os, "fraction_extralong_se", st.se_extralong);
    kv(os, "terminal_bright_all", std::to_string(st.bright_all));
    kv(os, "terminal_dark_all", std::to_string(st.dark_all));
    kv(os, "dark_class_bright", std::to_string(st.bright_dark_class));
    kv(os, "dark_class_dark", std::to_string(st.dark_dark_class));
    kv(os, "extralong_bright", std::to_string(st.bright_extralong));
    kv(os, "extralong_dark", std::to_string(st.dark_extralong));
    if (st.n_dark > 0) {
        const double pb = static_cast<double>(st.bright_dark_class) /
                          static_cast<double>(st.n_dark);
        kv(os, "dark_class_bright_fraction", pb);
        kv(os, "dark_class_bright_fraction_se",
           std::sqrt(pb * (1.0 - pb) / static_cast<double>(st.n_dark)));
    }
    if (p.omega1 > 0.0) {
        const DarkPeriodPredictions pred = dark_period_predictions(p, t0p);
        kv(os, "predicted_p_dark_after_reset", pred.p_dark_after_reset);
        kv(os, "predicted_eps2_coefficient", pred.eps2_coefficient);
        kv(os, "predicted_p_extralong", pred.p_extralong);
        kv(os, "predicted_t3", pred.t3);
        kv(os, "predicted_split_beta2", pred.split_beta2);
        kv(os, "predicted_p_end_from_level2_extralong",
           pred.p_end_from_level2_extralong);
        kv(os, "predicted_p_end_from_level2_exact", pred.p_end_from_level2_exact);
    } else {
        kv(os, "predictions", "unavailable (eta undefined for omega1 = 0)");
    }
}

}  // namespace

void run_command(const std::string& command, const RunConfig& cfg,
                 std::ostream& os) {
    if (command == "figure2") {
        cmd_figure2(cfg, os);
    } else if (command == "figure3") {
        cmd_figure3(cfg, os);
    } else if (command == "figure4") {
        cmd_figure4(cfg, os);
    } else if (command == "figure5") {
        cmd_figure5(cfg, os);
    } else if (command == "eigen") {
        cmd_eigen(cfg, os);
    } else if (command == "trajectories") {
        cmd_trajectories(cfg, os);
    } else {
        throw ConfigError("unknown command '" + command + "'");
    }
}

}  // namespace nextjump::cli
