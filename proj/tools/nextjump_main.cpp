// Command-line front end: parse a flat key=value config plus mirroring flags,
// run one analysis command, emit the CSV/report to --out (default stdout).
//
// Exit codes: 0 success, 2 config error, 1 runtime error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nextjump/cli.hpp"

namespace {

struct FlagValues {
    std::string config_path;
    double omega1 = 0, omega2 = 0, beta1 = 0, beta2 = 0;
    std::string units;
    double grid_start = 0, grid_stop = 0, grid_step = 0;
    std::uint64_t seed = 0;
    long n_traj = 0;
    double horizon = 0;
    double t0_prime = 0, t3_threshold = 0;
    std::string out;
    int threads = 0, bins = 0;
};

void add_common_options(CLI::App* cmd, FlagValues& v) {
    cmd->add_option("--config", v.config_path, "key=value config file");
    cmd->add_option("--omega1", v.omega1, "Rabi rate of the |0>-|1> drive");
    cmd->add_option("--omega2", v.omega2, "Rabi rate of the |0>-|2> drive");
    cmd->add_option("--beta1", v.beta1, "decay rate of |1>, 1/s");
    cmd->add_option("--beta2", v.beta2, "decay rate of |2>, 1/s");
    cmd->add_option("--units", v.units, "angular | hertz");
    cmd->add_option("--grid_start", v.grid_start, "output grid start");
    cmd->add_option("--grid_stop", v.grid_stop, "output grid stop");
    cmd->add_option("--grid_step", v.grid_step, "output grid step");
    cmd->add_option("--seed", v.seed, "master RNG seed");
    cmd->add_option("--n_traj", v.n_traj, "number of trajectories");
    cmd->add_option("--horizon", v.horizon, "per-record horizon, s");
    cmd->add_option("--t0_prime", v.t0_prime, "dark-period onset, s");
    cmd->add_option("--t3_threshold", v.t3_threshold,
                    "extra-long interval threshold, s");
    cmd->add_option("--out", v.out, "output path (default stdout)");
    cmd->add_option("--threads", v.threads, "worker threads for trajectories");
    cmd->add_option("--bins", v.bins, "histogram bins for trajectories");
}

nextjump::cli::RunConfig overrides_from_flags(const CLI::App* cmd,
                                              const FlagValues& v) {
    nextjump::cli::RunConfig c;
    if (cmd->count("--omega1") > 0) c.omega1 = v.omega1;
    if (cmd->count("--omega2") > 0) c.omega2 = v.omega2;
    if (cmd->count("--beta1") > 0) c.beta1 = v.beta1;
    if (cmd->count("--beta2") > 0) c.beta2 = v.beta2;
    if (cmd->count("--units") > 0) {
        if (v.units != "angular" && v.units != "hertz") {
            throw nextjump::ConfigError("--units must be 'angular' or 'hertz'");
        }
        c.units = v.units;
    }
    if (cmd->count("--grid_start") > 0) c.grid_start = v.grid_start;
    if (cmd->count("--grid_stop") > 0) c.grid_stop = v.grid_stop;
    if (cmd->count("--grid_step") > 0) c.grid_step = v.grid_step;
    if (cmd->count("--seed") > 0) c.seed = v.seed;
    if (cmd->count("--n_traj") > 0) c.n_traj = v.n_traj;
    if (cmd->count("--horizon") > 0) c.horizon = v.horizon;
    if (cmd->count("--t0_prime") > 0) c.t0_prime = v.t0_prime;
    if (cmd->count("--t3_threshold") > 0) c.t3_threshold = v.t3_threshold;
    if (cmd->count("--out") > 0) c.out = v.out;
    if (cmd->count("--threads") > 0) c.threads = v.threads;
    if (cmd->count("--bins") > 0) c.bins = v.bins;
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "nextjump: statistics of the next quantum jump of a driven "
        "three-level atom"};
    app.require_subcommand(1);

    const std::vector<std::string> commands = {
        "figure2", "figure3", "figure4", "figure5", "eigen", "trajectories"};
    std::vector<FlagValues> values(commands.size());
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < commands.size(); ++i) {
        CLI::App* sub = app.add_subcommand(commands[i]);
        add_common_options(sub, values[i]);
        subs.push_back(sub);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        for (std::size_t i = 0; i < commands.size(); ++i) {
            if (!subs[i]->parsed()) continue;
            nextjump::cli::RunConfig cfg;
            if (!values[i].config_path.empty()) {
                cfg = nextjump::cli::parse_config_file(values[i].config_path);
            }
            cfg = nextjump::cli::merge(cfg, overrides_from_flags(subs[i], values[i]));

            std::ostringstream buf;
            nextjump::cli::run_command(commands[i], cfg, buf);

            if (cfg.out && *cfg.out != "-") {
                std::ofstream f(*cfg.out, std::ios::binary);
                if (!f) {
                    std::cerr << "error: cannot open output file '" << *cfg.out
                              << "'\n";
                    return 1;
                }
                f << buf.str();
                if (!f.good()) {
                    std::cerr << "error: write failed for '" << *cfg.out << "'\n";
                    return 1;
                }
            } else {
                std::cout << buf.str();
            }
        }
        return 0;
    } catch (const nextjump::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
