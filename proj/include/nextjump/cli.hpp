#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "nextjump/errors.hpp"
#include "nextjump/model.hpp"

namespace nextjump::cli {

// Flat key=value run configuration. Every field is optional so that
// file values, flag overrides and per-command defaults can be layered;
// flags win over file values, file values over defaults.
struct RunConfig {
    std::optional<double> omega1;
    std::optional<double> omega2;
    std::optional<double> beta1;
    std::optional<double> beta2;
    std::optional<std::string> units;  // "angular" | "hertz"
    std::optional<double> grid_start;
    std::optional<double> grid_stop;
    std::optional<double> grid_step;
    std::optional<std::uint64_t> seed;
    std::optional<long> n_traj;
    std::optional<double> horizon;
    std::optional<double> t0_prime;
    std::optional<double> t3_threshold;
    std::optional<std::string> out;
    std::optional<int> threads;
    std::optional<int> bins;
};

// Parses `key = value` lines; '#' starts a comment; blank lines ignored;
// later duplicates win. Unknown keys or malformed values throw ConfigError.
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin);

// Fields set in `over` replace those in `base`.
RunConfig merge(RunConfig base, const RunConfig& over);

// Raw inputs plus the resolved angular-rate parameter set.
struct ResolvedParams {
    SystemParams params;
    std::string units;
    double omega1_input = 0.0;
    double omega2_input = 0.0;
};

// Applies the units rule (hertz: omega *= 2pi, beta unchanged). Throws
// ConfigError when required keys are missing or invalid.
ResolvedParams resolve_params(const RunConfig& cfg);

// Runs one command, writing its complete report (metadata header, CSV data,
// any trailing summary) to `os`. Throws ConfigError for bad configuration and
// Error subclasses for runtime failures.
void run_command(const std::string& command, const RunConfig& cfg,
                 std::ostream& os);

// Scientific formatting used for every CSV value: %.16e, enough digits for
// exact double round-trips.
std::string fmt(double v);

}  // namespace nextjump::cli
