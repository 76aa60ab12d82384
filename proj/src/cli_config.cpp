#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "nextjump/cli.hpp"

namespace nextjump::cli {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_double(const std::string& v, const std::string& key) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0') {
        throw ConfigError("config: bad number for key '" + key + "': " + v);
    }
    return x;
}

long parse_long(const std::string& v, const std::string& key) {
    char* end = nullptr;
    const long x = std::strtol(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0') {
        throw ConfigError("config: bad integer for key '" + key + "': " + v);
    }
    return x;
}

std::uint64_t parse_u64(const std::string& v, const std::string& key) {
    char* end = nullptr;
    const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0') {
        throw ConfigError("config: bad seed for key '" + key + "': " + v);
    }
    return static_cast<std::uint64_t>(x);
}

void assign(RunConfig& c, const std::string& key, const std::string& value) {
    if (key == "omega1") {
        c.omega1 = parse_double(value, key);
    } else if (key == "omega2") {
        c.omega2 = parse_double(value, key);
    } else if (key == "beta1") {
        c.beta1 = parse_double(value, key);
    } else if (key == "beta2") {
        c.beta2 = parse_double(value, key);
    } else if (key == "units") {
        if (value != "angular" && value != "hertz") {
            throw ConfigError("config: units must be 'angular' or 'hertz', got '" +
                              value + "'");
        }
        c.units = value;
    } else if (key == "grid_start") {
        c.grid_start = parse_double(value, key);
    } else if (key == "grid_stop") {
        c.grid_stop = parse_double(value, key);
    } else if (key == "grid_step") {
        c.grid_step = parse_double(value, key);
    } else if (key == "seed") {
        c.seed = parse_u64(value, key);
    } else if (key == "n_traj") {
        c.n_traj = parse_long(value, key);
    } else if (key == "horizon") {
        c.horizon = parse_double(value, key);
    } else if (key == "t0_prime") {
        c.t0_prime = parse_double(value, key);
    } else if (key == "t3_threshold") {
        c.t3_threshold = parse_double(value, key);
    } else if (key == "out") {
        c.out = value;
    } else if (key == "threads") {
        c.threads = static_cast<int>(parse_long(value, key));
    } else if (key == "bins") {
        c.bins = static_cast<int>(parse_long(value, key));
    } else {
        throw ConfigError("config: unknown key '" + key + "'");
    }
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    RunConfig c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": empty key or value");
        }
        assign(c, key, value);
    }
    return c;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config: cannot open '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

RunConfig merge(RunConfig base, const RunConfig& over) {
    if (over.omega1) base.omega1 = over.omega1;
    if (over.omega2) base.omega2 = over.omega2;
    if (over.beta1) base.beta1 = over.beta1;
    if (over.beta2) base.beta2 = over.beta2;
    if (over.units) base.units = over.units;
    if (over.grid_start) base.grid_start = over.grid_start;
    if (over.grid_stop) base.grid_stop = over.grid_stop;
    if (over.grid_step) base.grid_step = over.grid_step;
    if (over.seed) base.seed = over.seed;
    if (over.n_traj) base.n_traj = over.n_traj;
    if (over.horizon) base.horizon = over.horizon;
    if (over.t0_prime) base.t0_prime = over.t0_prime;
    if (over.t3_threshold) base.t3_threshold = over.t3_threshold;
    if (over.out) base.out = over.out;
    if (over.threads) base.threads = over.threads;
    if (over.bins) base.bins = over.bins;
    return base;
}

ResolvedParams resolve_params(const RunConfig& cfg) {
    if (!cfg.omega1 || !cfg.omega2 || !cfg.beta1) {
        throw ConfigError("config: omega1, omega2 and beta1 are required");
    }
    ResolvedParams r;
    r.units = cfg.units.value_or("angular");
    r.omega1_input = *cfg.omega1;
    r.omega2_input = *cfg.omega2;
    const double beta2 = cfg.beta2.value_or(0.0);
    try {
        if (r.units == "hertz") {
            r.params = params_from_hertz(*cfg.omega1, *cfg.omega2, *cfg.beta1, beta2);
        } else {
            r.params = make_params(*cfg.omega1, *cfg.omega2, *cfg.beta1, beta2);
        }
    } catch (const InvalidParamsError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return r;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return buf;
}

}  // namespace nextjump::cli
