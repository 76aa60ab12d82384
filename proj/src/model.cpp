#include "nextjump/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace nextjump {

void validate(const SystemParams& p) {
    if (!std::isfinite(p.omega1) || !std::isfinite(p.omega2) ||
        !std::isfinite(p.beta1) || !std::isfinite(p.beta2)) {
        throw InvalidParamsError("SystemParams: all rates must be finite");
    }
    if (!(p.beta1 > 0.0)) {
        throw InvalidParamsError("SystemParams: beta1 must be strictly positive");
    }
    if (p.omega1 < 0.0 || p.omega2 < 0.0 || p.beta2 < 0.0) {
        throw InvalidParamsError(
            "SystemParams: omega1, omega2, beta2 must be non-negative");
    }
}

SystemParams make_params(double omega1, double omega2, double beta1, double beta2) {
    SystemParams p{omega1, omega2, beta1, beta2};
    validate(p);
    return p;
}

SystemParams params_from_hertz(double omega1_hz, double omega2_hz,
                               double beta1, double beta2) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    return make_params(two_pi * omega1_hz, two_pi * omega2_hz, beta1, beta2);
}

DerivedRates derive_rates(const SystemParams& p) {
    validate(p);
    if (p.omega1 <= 0.0) {
        throw EtaUndefinedError("derive_rates: eta = omega2/omega1 undefined for omega1 = 0");
    }
    DerivedRates r;
    r.epsilon = p.omega1 / p.beta1;
    r.eta = p.omega2 / p.omega1;
    const double h = r.eta / (2.0 * r.epsilon);
    r.alpha = h * h;
    r.beta_ell = p.beta2 / 4.0 + p.beta1 * r.epsilon * r.epsilon;
    return r;
}

const char* to_string(RegimeTag tag) {
    switch (tag) {
        case RegimeTag::Underdamped: return "Underdamped";
        case RegimeTag::Overdamped: return "Overdamped";
        case RegimeTag::Crossover: return "Crossover";
    }
    return "?";
}

Regime classify_regime(const DerivedRates& rates, const SystemParams& p,
                       RegimeThresholds thresholds) {
    if (rates.beta_ell <= 0.0) {
        if (p.omega2 > 0.0) {
            return {RegimeTag::Underdamped, std::numeric_limits<double>::infinity()};
        }
        throw InvalidParamsError(
            "classify_regime: beta_ell = 0 with omega2 = 0 has no regime");
    }
    const double ratio = p.omega2 / rates.beta_ell;
    const double margin = ratio * ratio;
    RegimeTag tag = RegimeTag::Crossover;
    if (margin > thresholds.hi) {
        tag = RegimeTag::Underdamped;
    } else if (margin < thresholds.lo) {
        tag = RegimeTag::Overdamped;
    }
    return {tag, margin};
}

}  // namespace nextjump
