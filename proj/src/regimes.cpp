#include "nextjump/regimes.hpp"

#include <cmath>
#include <limits>

#include "nextjump/spectral.hpp"

namespace nextjump {

namespace {

void warn(std::vector<std::string>* sink, std::string msg) {
    if (sink != nullptr) sink->push_back(std::move(msg));
}

void warn_if_not(RegimeTag want, const SystemParams& p, const char* who,
                 std::vector<std::string>* sink) {
    const Regime reg = classify_regime(derive_rates(p), p);
    if (reg.tag != want) {
        warn(sink, std::string(who) + ": regime is " + to_string(reg.tag) +
                       ", formula outside validity");
    }
}

}  // namespace

Amplitudes underdamped_after_reset(double t, const SystemParams& p,
                                   std::vector<std::string>* warnings) {
    const DerivedRates r = derive_rates(p);
    warn_if_not(RegimeTag::Underdamped, p, "underdamped_after_reset", warnings);
    if (p.beta2 > 4.0 * p.beta1 * r.epsilon * r.epsilon) {
        warn(warnings, "underdamped_after_reset: beta2 > 4 beta1 eps^2, "
                       "outside the stated exposition range");
    }
    const double env_slow = std::exp(-r.beta_ell * t);
    const double env_fast = std::exp(-p.beta1 * t / 2.0);
    const double cosw = std::cos(p.omega2 * t);
    const double sinw = std::sin(p.omega2 * t);
    return {cosw * env_slow,
            2.0 * r.epsilon * env_fast - 2.0 * r.epsilon * cosw * env_slow,
            -sinw * env_slow};
}

double renormalization_factor(const SystemParams& p) {
    const DerivedRates r = derive_rates(p);
    const double e2 = 4.0 * r.epsilon * r.epsilon;
    if (e2 >= 1.0) {
        throw RegimeDomainError(
            "renormalization_factor: 4 eps^2 >= 1, f undefined");
    }
    return std::sqrt(1.0 / (1.0 - e2));
}

Amplitudes underdamped_dark(double t, double t0_prime, const SystemParams& p,
                            std::vector<std::string>* warnings) {
    const DerivedRates r = derive_rates(p);
    const double f = renormalization_factor(p);
    warn_if_not(RegimeTag::Underdamped, p, "underdamped_dark", warnings);
    if (t < t0_prime) {
        warn(warnings, "underdamped_dark: t < t0', before the dark-period onset");
    }
    const double env = std::exp(-r.beta_ell * (t - t0_prime));
    const double cosw = std::cos(p.omega2 * t);
    const double sinw = std::sin(p.omega2 * t);
    return {f * cosw * env, -2.0 * r.epsilon * f * cosw * env, -f * sinw * env};
}

namespace {

// lambda2, lambda3 as used by the overdamped closed forms. Computed by role
// (the O(eps^2) and O(eta^2) rates), not by magnitude ordering, so the naming
// survives outside the assumed regime.
std::pair<double, double> overdamped_pair(const SystemParams& p) {
    const DerivedRates r = derive_rates(p);
    const double l2 = -2.0 * r.beta_ell;
    const double l3 = -r.eta * r.eta * p.beta1 / 2.0;
    return {l2, l3};
}

void check_overdamped_domain(const SystemParams& p, const char* who,
                             std::vector<std::string>* warnings) {
    const DerivedRates r = derive_rates(p);
    if (r.alpha >= 1.0) {
        throw RegimeDomainError(std::string(who) +
                                ": alpha = eta^2/4eps^2 >= 1, outside validity");
    }
    warn_if_not(RegimeTag::Overdamped, p, who, warnings);
    if (r.eta > 0.0 && p.beta2 >= p.beta1 * r.eta * r.eta / 4.0) {
        warn(warnings, std::string(who) + ": beta2 not << beta1 eta^2");
    }
}

}  // namespace

Amplitudes overdamped_dark(double t, const SystemParams& p,
                           std::vector<std::string>* warnings) {
    check_overdamped_domain(p, "overdamped_dark", warnings);
    const DerivedRates r = derive_rates(p);
    const auto [l2, l3] = overdamped_pair(p);
    const double e2 = std::exp(l2 * t);
    const double e3 = std::exp(l3 * t);
    const double eta2e = (r.epsilon > 0.0) ? r.eta * r.eta / (2.0 * r.epsilon) : 0.0;
    const double h = r.eta / (2.0 * r.epsilon);
    return {e2 - r.alpha * e3, -2.0 * r.epsilon * e2 + eta2e * e3,
            h * (e2 - e3)};
}

Amplitudes overdamped_extralong(double t, const SystemParams& p,
                                std::vector<std::string>* warnings) {
    check_overdamped_domain(p, "overdamped_extralong", warnings);
    const DerivedRates r = derive_rates(p);
    const auto [l2, l3] = overdamped_pair(p);
    (void)l2;
    const double e3 = std::exp(l3 * t);
    const double h = r.eta / (2.0 * r.epsilon);
    return {-h * e3, r.eta * e3, -e3};
}

double relative_occupation_Z(double c0, double c2) {
    const double a = c2 * c2;
    const double b = c0 * c0;
    if (a + b <= 0.0) {
        throw RegimeDomainError("relative_occupation_Z: c0 = c2 = 0");
    }
    return (a - b) / (a + b);
}

double full_shelving_time(const SystemParams& p) {
    const DerivedRates r = derive_rates(p);
    if (r.alpha >= 1.0) {
        throw RegimeDomainError(
            "full_shelving_time: alpha >= 1, c0 has no zero crossing");
    }
    if (r.alpha <= 0.0) {
        throw RegimeDomainError(
            "full_shelving_time: alpha = 0, dark level decoupled");
    }
    const auto [l2, l3] = overdamped_pair(p);
    // c0 = 0 at exp((l2 - l3) t) = alpha; ln(alpha) and l2 - l3 are both
    // negative, so t2 > 0.
    return std::log(r.alpha) / (l2 - l3);
}

DarkPeriodPredictions dark_period_predictions(const SystemParams& p,
                                              double t0_prime) {
    const DerivedRates r = derive_rates(p);
    DarkPeriodPredictions out;

    // Measured no-jump probability through t0' (the O(eps^2) coefficient is
    // not a universal constant, so it is integrated, not guessed).
    const Generator g = build_generator(p);
    const double dt = default_step(p);
    const int n = std::max(1, static_cast<int>(std::ceil(t0_prime / dt)));
    AmplitudeState s = reset_state();
    const double h = t0_prime / n;
    for (int i = 0; i < n; ++i) s = rk4_step(s, g, h).state;
    out.p_dark_after_reset = survival(s);
    out.eps2_coefficient =
        (1.0 - out.p_dark_after_reset) / (r.epsilon * r.epsilon);

    out.p_extralong = r.alpha;
    const double eta2b1 = r.eta * r.eta * p.beta1;
    out.t3 = (eta2b1 > 0.0) ? 2.0 / eta2b1 : std::numeric_limits<double>::infinity();
    if (p.beta2 == 0.0) {
        out.p_end_from_level2_extralong = 0.0;
        out.p_end_from_level2_exact = 0.0;
    } else if (eta2b1 > 0.0) {
        out.p_end_from_level2_extralong = p.beta2 / eta2b1;
        out.p_end_from_level2_exact = p.beta2 / (p.beta2 + eta2b1);
    } else {
        out.p_end_from_level2_extralong = std::numeric_limits<double>::infinity();
        out.p_end_from_level2_exact = 1.0;
    }
    out.split_beta2 = 4.0 * p.beta1 * r.epsilon * r.epsilon;
    return out;
}

const char* to_string(CurveForm form) {
    switch (form) {
        case CurveForm::UnderdampedAfterReset: return "underdamped_after_reset";
        case CurveForm::UnderdampedDark: return "underdamped_dark";
        case CurveForm::OverdampedDark: return "overdamped_dark";
        case CurveForm::OverdampedExtraLong: return "overdamped_extralong";
    }
    return "?";
}

RegimeCurves sample_regime_curves(CurveForm form, const std::vector<double>& times,
                                  const SystemParams& p, double t0_prime,
                                  std::vector<std::string>* warnings) {
    const DerivedRates r = derive_rates(p);
    RegimeCurves out;
    out.label = to_string(form);
    out.t.reserve(times.size());

    // Emit any domain warnings once, not per sample.
    std::vector<std::string> first_warn;
    bool first = true;
    for (const double t : times) {
        Amplitudes a;
        std::vector<std::string>* sink = first ? &first_warn : nullptr;
        switch (form) {
            case CurveForm::UnderdampedAfterReset:
                a = underdamped_after_reset(t, p, sink);
                break;
            case CurveForm::UnderdampedDark:
                a = underdamped_dark(t, t0_prime, p, sink);
                break;
            case CurveForm::OverdampedDark:
                a = overdamped_dark(t, p, sink);
                break;
            case CurveForm::OverdampedExtraLong:
                a = overdamped_extralong(t, p, sink);
                break;
        }
        first = false;
        out.t.push_back(t);
        out.c0.push_back(a.c0);
        out.c1.push_back(a.c1);
        out.c2.push_back(a.c2);
        out.W.push_back(a.c0 * a.c0 + a.c1 * a.c1 + a.c2 * a.c2);
        const double denom = a.c0 * a.c0 + a.c2 * a.c2;
        out.Z.push_back(denom > 0.0
                            ? relative_occupation_Z(a.c0, a.c2)
                            : std::numeric_limits<double>::quiet_NaN());
        out.pbar10.push_back(a.c1 * a.c1 / (4.0 * r.epsilon * r.epsilon));
        out.p20.push_back(a.c2 * a.c2);
    }
    if (warnings != nullptr) {
        warnings->insert(warnings->end(), first_warn.begin(), first_warn.end());
    }
    return out;
}

}  // namespace nextjump
