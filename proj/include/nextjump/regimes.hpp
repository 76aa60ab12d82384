#pragma once

#include <string>
#include <vector>

#include "nextjump/model.hpp"
#include "nextjump/propagator.hpp"

namespace nextjump {

// Plain amplitude triple from a closed form (no time stamp).
struct Amplitudes {
    double c0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
};

// After-reset underdamped form:
//   c0 =  cos(w2 t) e^{-bl t}
//   c1 =  2e e^{-b1 t/2} - 2e cos(w2 t) e^{-bl t}
//   c2 = -sin(w2 t) e^{-bl t}
// Exactly (1,0,0) at t = 0. Warns outside the underdamped regime or when
// beta2 exceeds 4 beta1 eps^2 (the exposition range).
Amplitudes underdamped_after_reset(double t, const SystemParams& p,
                                   std::vector<std::string>* warnings = nullptr);

// f = sqrt(1/(1 - 4 eps^2)); the renormalization built into the dark-period
// form. Throws RegimeDomainError when 4 eps^2 >= 1.
double renormalization_factor(const SystemParams& p);

// Dark-period underdamped form (t >= t0_prime):
//   c0 =  f cos(w2 t) e^{-bl (t - t0')}
//   c1 = -2e f cos(w2 t) e^{-bl (t - t0')}
//   c2 = -f sin(w2 t) e^{-bl (t - t0')}
Amplitudes underdamped_dark(double t, double t0_prime, const SystemParams& p,
                            std::vector<std::string>* warnings = nullptr);

// Overdamped dark-period form. t is measured from the dark-period onset
// (the derivation sets c0 = 1, c2 = 0 there):
//   c0 = e^{l2 t} - a e^{l3 t}
//   c1 = -2e e^{l2 t} + (eta^2/2e) e^{l3 t}
//   c2 = (eta/2e) (e^{l2 t} - e^{l3 t})
// with l2 = -2 beta_ell, l3 = -eta^2 beta1 / 2. Requires alpha < 1.
Amplitudes overdamped_dark(double t, const SystemParams& p,
                           std::vector<std::string>* warnings = nullptr);

// Extra-long tail direction (t >> 1/|l2|), unnormalized:
//   (c0, c1, c2) = (-(eta/2e), eta, -1) e^{l3 t}
Amplitudes overdamped_extralong(double t, const SystemParams& p,
                                std::vector<std::string>* warnings = nullptr);

// Z = (c2^2 - c0^2)/(c2^2 + c0^2) in [-1, 1]; rejects c0 = c2 = 0.
double relative_occupation_Z(double c0, double c2);

// Unique zero of the overdamped c0: t2 = ln(alpha)/(lambda2 - lambda3),
// positive for alpha < 1 (full shelving: Z(t2) = 1). Throws for alpha >= 1.
double full_shelving_time(const SystemParams& p);

struct DarkPeriodPredictions {
    // Probability that a reset is followed by a dark period, i.e. no jump
    // through t0'. Measured numerically as W(t0'); 1 - p is O(eps^2).
    double p_dark_after_reset = 0.0;
    double eps2_coefficient = 0.0;  // (1 - W(t0')) / eps^2
    double p_extralong = 0.0;       // eta^2 / 4 eps^2
    double t3 = 0.0;                // 2 / (eta^2 beta1), s
    // Channel of the jump that ends an extra-long dark period:
    double p_end_from_level2_extralong = 0.0;  // beta2/(beta1 eta^2), leading order
    double p_end_from_level2_exact = 0.0;      // beta2/(beta2 + beta1 eta^2)
    // beta2 at which the underdamped dark period ends 50:50 bright/dark
    // when averaged over a Rabi cycle.
    double split_beta2 = 0.0;  // 4 beta1 eps^2
};

DarkPeriodPredictions dark_period_predictions(const SystemParams& p,
                                              double t0_prime);

enum class CurveForm {
    UnderdampedAfterReset,
    UnderdampedDark,
    OverdampedDark,
    OverdampedExtraLong,
};

const char* to_string(CurveForm form);

// Sampled closed-form table over a caller time grid. Z is NaN where
// c0 = c2 = 0. Pbar10 = c1^2/4eps^2, P20 = c2^2.
struct RegimeCurves {
    std::string label;
    std::vector<double> t;
    std::vector<double> c0, c1, c2;
    std::vector<double> W;
    std::vector<double> Z;
    std::vector<double> pbar10;
    std::vector<double> p20;
};

RegimeCurves sample_regime_curves(CurveForm form, const std::vector<double>& times,
                                  const SystemParams& p, double t0_prime,
                                  std::vector<std::string>* warnings = nullptr);

}  // namespace nextjump
