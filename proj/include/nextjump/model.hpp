#pragma once

#include <string>
#include <vector>

#include "nextjump/errors.hpp"

namespace nextjump {

// Physical rates of the driven three-level atom. Omegas are angular Rabi
// frequencies (rad/s), betas are spontaneous decay rates (1/s). beta1 sets
// the fast time scale: tau = beta1 * t.
struct SystemParams {
    double omega1 = 0.0;
    double omega2 = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;
};

// Throws InvalidParamsError unless beta1 > 0, omega1 >= 0, omega2 >= 0,
// beta2 >= 0 and all finite. Phases are out of scope: omegas are real
// and non-negative by convention.
void validate(const SystemParams& p);

SystemParams make_params(double omega1, double omega2, double beta1, double beta2);

// Hertz input mode: drive frequencies are quoted as Omega/2pi in Hz and get
// multiplied by 2pi; betas are already plain rates in 1/s and pass through.
// This is the only convention that reproduces eps = .13 from the quoted
// "Omega_1/2pi = 1 MHz, beta_1 = 48 MHz".
SystemParams params_from_hertz(double omega1_hz, double omega2_hz,
                               double beta1, double beta2);

// Dimensionless groups and the slow rate:
//   epsilon  = omega1/beta1
//   eta      = omega2/omega1            (requires omega1 > 0)
//   alpha    = (eta/(2 epsilon))^2
//   beta_ell = beta2/4 + beta1 epsilon^2   [1/s]
struct DerivedRates {
    double epsilon = 0.0;
    double eta = 0.0;
    double alpha = 0.0;
    double beta_ell = 0.0;
};

DerivedRates derive_rates(const SystemParams& p);

enum class RegimeTag { Underdamped, Overdamped, Crossover };

const char* to_string(RegimeTag tag);

// Dead zone around margin = 1; the asymptotic inequalities in the analysis
// are only order-of-magnitude, so the boundary is configurable.
struct RegimeThresholds {
    double lo = 0.25;
    double hi = 4.0;
};

struct Regime {
    RegimeTag tag = RegimeTag::Crossover;
    double margin = 0.0;  // omega2^2 / beta_ell^2
};

// margin > hi => Underdamped, margin < lo => Overdamped, else Crossover.
// beta_ell == 0 with omega2 > 0 classifies Underdamped directly (margin inf).
Regime classify_regime(const DerivedRates& rates, const SystemParams& p,
                       RegimeThresholds thresholds = {});

}  // namespace nextjump
