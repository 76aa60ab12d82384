#pragma once

#include <utility>
#include <vector>

#include "nextjump/model.hpp"

namespace nextjump {

// Conditional no-jump amplitudes: joint amplitude to be in level |i> AND to
// have emitted nothing since the last reset. Real-valued at zero detuning
// with real drives.
struct AmplitudeState {
    double c0 = 1.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double t = 0.0;  // time since last reset, s
};

inline AmplitudeState reset_state() { return {1.0, 0.0, 0.0, 0.0}; }

// 3x3 real generator of d(c0,c1,c2)/dt = A c:
//   [ 0        omega1    omega2  ]
//   [ -omega1  -beta1/2  0       ]
//   [ -omega2  0         -beta2/2]
// No |1>-|2> coupling by construction.
struct Generator {
    double m[3][3] = {};
    double beta1() const { return -2.0 * m[1][1]; }
    double beta2() const { return -2.0 * m[2][2]; }
};

Generator build_generator(const SystemParams& p);

// W = c0^2 + c1^2 + c2^2 (survival probability of the no-jump record).
double survival(const AmplitudeState& s);

// (beta1 c1^2, beta2 c2^2): instantaneous emission rate into each channel.
// The dissipation identity dW/dt = -(rate1 + rate2) follows from the ODE.
std::pair<double, double> emission_rates(const AmplitudeState& s,
                                         const SystemParams& p);

// Renormalize after an observed no-jump interval: divide by sqrt(W).
// Throws ConditioningError when W = 0. Idempotent.
AmplitudeState condition_on_no_jump(const AmplitudeState& s);

// Integrator constants. tol_norm is per unit tau, tol_cons is relative per
// step; RK4 at dt*beta1 = 0.01 has local error around 1e-10 for O(1)
// coefficients, so both have sizable headroom.
inline constexpr double kDefaultStepTau = 0.01;  // dt * beta1
inline constexpr double kMaxStepTau = 0.1;       // hard guard
inline constexpr double kTolNorm = 1e-9;
inline constexpr double kTolCons = 1e-8;

inline double default_step(const SystemParams& p) { return kDefaultStepTau / p.beta1; }

// Default dark-period onset t0' ~ 4/beta1 (configurable; the source analysis
// only gives the approximation).
inline double default_dark_onset(const SystemParams& p) { return 4.0 / p.beta1; }

// One classical RK4 step. `leak` is the step's emission integral
// int (beta1 c1^2 + beta2 c2^2) dt evaluated with the same RK4 stages, so
// W(t+dt) - W(t) + leak vanishes to the scheme's order.
struct StepResult {
    AmplitudeState state;
    double leak = 0.0;
};

StepResult rk4_step(const AmplitudeState& s, const Generator& g, double dt);

// Fixed-step integration; returns n_steps+1 states including the input.
// Throws StepSizeError when dt <= 0 or dt*beta1 > kMaxStepTau.
std::vector<AmplitudeState> evolve(const AmplitudeState& s0, const Generator& g,
                                   double dt, int n_steps);

// Same trajectory plus the cumulative emission integral at every state
// (leak[0] = 0). Used by the conservation checks.
struct TrackedTrajectory {
    std::vector<AmplitudeState> states;
    std::vector<double> leak;
};

TrackedTrajectory evolve_tracked(const AmplitudeState& s0, const Generator& g,
                                 double dt, int n_steps);

}  // namespace nextjump
