#include "nextjump/propagator.hpp"

#include <cmath>

namespace nextjump {

Generator build_generator(const SystemParams& p) {
    validate(p);
    Generator g;
    g.m[0][0] = 0.0;
    g.m[0][1] = p.omega1;
    g.m[0][2] = p.omega2;
    g.m[1][0] = -p.omega1;
    g.m[1][1] = -p.beta1 / 2.0;
    g.m[1][2] = 0.0;
    g.m[2][0] = -p.omega2;
    g.m[2][1] = 0.0;
    g.m[2][2] = -p.beta2 / 2.0;
    return g;
}

double survival(const AmplitudeState& s) {
    return s.c0 * s.c0 + s.c1 * s.c1 + s.c2 * s.c2;
}

std::pair<double, double> emission_rates(const AmplitudeState& s,
                                         const SystemParams& p) {
    return {p.beta1 * s.c1 * s.c1, p.beta2 * s.c2 * s.c2};
}

AmplitudeState condition_on_no_jump(const AmplitudeState& s) {
    const double w = survival(s);
    if (w <= 0.0) {
        throw ConditioningError(
            "condition_on_no_jump: W = 0, emission already certain");
    }
    const double inv = 1.0 / std::sqrt(w);
    return {s.c0 * inv, s.c1 * inv, s.c2 * inv, s.t};
}

namespace {

struct Vec3 {
    double x0, x1, x2;
};

inline Vec3 apply(const Generator& g, double a, double b, double c) {
    return {g.m[0][0] * a + g.m[0][1] * b + g.m[0][2] * c,
            g.m[1][0] * a + g.m[1][1] * b + g.m[1][2] * c,
            g.m[2][0] * a + g.m[2][1] * b + g.m[2][2] * c};
}

inline double leak_rate(const Generator& g, double c1, double c2) {
    return g.beta1() * c1 * c1 + g.beta2() * c2 * c2;
}

}  // namespace

StepResult rk4_step(const AmplitudeState& s, const Generator& g, double dt) {
    const double h2 = dt / 2.0;

    const Vec3 k1 = apply(g, s.c0, s.c1, s.c2);
    const double a1 = s.c0 + h2 * k1.x0, b1 = s.c1 + h2 * k1.x1, c1 = s.c2 + h2 * k1.x2;

    const Vec3 k2 = apply(g, a1, b1, c1);
    const double a2 = s.c0 + h2 * k2.x0, b2 = s.c1 + h2 * k2.x1, c2 = s.c2 + h2 * k2.x2;

    const Vec3 k3 = apply(g, a2, b2, c2);
    const double a3 = s.c0 + dt * k3.x0, b3 = s.c1 + dt * k3.x1, c3 = s.c2 + dt * k3.x2;

    const Vec3 k4 = apply(g, a3, b3, c3);

    StepResult r;
    r.state.c0 = s.c0 + dt / 6.0 * (k1.x0 + 2.0 * k2.x0 + 2.0 * k3.x0 + k4.x0);
    r.state.c1 = s.c1 + dt / 6.0 * (k1.x1 + 2.0 * k2.x1 + 2.0 * k3.x1 + k4.x1);
    r.state.c2 = s.c2 + dt / 6.0 * (k1.x2 + 2.0 * k2.x2 + 2.0 * k3.x2 + k4.x2);
    r.state.t = s.t + dt;

    // RK4 on the augmented leak integral (the integrand never feeds back, so
    // this is a same-order quadrature over the step).
    const double l1 = leak_rate(g, s.c1, s.c2);
    const double l2 = leak_rate(g, b1, c1);
    const double l3 = leak_rate(g, b2, c2);
    const double l4 = leak_rate(g, b3, c3);
    r.leak = dt / 6.0 * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
    return r;
}

namespace {

void check_step(const Generator& g, double dt) {
    if (!(dt > 0.0)) {
        throw StepSizeError("evolve: dt must be positive");
    }
    if (dt * g.beta1() > kMaxStepTau * (1.0 + 1e-12)) {
        throw StepSizeError(
            "evolve: dt * beta1 exceeds 0.1; reduce the step to resolve the "
            "fast scale");
    }
}

}  // namespace

std::vector<AmplitudeState> evolve(const AmplitudeState& s0, const Generator& g,
                                   double dt, int n_steps) {
    check_step(g, dt);
    std::vector<AmplitudeState> out;
    out.reserve(static_cast<std::size_t>(n_steps) + 1);
    out.push_back(s0);
    AmplitudeState s = s0;
    for (int i = 0; i < n_steps; ++i) {
        s = rk4_step(s, g, dt).state;
        out.push_back(s);
    }
    return out;
}

TrackedTrajectory evolve_tracked(const AmplitudeState& s0, const Generator& g,
                                 double dt, int n_steps) {
    check_step(g, dt);
    TrackedTrajectory tr;
    tr.states.reserve(static_cast<std::size_t>(n_steps) + 1);
    tr.leak.reserve(static_cast<std::size_t>(n_steps) + 1);
    tr.states.push_back(s0);
    tr.leak.push_back(0.0);
    AmplitudeState s = s0;
    double acc = 0.0;
    for (int i = 0; i < n_steps; ++i) {
        const StepResult r = rk4_step(s, g, dt);
        s = r.state;
        acc += r.leak;
        tr.states.push_back(s);
        tr.leak.push_back(acc);
    }
    return tr;
}

}  // namespace nextjump
