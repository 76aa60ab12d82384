#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "nextjump/propagator.hpp"
#include "oracle_helpers.hpp"

using namespace nextjump;

namespace {
const SystemParams kFig2 = make_params(1.0 / 24.0, 1.0 / 48.0, 1.0, 0.0);
}

TEST_CASE("build_generator: decoupled decay case") {
    const Generator g = build_generator(make_params(0, 0, 2, 4));
    CHECK(g.m[0][0] == 0.0);
    CHECK(g.m[1][1] == -1.0);
    CHECK(g.m[2][2] == -2.0);
    CHECK(g.m[0][1] == 0.0);
    CHECK(g.m[1][0] == 0.0);
}

TEST_CASE("build_generator: figure-2 entries") {
    const Generator g = build_generator(kFig2);
    CHECK(g.m[0][1] == 1.0 / 24.0);
    CHECK(g.m[1][0] == -1.0 / 24.0);
    CHECK(g.m[0][2] == 1.0 / 48.0);
    CHECK(g.m[2][0] == -1.0 / 48.0);
    CHECK(g.m[1][1] == -0.5);
    CHECK(g.m[2][2] == 0.0);
}

TEST_CASE("build_generator: no |1>-|2> coupling, zero diagonal at |0>") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.0, 3.0);
    for (int i = 0; i < 50; ++i) {
        const Generator g =
            build_generator(make_params(U(rng), U(rng), U(rng) + 0.1, U(rng)));
        CHECK(g.m[0][0] == 0.0);
        CHECK(g.m[1][2] == 0.0);
        CHECK(g.m[2][1] == 0.0);
    }
}

TEST_CASE("evolve: ground state is stationary without drive") {
    const SystemParams p = make_params(0, 0, 1, 0);
    const auto states = evolve(reset_state(), build_generator(p), 0.01, 1000);
    REQUIRE(states.size() == 1001);
    for (const auto& s : states) {
        CHECK(s.c0 == 1.0);
        CHECK(s.c1 == 0.0);
        CHECK(s.c2 == 0.0);
    }
}

TEST_CASE("evolve: step-size guard") {
    const Generator g = build_generator(kFig2);
    CHECK_THROWS_AS((void)evolve(reset_state(), g, 0.2, 10), StepSizeError);
    CHECK_THROWS_AS((void)evolve(reset_state(), g, -0.01, 10), StepSizeError);
    CHECK_NOTHROW((void)evolve(reset_state(), g, 0.1, 1));
}

TEST_CASE("evolve: two-level reduction matches the closed-form oracle") {
    // omega2 = 0 decouples c2; the (c0, c1) block must match the exact 2x2
    // solution to 1e-8 at dt*beta1 = 0.01.
    const SystemParams p = make_params(1.0 / 24.0, 0.0, 1.0, 0.0);
    const oracle::TwoLevel two(1.0 / 24.0, 1.0);

    // the oracle itself reproduces frozen scipy.expm spot values
    CHECK(two.at(1.0).first ==
          doctest::Approx(9.992603070780426e-01).epsilon(1e-12));
    CHECK(two.at(1.0).second ==
          doctest::Approx(-3.277966421687550e-02).epsilon(1e-12));
    CHECK(two.at(10.0).first ==
          doctest::Approx(9.724368616390574e-01).epsilon(1e-12));
    CHECK(two.at(100.0).second ==
          doctest::Approx(-5.957681553256147e-02).epsilon(1e-12));

    const auto states = evolve(reset_state(), build_generator(p), 0.01, 10000);
    double max_err = 0.0;
    for (std::size_t k = 0; k < states.size(); k += 25) {
        const auto [c0, c1] = two.at(0.01 * static_cast<double>(k));
        max_err = std::max(max_err, std::abs(states[k].c0 - c0));
        max_err = std::max(max_err, std::abs(states[k].c1 - c1));
        CHECK(states[k].c2 == 0.0);
    }
    CHECK(max_err < 1e-8);
}

TEST_CASE("survival: reset state and no-decay case") {
    CHECK(survival(reset_state()) == 1.0);
    const SystemParams p = make_params(0, 0, 1, 0);
    for (const auto& s : evolve(reset_state(), build_generator(p), 0.05, 200)) {
        CHECK(survival(s) == 1.0);
    }
}

TEST_CASE("survival: equals 1 minus the emission integral (figure 2, tau = 5)") {
    const double dt = 0.01;
    const int n = 500;
    const auto tr = evolve_tracked(reset_state(), build_generator(kFig2), dt, n);
    const double w5 = survival(tr.states.back());
    CHECK(w5 > 0.0);
    CHECK(w5 < 1.0);

    // independent quadrature of the emission rate along the trajectory
    std::vector<double> rate;
    rate.reserve(tr.states.size());
    for (const auto& s : tr.states) {
        const auto [r1, r2] = emission_rates(s, kFig2);
        rate.push_back(r1 + r2);
    }
    const double leak_simpson = oracle::simpson(rate, dt);
    CHECK(std::abs(w5 - (1.0 - leak_simpson)) < kTolCons);
    CHECK(std::abs(w5 - (1.0 - tr.leak.back())) < kTolCons);
}

TEST_CASE("emission_rates: trivial cases") {
    CHECK(emission_rates(reset_state(), kFig2) ==
          std::pair<double, double>{0.0, 0.0});
    const AmplitudeState bright{0.0, 1.0, 0.0, 0.0};
    const SystemParams p = make_params(0.1, 0.1, 48.0e6, 0.0);
    CHECK(emission_rates(bright, p).first == 48.0e6);
}

TEST_CASE("emission_rates: -dW/dt equals the total rate along figure 2") {
    // 5-point stencil keeps the differentiation error far below tol_cons.
    const double dt = 0.01;
    const auto states = evolve(reset_state(), build_generator(kFig2), dt, 2000);
    std::vector<double> w;
    w.reserve(states.size());
    for (const auto& s : states) w.push_back(survival(s));
    for (std::size_t k = 100; k + 100 < states.size(); k += 37) {
        const double dwdt = (-w[k + 2] + 8.0 * w[k + 1] - 8.0 * w[k - 1] + w[k - 2]) /
                            (12.0 * dt);
        const auto [r1, r2] = emission_rates(states[k], kFig2);
        const double total = r1 + r2;
        if (total < 1e-4) continue;
        CHECK(std::abs(-dwdt - total) / total < kTolCons);
    }
}

TEST_CASE("condition_on_no_jump: reset unchanged, exact scaling, idempotence") {
    const AmplitudeState r = condition_on_no_jump(reset_state());
    CHECK(r.c0 == 1.0);
    CHECK(r.c1 == 0.0);
    CHECK(r.c2 == 0.0);

    // 3-4-5 triple, half scale
    const AmplitudeState s = condition_on_no_jump({0.3, 0.0, 0.4, 2.0});
    CHECK(s.c0 == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(s.c2 == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(s.t == 2.0);

    CHECK_THROWS_AS((void)condition_on_no_jump({0.0, 0.0, 0.0, 1.0}),
                    ConditioningError);

    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const AmplitudeState x{U(rng), U(rng), U(rng), 0.0};
        if (survival(x) < 1e-8) continue;
        const AmplitudeState once = condition_on_no_jump(x);
        CHECK(survival(once) == doctest::Approx(1.0).epsilon(1e-12));
        const AmplitudeState twice = condition_on_no_jump(once);
        CHECK(twice.c0 == doctest::Approx(once.c0).epsilon(1e-12));
        CHECK(twice.c1 == doctest::Approx(once.c1).epsilon(1e-12));
        CHECK(twice.c2 == doctest::Approx(once.c2).epsilon(1e-12));
    }
}

TEST_CASE("condition_on_no_jump: preserves amplitude ratios") {
    // dark-period structure: ratios are independent of the scale factor
    const double eps = 1.0 / 24.0;
    for (double g : {1.0, 0.5, 0.037}) {
        const double c = std::cos(0.4), s = std::sin(0.4);
        const AmplitudeState x{c * g, -2.0 * eps * c * g, -s * g, 0.0};
        const AmplitudeState y = condition_on_no_jump(x);
        CHECK(y.c1 / y.c0 == doctest::Approx(-2.0 * eps).epsilon(1e-13));
        CHECK(y.c2 / y.c0 == doctest::Approx(-s / c).epsilon(1e-13));
    }
}

TEST_CASE("properties: linearity of the integrator") {
    const Generator g = build_generator(kFig2);
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (int i = 0; i < 20; ++i) {
        const AmplitudeState x{U(rng), U(rng), U(rng), 0.0};
        const double a = U(rng);
        const AmplitudeState ax{a * x.c0, a * x.c1, a * x.c2, 0.0};
        const auto t1 = evolve(x, g, 0.01, 200);
        const auto t2 = evolve(ax, g, 0.01, 200);
        for (std::size_t k = 0; k < t1.size(); k += 40) {
            CHECK(t2[k].c0 == doctest::Approx(a * t1[k].c0).epsilon(1e-12));
            CHECK(t2[k].c1 == doctest::Approx(a * t1[k].c1).epsilon(1e-12));
            CHECK(t2[k].c2 == doctest::Approx(a * t1[k].c2).epsilon(1e-12));
        }
    }
}

TEST_CASE("properties: W monotone and norm bounded on figure 2") {
    const auto tr = evolve_tracked(reset_state(), build_generator(kFig2), 0.01, 5000);
    double prev = survival(tr.states.front());
    CHECK(prev == 1.0);
    for (std::size_t k = 1; k < tr.states.size(); ++k) {
        const double w = survival(tr.states[k]);
        CHECK(w <= prev * (1.0 + 1e-12));
        CHECK(w <= 1.0 + kTolNorm * (1.0 + 0.01 * static_cast<double>(k)));
        prev = w;
    }
}

TEST_CASE("properties: two-stage figure-2 curve") {
    // rapid buildup by tau ~ 5, then slow modulation at the Omega2 scale
    const auto states = evolve(reset_state(), build_generator(kFig2), 0.01, 20000);
    const double inv4e2 = 1.0 / (4.0 / 576.0);
    const auto pbar = [&](std::size_t k) {
        return states[k].c1 * states[k].c1 * inv4e2;
    };
    CHECK(pbar(500) == doctest::Approx(0.826686).epsilon(2e-4));    // tau = 5
    CHECK(pbar(7500) == doctest::Approx(0.000871).epsilon(0.05));   // near node
    CHECK(pbar(15000) == doctest::Approx(0.607794).epsilon(2e-4));  // recovered
}
