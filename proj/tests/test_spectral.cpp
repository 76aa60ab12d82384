#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "nextjump/spectral.hpp"
#include "oracle_helpers.hpp"

using namespace nextjump;

namespace {

const SystemParams kFig2 = make_params(1.0 / 24.0, 1.0 / 48.0, 1.0, 0.0);
const SystemParams kFig4 = params_from_hertz(1.0e6, 2.0e4, 4.8e7, 0.0);
const SystemParams kFig5 = make_params(1e6, 2e5, 1e6, 0.0);

// frozen from the pre-build oracle (np.roots + scipy eig agree to 1e-15)
const Complex kFig2Slow{-1.7452433718043499e-03, 2.0833462035029893e-02};
const double kFig2Fast = -4.9650951325639103e-01;
const double kFig4Roots[3] = {-9.6527601952924688e+03, -1.7667057840478665e+06,
                              -2.2223641455756832e+07};
const double kFig5Real = -1.9404774872486421e+04;
const Complex kFig5Pair{-2.4029761256375693e+05, 9.8637275674451189e+05};

double cubic_residual(const CubicCoeffs& c, const Complex& z) {
    const Complex val = ((z + c.p2) * z + c.p1) * z + c.p0;
    const double scale = std::abs(z * z * z) + std::abs(c.p2 * z * z) +
                         std::abs(c.p1 * z) + std::abs(c.p0);
    return scale > 0.0 ? std::abs(val) / scale : std::abs(val);
}

}  // namespace

TEST_CASE("characteristic_cubic: matches a numeric determinant at random points") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> U(0.0, 4.0);
    for (int i = 0; i < 100; ++i) {
        const SystemParams p =
            make_params(U(rng), U(rng), U(rng) + 0.05, U(rng));
        const CubicCoeffs c = characteristic_cubic(p);
        const Generator g = build_generator(p);
        std::uniform_real_distribution<double> L(-3.0, 3.0);
        for (int j = 0; j < 5; ++j) {
            const Complex lam{L(rng), L(rng)};
            const Complex det = oracle::det_shifted(g.m, lam);
            const Complex poly = -(((lam + c.p2) * lam + c.p1) * lam + c.p0);
            CHECK(std::abs(det - poly) <=
                  1e-12 * std::max(1.0, std::abs(poly)));
        }
    }
}

TEST_CASE("characteristic_cubic: figure-2 coefficients") {
    const CubicCoeffs c = characteristic_cubic(kFig2);
    CHECK(c.p2 == 0.5);
    CHECK(c.p1 == doctest::Approx(5.0 / 2304.0).epsilon(1e-15));
    CHECK(c.p0 == doctest::Approx(1.0 / 4608.0).epsilon(1e-15));
}

TEST_CASE("reduced_cubic: beta2 = 0 gives B = 2 eps^2, C = (omega2/beta1)^2") {
    const ReducedCubic r = reduced_cubic(kFig2);
    CHECK(r.B == doctest::Approx(2.0 / 576.0).epsilon(1e-15));
    CHECK(r.C == doctest::Approx(1.0 / 2304.0).epsilon(1e-15));
}

TEST_CASE("reduced_cubic: beta2 contributes to both coefficients") {
    const SystemParams p = make_params(0.04, 0.01, 2.0, 0.5);
    const ReducedCubic r = reduced_cubic(p);
    const double eps = 0.02;
    CHECK(r.B == doctest::Approx(2.0 * (0.125 + 2.0 * eps * eps) / 2.0)
                     .epsilon(1e-14));
    CHECK(r.C == doctest::Approx(0.01 * 0.01 / 4.0 + 2.0 * eps * eps * 0.25)
                     .epsilon(1e-14));
}

TEST_CASE("exact_eigenvalues: decoupled case is {0, -beta1/2, -beta2/2}") {
    const EigenTriple t = exact_eigenvalues(make_params(0, 0, 2, 3));
    CHECK(t.lambdas[0] == Complex(0.0));
    CHECK(t.lambdas[1].real() == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(t.lambdas[2].real() == doctest::Approx(-1.5).epsilon(1e-14));
    CHECK(t.lambdas[1].imag() == 0.0);
}

TEST_CASE("exact_eigenvalues: frozen figure-2 roots") {
    const EigenTriple t = exact_eigenvalues(kFig2);
    CHECK(std::abs(t.lambdas[0] - kFig2Slow) < 1e-10 * std::abs(kFig2Slow));
    CHECK(std::abs(t.lambdas[1] - std::conj(kFig2Slow)) <
          1e-10 * std::abs(kFig2Slow));
    CHECK(t.lambdas[2].real() ==
          doctest::Approx(kFig2Fast).epsilon(1e-10));
    CHECK(t.lambdas[2].imag() == 0.0);
}

TEST_CASE("exact_eigenvalues: frozen figure-4 roots, well separated") {
    const EigenTriple t = exact_eigenvalues(kFig4);
    for (int i = 0; i < 3; ++i) {
        CHECK(t.lambdas[static_cast<std::size_t>(i)].imag() == 0.0);
        CHECK(t.lambdas[static_cast<std::size_t>(i)].real() ==
              doctest::Approx(kFig4Roots[i]).epsilon(1e-10));
    }
    CHECK(t.lambdas[1].real() / t.lambdas[0].real() > 10.0);
    CHECK(t.lambdas[2].real() / t.lambdas[1].real() > 10.0);
}

TEST_CASE("exact_eigenvalues: frozen figure-5 roots (complex pair path)") {
    const EigenTriple t = exact_eigenvalues(kFig5);
    CHECK(t.lambdas[0].real() == doctest::Approx(kFig5Real).epsilon(1e-10));
    CHECK(std::abs(t.lambdas[1] - kFig5Pair) < 1e-10 * std::abs(kFig5Pair));
    CHECK(t.lambdas[2] == std::conj(t.lambdas[1]));
}

TEST_CASE("properties: residual, trace and product identities") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> U(0.0, 5.0);
    for (int i = 0; i < 300; ++i) {
        const SystemParams p =
            make_params(U(rng), U(rng), U(rng) + 0.01, U(rng));
        const CubicCoeffs c = characteristic_cubic(p);
        const EigenTriple t = exact_eigenvalues(p);
        Complex sum = 0.0, prod = 1.0;
        for (const Complex& z : t.lambdas) {
            CHECK(cubic_residual(c, z) < 1e-10);
            CHECK(z.real() <= 1e-12 * p.beta1);
            sum += z;
            prod *= z;
        }
        CHECK(std::abs(sum - Complex(-c.p2)) <=
              1e-12 * std::max(1.0, std::abs(c.p2)));
        CHECK(std::abs(prod - Complex(-c.p0)) <=
              1e-10 * std::max(std::abs(c.p0), 1e-30));
        // conjugate pairing for any complex members
        if (t.lambdas[0].imag() != 0.0 || t.lambdas[1].imag() != 0.0) {
            bool paired = (t.lambdas[0] == std::conj(t.lambdas[1])) ||
                          (t.lambdas[1] == std::conj(t.lambdas[2])) ||
                          (t.lambdas[0] == std::conj(t.lambdas[2]));
            CHECK(paired);
        }
    }
}

TEST_CASE("solve_cubic: robust near the critically damped boundary") {
    // omega2 tuned so the reduced quadratic's discriminant nearly vanishes
    for (double nudge : {-1e-9, 0.0, 1e-9}) {
        const double eps = 0.02;
        const double omega2 = (1.0 + nudge) * eps * eps;  // ~ beta_ell
        const SystemParams p = make_params(eps, omega2, 1.0, 0.0);
        const CubicCoeffs c = characteristic_cubic(p);
        for (const Complex& z : exact_eigenvalues(p).lambdas) {
            CHECK(cubic_residual(c, z) < 1e-10);
        }
    }
}

TEST_CASE("asymptotic_underdamped: figure-2 pair") {
    std::vector<std::string> warn;
    const EigenTriple t = asymptotic_underdamped(kFig2, &warn);
    CHECK(warn.empty());
    const double bl = 1.0 / 576.0;
    const double w = std::sqrt(1.0 / 2304.0 - bl * bl);
    CHECK(t.lambdas[0].real() == doctest::Approx(-bl).epsilon(1e-14));
    CHECK(t.lambdas[0].imag() == doctest::Approx(w).epsilon(1e-14));
    CHECK(t.lambdas[1] == std::conj(t.lambdas[0]));
    CHECK(t.lambdas[2].real() == -0.5);
}

TEST_CASE("asymptotic_underdamped: critical and beta2 > 0 behavior") {
    // discriminant hits zero when omega2 = beta_ell (beta2 = 0)
    const double eps = 0.05;
    const SystemParams crit = make_params(eps, eps * eps, 1.0, 0.0);
    const EigenTriple t = asymptotic_underdamped(crit);
    CHECK(t.lambdas[0].imag() == 0.0);
    CHECK(t.lambdas[0].real() == doctest::Approx(-eps * eps).epsilon(1e-12));
    CHECK(t.lambdas[1].real() == doctest::Approx(-eps * eps).epsilon(1e-12));

    // the 2 eps^2 beta1 beta2 term raises the oscillation frequency
    const SystemParams p0 = make_params(0.04, 0.02, 1.0, 0.0);
    const SystemParams p1 = make_params(0.04, 0.02, 1.0, 0.004);
    CHECK(asymptotic_underdamped(p1).lambdas[0].imag() >
          asymptotic_underdamped(p0).lambdas[0].imag());

    std::vector<std::string> warn;
    (void)asymptotic_underdamped(kFig4, &warn);  // overdamped parameters
    CHECK(!warn.empty());
}

TEST_CASE("asymptotic_overdamped: figure-4 triple and ratios") {
    std::vector<std::string> warn;
    const EigenTriple t = asymptotic_overdamped(kFig4, &warn);
    CHECK(warn.empty());
    CHECK(t.lambdas[0].real() == doctest::Approx(-9600.0).epsilon(1e-12));
    CHECK(t.lambdas[1].real() ==
          doctest::Approx(-1.6449340668482261e+06).epsilon(1e-12));
    CHECK(t.lambdas[2].real() == -2.4e7);

    // lambda2/lambda3 = 4 eps^2 / eta^2 = 1/alpha
    const DerivedRates r = derive_rates(kFig4);
    CHECK(t.lambdas[1].real() / t.lambdas[0].real() ==
          doctest::Approx(1.0 / r.alpha).epsilon(1e-12));
}

TEST_CASE("asymptotic_overdamped: eta = 0 decouples the dark level") {
    const EigenTriple t = asymptotic_overdamped(make_params(0.1, 0.0, 1.0, 0.0));
    CHECK(t.lambdas[0] == Complex(0.0));
}

TEST_CASE("eigen_compare: figure-2 underdamped errors") {
    const EigenCompareReport rep = eigen_compare(kFig2);
    REQUIRE(rep.underdamped.has_value());
    const double eps2_5 = 5.0 / 576.0;
    // the complex pair sits at exact[0], exact[1]; the fast root at exact[2]
    CHECK(rep.underdamped->rel_error[0] ==
          doctest::Approx(3.4996335233e-03).epsilon(1e-6));
    CHECK(rep.underdamped->rel_error[2] ==
          doctest::Approx(7.0300500804e-03).epsilon(1e-6));
    CHECK(rep.underdamped->max_rel_error < eps2_5);
}

TEST_CASE("eigen_compare: pair error shrinks ~4x when eps halves") {
    const auto pair_err = [](double eps) {
        const SystemParams p = make_params(eps, 1.0 / 48.0, 1.0, 0.0);
        const EigenCompareReport rep = eigen_compare(p);
        REQUIRE(rep.underdamped.has_value());
        // error of the oscillatory pair = entries 0 and 1
        return std::max(rep.underdamped->rel_error[0],
                        rep.underdamped->rel_error[1]);
    };
    const double e1 = pair_err(1.0 / 24.0);
    const double e2 = pair_err(1.0 / 48.0);
    const double e3 = pair_err(1.0 / 96.0);
    CHECK(e1 / e2 == doctest::Approx(4.029).epsilon(0.02));
    CHECK(e2 / e3 == doctest::Approx(4.005).epsilon(0.02));
    CHECK(e1 / e2 > 3.0);
    CHECK(e1 / e2 < 5.0);
    CHECK(e2 / e3 > 3.0);
    CHECK(e2 / e3 < 5.0);
}

TEST_CASE("eigen_compare: figure-4 overdamped errors within 5*max(eps^2, alpha)") {
    const EigenCompareReport rep = eigen_compare(kFig4);
    REQUIRE(rep.overdamped.has_value());
    const DerivedRates r = derive_rates(kFig4);
    const double tol = 5.0 * std::max(r.epsilon * r.epsilon, r.alpha);
    CHECK(rep.overdamped->max_rel_error < tol);
    CHECK(rep.overdamped->rel_error[0] ==
          doctest::Approx(5.4658143604e-03).epsilon(1e-6));
    CHECK(rep.overdamped->rel_error[1] ==
          doctest::Approx(6.8925860944e-02).epsilon(1e-6));
    CHECK(rep.overdamped->rel_error[2] ==
          doctest::Approx(7.9931029655e-02).epsilon(1e-6));
}

TEST_CASE("eigen_compare: no drive reproduces both asymptotics exactly") {
    const EigenCompareReport rep = eigen_compare(make_params(0, 0, 2, 1));
    CHECK(!rep.rates.has_value());
    REQUIRE(rep.underdamped.has_value());
    REQUIRE(rep.overdamped.has_value());
    CHECK(rep.underdamped->max_rel_error < 1e-14);
    CHECK(rep.overdamped->max_rel_error < 1e-14);
}

TEST_CASE("propagator cross-check: tail decay of W matches 2 Re(lambda_slow)") {
    // log-linear fit of W over tau in [500, 2000]; the slow pair dominates
    const Generator g = build_generator(kFig2);
    const double dt = 0.01;
    AmplitudeState s = reset_state();
    std::vector<double> taus, logw;
    for (long k = 0; k <= 200000; ++k) {
        if (k >= 50000 && k % 100 == 0) {
            taus.push_back(static_cast<double>(k) * dt);
            logw.push_back(std::log(survival(s)));
        }
        s = rk4_step(s, g, dt).state;
    }
    // least squares slope
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(taus.size());
    for (std::size_t i = 0; i < taus.size(); ++i) {
        sx += taus[i];
        sy += logw[i];
        sxx += taus[i] * taus[i];
        sxy += taus[i] * logw[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double expected = 2.0 * exact_eigenvalues(kFig2).lambdas[0].real();
    CHECK(std::abs(slope - expected) / std::abs(expected) < 0.01);
}

TEST_CASE("ModePropagator: agrees with RK4 to 1e-6 in all three regimes") {
    for (const SystemParams& p : {kFig2, kFig4, kFig5}) {
        const ModePropagator mp(p);
        const Generator g = build_generator(p);
        const double dt = kDefaultStepTau / p.beta1;
        AmplitudeState s = reset_state();
        for (int chunk = 0; chunk < 5; ++chunk) {
            for (int k = 0; k < 2000; ++k) s = rk4_step(s, g, dt).state;
            const double t = static_cast<double>((chunk + 1) * 2000) * dt;
            const AmplitudeState m = mp.at(reset_state(), t);
            CHECK(std::abs(m.c0 - s.c0) < 1e-6);
            CHECK(std::abs(m.c1 - s.c1) < 1e-6);
            CHECK(std::abs(m.c2 - s.c2) < 1e-6);
            CHECK(mp.survival_at(reset_state(), t) ==
                  doctest::Approx(survival(s)).epsilon(1e-6));
        }
    }
}

TEST_CASE("ModePropagator: exact at t = 0 and multiplicative in time") {
    const ModePropagator mp(kFig4);
    const AmplitudeState s0 = mp.at(reset_state(), 0.0);
    CHECK(s0.c0 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(s0.c1) < 1e-12);
    // propagating 2t from reset equals two t-steps
    const double t = 1e-6;
    const AmplitudeState a = mp.at(reset_state(), 2.0 * t);
    const AmplitudeState b = mp.at(mp.at(reset_state(), t), t);
    CHECK(a.c0 == doctest::Approx(b.c0).epsilon(1e-10));
    CHECK(a.c1 == doctest::Approx(b.c1).epsilon(1e-10));
    CHECK(a.c2 == doctest::Approx(b.c2).epsilon(1e-10));
}
