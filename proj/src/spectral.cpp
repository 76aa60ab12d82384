#include "nextjump/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nextjump {

CubicCoeffs characteristic_cubic(const SystemParams& p) {
    validate(p);
    CubicCoeffs c;
    c.p2 = (p.beta1 + p.beta2) / 2.0;
    c.p1 = p.beta1 * p.beta2 / 4.0 + p.omega1 * p.omega1 + p.omega2 * p.omega2;
    c.p0 = p.omega1 * p.omega1 * p.beta2 / 2.0 +
           p.omega2 * p.omega2 * p.beta1 / 2.0;
    return c;
}

ReducedCubic reduced_cubic(const SystemParams& p) {
    validate(p);
    const double eps = p.omega1 / p.beta1;
    const double beta_ell = p.beta2 / 4.0 + p.beta1 * eps * eps;
    ReducedCubic r;
    r.B = 2.0 * beta_ell / p.beta1;
    r.C = (p.omega2 * p.omega2) / (p.beta1 * p.beta1) +
          2.0 * eps * eps * p.beta2 / p.beta1;
    return r;
}

namespace {

double cubic_value(const CubicCoeffs& c, double x) {
    return ((x + c.p2) * x + c.p1) * x + c.p0;
}

Complex cubic_value(const CubicCoeffs& c, Complex x) {
    return ((x + c.p2) * x + c.p1) * x + c.p0;
}

double polish_real(const CubicCoeffs& c, double x) {
    // One Newton step (second only if it still improves the residual).
    for (int i = 0; i < 2; ++i) {
        const double f = cubic_value(c, x);
        const double df = (3.0 * x + 2.0 * c.p2) * x + c.p1;
        if (df == 0.0) break;
        const double xn = x - f / df;
        if (!std::isfinite(xn) ||
            std::abs(cubic_value(c, xn)) >= std::abs(f)) {
            break;
        }
        x = xn;
    }
    return x;
}

Complex polish_complex(const CubicCoeffs& c, Complex x) {
    for (int i = 0; i < 2; ++i) {
        const Complex f = cubic_value(c, x);
        const Complex df = (3.0 * x + 2.0 * c.p2) * x + c.p1;
        if (df == Complex(0.0, 0.0)) break;
        const Complex xn = x - f / df;
        if (std::abs(cubic_value(c, xn)) >= std::abs(f)) break;
        x = xn;
    }
    return x;
}

void sort_triple(std::array<Complex, 3>& r) {
    std::sort(r.begin(), r.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
}

}  // namespace

std::array<Complex, 3> solve_cubic(const CubicCoeffs& coeffs) {
    // Work in scaled units so the coefficients are O(1); rates span many
    // decades (Hz to tens of MHz) and the trig formulas lose digits otherwise.
    // Power-of-two scaling keeps the rescaling itself exact.
    double scale = std::max({std::abs(coeffs.p2), std::sqrt(std::abs(coeffs.p1)),
                             std::cbrt(std::abs(coeffs.p0))});
    scale = (scale == 0.0) ? 1.0 : std::exp2(std::round(std::log2(scale)));
    const CubicCoeffs c{coeffs.p2 / scale, coeffs.p1 / (scale * scale),
                        coeffs.p0 / (scale * scale * scale)};

    std::array<Complex, 3> roots;

    if (c.p0 == 0.0) {
        // Exact zero root (no dissipation path out of the slow manifold);
        // deflate to the quadratic x^2 + p2 x + p1.
        const double disc = c.p2 * c.p2 - 4.0 * c.p1;
        if (disc >= 0.0) {
            const double s = std::sqrt(disc);
            const double q = -(c.p2 + std::copysign(s, c.p2)) / 2.0;
            double r0 = q;
            double r1 = (q != 0.0) ? c.p1 / q : 0.0;
            roots = {Complex(0.0), Complex(polish_real(c, r0)),
                     Complex(polish_real(c, r1))};
        } else {
            const double re = -c.p2 / 2.0;
            const double im = std::sqrt(-disc) / 2.0;
            const Complex z = polish_complex(c, Complex(re, im));
            roots = {Complex(0.0), z, std::conj(z)};
        }
    } else {
        // Depressed form t^3 + p t + q with x = t - p2/3.
        const double shift = c.p2 / 3.0;
        const double p = c.p1 - c.p2 * c.p2 / 3.0;
        const double q = 2.0 * c.p2 * c.p2 * c.p2 / 27.0 - c.p2 * c.p1 / 3.0 + c.p0;
        const double disc = q * q / 4.0 + p * p * p / 27.0;

        if (disc > 0.0) {
            // One real root, one conjugate pair (Cardano, stable branch).
            const double s = std::sqrt(disc);
            const double u3 = (-q / 2.0 >= 0.0) ? -q / 2.0 + s : -q / 2.0 - s;
            const double u = std::cbrt(u3);
            const double v = (u != 0.0) ? -p / (3.0 * u) : 0.0;
            const double t_real = u + v;
            const double re = -t_real / 2.0;
            const double im = std::numbers::sqrt3 / 2.0 * std::abs(u - v);
            const double x_real = polish_real(c, t_real - shift);
            const Complex z =
                polish_complex(c, Complex(re - shift, im));
            roots = {Complex(x_real), z, std::conj(z)};
        } else if (p == 0.0 && q == 0.0) {
            const double x = polish_real(c, -shift);
            roots = {Complex(x), Complex(x), Complex(x)};
        } else {
            // Three real roots (trigonometric form).
            const double m = 2.0 * std::sqrt(-p / 3.0);
            double arg = 3.0 * q / (p * m);
            arg = std::clamp(arg, -1.0, 1.0);
            const double phi = std::acos(arg);
            for (int k = 0; k < 3; ++k) {
                const double t =
                    m * std::cos((phi - 2.0 * std::numbers::pi * k) / 3.0);
                roots[static_cast<std::size_t>(k)] =
                    Complex(polish_real(c, t - shift));
            }
        }
    }

    for (auto& r : roots) r *= scale;
    sort_triple(roots);
    return roots;
}

const char* to_string(EigenKind kind) {
    switch (kind) {
        case EigenKind::Exact: return "Exact";
        case EigenKind::AsymptoticUnderdamped: return "AsymptoticUnderdamped";
        case EigenKind::AsymptoticOverdamped: return "AsymptoticOverdamped";
    }
    return "?";
}

EigenTriple exact_eigenvalues(const SystemParams& p) {
    EigenTriple t;
    t.lambdas = solve_cubic(characteristic_cubic(p));
    t.kind = EigenKind::Exact;
    return t;
}

namespace {

// beta_ell and the margin without requiring eta (omega1 may be zero here).
double beta_ell_of(const SystemParams& p) {
    const double eps = p.omega1 / p.beta1;
    return p.beta2 / 4.0 + p.beta1 * eps * eps;
}

// nullopt only in the fully degenerate case (no drive, no |2> decay), where
// the margin is 0/0.
std::optional<Regime> classify_by_margin(const SystemParams& p) {
    DerivedRates r{};
    r.epsilon = p.omega1 / p.beta1;
    r.beta_ell = beta_ell_of(p);
    if (r.beta_ell <= 0.0 && p.omega2 <= 0.0) return std::nullopt;
    return classify_regime(r, p);
}

void warn(std::vector<std::string>* sink, std::string msg) {
    if (sink != nullptr) sink->push_back(std::move(msg));
}

}  // namespace

EigenTriple asymptotic_underdamped(const SystemParams& p,
                                   std::vector<std::string>* warnings) {
    validate(p);
    const double eps = p.omega1 / p.beta1;
    const double beta_ell = beta_ell_of(p);
    const std::optional<Regime> reg = classify_by_margin(p);
    if (reg && reg->tag != RegimeTag::Underdamped) {
        warn(warnings, std::string("asymptotic_underdamped: regime is ") +
                           to_string(reg->tag) + ", formula outside validity");
    }
    const double radicand = beta_ell * beta_ell -
                            (p.omega2 * p.omega2 +
                             2.0 * eps * eps * p.beta1 * p.beta2);
    EigenTriple t;
    t.kind = EigenKind::AsymptoticUnderdamped;
    if (radicand >= 0.0) {
        const double s = std::sqrt(radicand);
        t.lambdas = {Complex(-p.beta1 / 2.0), Complex(-beta_ell + s),
                     Complex(-beta_ell - s)};
    } else {
        const double w = std::sqrt(-radicand);
        t.lambdas = {Complex(-p.beta1 / 2.0), Complex(-beta_ell, w),
                     Complex(-beta_ell, -w)};
    }
    sort_triple(t.lambdas);
    return t;
}

EigenTriple asymptotic_overdamped(const SystemParams& p,
                                  std::vector<std::string>* warnings) {
    validate(p);
    const double beta_ell = beta_ell_of(p);
    double lambda3 = 0.0;
    if (p.omega1 > 0.0) {
        const double eta = p.omega2 / p.omega1;
        lambda3 = -eta * eta * p.beta1 / 2.0;
        const double eps = p.omega1 / p.beta1;
        const double alpha = (eta / (2.0 * eps)) * (eta / (2.0 * eps));
        if (alpha >= 0.25) {
            warn(warnings,
                 "asymptotic_overdamped: alpha = eta^2/4eps^2 not << 1");
        }
        if (eta > 0.0 && p.beta2 >= p.beta1 * eta * eta / 4.0) {
            warn(warnings, "asymptotic_overdamped: beta2 not << beta1 eta^2");
        }
    } else if (p.omega2 > 0.0) {
        throw EtaUndefinedError(
            "asymptotic_overdamped: eta undefined (omega1 = 0, omega2 > 0)");
    }
    const std::optional<Regime> reg = classify_by_margin(p);
    if (reg && reg->tag != RegimeTag::Overdamped) {
        warn(warnings, std::string("asymptotic_overdamped: regime is ") +
                           to_string(reg->tag) + ", formula outside validity");
    }
    EigenTriple t;
    t.kind = EigenKind::AsymptoticOverdamped;
    t.lambdas = {Complex(-p.beta1 / 2.0), Complex(-2.0 * beta_ell),
                 Complex(lambda3)};
    sort_triple(t.lambdas);
    return t;
}

EigenComparison compare_eigenvalues(const EigenTriple& exact,
                                    const EigenTriple& asym) {
    EigenComparison cmp;
    cmp.kind = asym.kind;
    cmp.exact = exact.lambdas;

    struct Pair {
        double dist;
        double re;
        int i, j;
    };
    std::vector<Pair> pairs;
    pairs.reserve(9);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            pairs.push_back({std::abs(exact.lambdas[static_cast<std::size_t>(i)] -
                                      asym.lambdas[static_cast<std::size_t>(j)]),
                             exact.lambdas[static_cast<std::size_t>(i)].real(), i,
                             j});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        if (a.re != b.re) return a.re > b.re;
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
    });

    bool used_e[3] = {false, false, false};
    bool used_a[3] = {false, false, false};
    for (const Pair& pr : pairs) {
        if (used_e[pr.i] || used_a[pr.j]) continue;
        used_e[pr.i] = used_a[pr.j] = true;
        const auto ei = static_cast<std::size_t>(pr.i);
        const auto aj = static_cast<std::size_t>(pr.j);
        cmp.paired[ei] = asym.lambdas[aj];
        const double scale = std::abs(exact.lambdas[ei]);
        const double diff = std::abs(asym.lambdas[aj] - exact.lambdas[ei]);
        cmp.rel_error[ei] = (scale > 0.0)   ? diff / scale
                            : (diff > 0.0) ? diff / std::abs(asym.lambdas[aj])
                                           : 0.0;
    }
    cmp.max_rel_error =
        *std::max_element(cmp.rel_error.begin(), cmp.rel_error.end());
    return cmp;
}

EigenCompareReport eigen_compare(const SystemParams& p) {
    EigenCompareReport rep;
    rep.exact = exact_eigenvalues(p);
    rep.regime = classify_by_margin(p);
    if (p.omega1 > 0.0) {
        rep.rates = derive_rates(p);
    }
    rep.underdamped = compare_eigenvalues(
        rep.exact, asymptotic_underdamped(p, &rep.warnings));
    if (p.omega1 > 0.0 || p.omega2 == 0.0) {
        rep.overdamped = compare_eigenvalues(
            rep.exact, asymptotic_overdamped(p, &rep.warnings));
    }
    return rep;
}

namespace {

using CVec = std::array<Complex, 3>;

CVec cross(const CVec& a, const CVec& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0]};
}

double norm(const CVec& v) {
    return std::sqrt(std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]));
}

// Null vector of (A - lambda I) for a rank-2 matrix: the largest cross
// product of two of its rows.
CVec null_vector(const Generator& g, Complex lambda) {
    const CVec r0 = {Complex(g.m[0][0]) - lambda, Complex(g.m[0][1]),
                     Complex(g.m[0][2])};
    const CVec r1 = {Complex(g.m[1][0]), Complex(g.m[1][1]) - lambda,
                     Complex(g.m[1][2])};
    const CVec r2 = {Complex(g.m[2][0]), Complex(g.m[2][1]),
                     Complex(g.m[2][2]) - lambda};
    CVec best = cross(r0, r1);
    double bn = norm(best);
    for (const CVec& c : {cross(r0, r2), cross(r1, r2)}) {
        const double n = norm(c);
        if (n > bn) {
            best = c;
            bn = n;
        }
    }
    if (bn == 0.0) {
        throw Error("ModePropagator: defective (repeated) eigenvalue");
    }
    for (auto& x : best) x /= bn;
    return best;
}

}  // namespace

ModePropagator::ModePropagator(const SystemParams& p) {
    const Generator g = build_generator(p);
    eigs_ = exact_eigenvalues(p);
    for (std::size_t k = 0; k < 3; ++k) {
        vectors_[k] = null_vector(g, eigs_.lambdas[k]);
    }
    // V has the eigenvectors as columns; invert by adjugate.
    Complex V[3][3];
    for (std::size_t k = 0; k < 3; ++k) {
        for (std::size_t i = 0; i < 3; ++i) V[i][k] = vectors_[k][i];
    }
    const Complex det = V[0][0] * (V[1][1] * V[2][2] - V[1][2] * V[2][1]) -
                        V[0][1] * (V[1][0] * V[2][2] - V[1][2] * V[2][0]) +
                        V[0][2] * (V[1][0] * V[2][1] - V[1][1] * V[2][0]);
    if (std::abs(det) < 1e-10) {
        throw Error("ModePropagator: eigenvector matrix close to singular");
    }
    const Complex adj[3][3] = {
        {V[1][1] * V[2][2] - V[1][2] * V[2][1],
         V[0][2] * V[2][1] - V[0][1] * V[2][2],
         V[0][1] * V[1][2] - V[0][2] * V[1][1]},
        {V[1][2] * V[2][0] - V[1][0] * V[2][2],
         V[0][0] * V[2][2] - V[0][2] * V[2][0],
         V[0][2] * V[1][0] - V[0][0] * V[1][2]},
        {V[1][0] * V[2][1] - V[1][1] * V[2][0],
         V[0][1] * V[2][0] - V[0][0] * V[2][1],
         V[0][0] * V[1][1] - V[0][1] * V[1][0]}};
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) inverse_[i][j] = adj[i][j] / det;
    }
}

AmplitudeState ModePropagator::at(const AmplitudeState& s0, double t) const {
    const Complex x[3] = {Complex(s0.c0), Complex(s0.c1), Complex(s0.c2)};
    Complex out[3] = {};
    for (std::size_t k = 0; k < 3; ++k) {
        Complex w = inverse_[k][0] * x[0] + inverse_[k][1] * x[1] +
                    inverse_[k][2] * x[2];
        w *= std::exp(eigs_.lambdas[k] * t);
        for (std::size_t i = 0; i < 3; ++i) out[i] += w * vectors_[k][i];
    }
    // Conjugate pairs cancel the imaginary parts to rounding.
    return {out[0].real(), out[1].real(), out[2].real(), s0.t + t};
}

double ModePropagator::survival_at(const AmplitudeState& s0, double t) const {
    return survival(at(s0, t));
}

}  // namespace nextjump
