#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "nextjump/model.hpp"
#include "nextjump/propagator.hpp"

namespace nextjump {

using Complex = std::complex<double>;

// Monic characteristic cubic of the generator, lambda^3 + p2 l^2 + p1 l + p0.
// Expanding det(A - lambda I) = 0:
//   p2 = (beta1 + beta2)/2
//   p1 = beta1 beta2 / 4 + omega1^2 + omega2^2
//   p0 = omega1^2 beta2 / 2 + omega2^2 beta1 / 2
struct CubicCoeffs {
    double p2 = 0.0;
    double p1 = 0.0;
    double p0 = 0.0;
};

CubicCoeffs characteristic_cubic(const SystemParams& p);

// Small-epsilon reduction (x + 1/2)(x^2 + Bx + C) = 0 with x = lambda/beta1:
//   B = 2 beta_ell / beta1,  C = omega2^2/beta1^2 + 2 eps^2 beta2/beta1.
struct ReducedCubic {
    double B = 0.0;
    double C = 0.0;
};

ReducedCubic reduced_cubic(const SystemParams& p);

// Roots of a monic real cubic, Cardano/trigonometric with one Newton polish
// per root. Complex roots come in exact conjugate pairs. Sorted by descending
// real part, then descending imaginary part.
std::array<Complex, 3> solve_cubic(const CubicCoeffs& c);

enum class EigenKind { Exact, AsymptoticUnderdamped, AsymptoticOverdamped };

const char* to_string(EigenKind kind);

struct EigenTriple {
    std::array<Complex, 3> lambdas{};  // sorted: descending Re, then Im
    EigenKind kind = EigenKind::Exact;
};

EigenTriple exact_eigenvalues(const SystemParams& p);

// { -beta1/2, -beta_ell +/- sqrt(beta_ell^2 - (omega2^2 + 2 eps^2 beta1 beta2)) }.
// A negative radicand gives the oscillatory (underdamped) pair. Appends a
// warning when the classifier does not say Underdamped.
EigenTriple asymptotic_underdamped(const SystemParams& p,
                                   std::vector<std::string>* warnings = nullptr);

// { -beta1/2, -2 beta_ell, -eta^2 beta1 / 2 }, all real. lambda2 is the
// O(eps^2 beta1) root and lambda3 the O(eta^2 beta1) root, in that naming,
// even when magnitudes invert outside the assumed regime. Warns when the
// regime is not Overdamped, alpha >= 1/4, or beta2 >= beta1 eta^2 / 4.
EigenTriple asymptotic_overdamped(const SystemParams& p,
                                  std::vector<std::string>* warnings = nullptr);

// Greedy nearest-neighbor pairing of an asymptotic triple against the exact
// one (ties broken by real part), with per-root relative errors.
struct EigenComparison {
    EigenKind kind = EigenKind::Exact;
    std::array<Complex, 3> exact{};
    std::array<Complex, 3> paired{};  // asymptotic value matched to exact[i]
    std::array<double, 3> rel_error{};
    double max_rel_error = 0.0;
};

EigenComparison compare_eigenvalues(const EigenTriple& exact,
                                    const EigenTriple& asym);

struct EigenCompareReport {
    EigenTriple exact;
    std::optional<Regime> regime;       // absent only with no drive and beta2 = 0
    std::optional<DerivedRates> rates;  // absent when omega1 = 0
    std::optional<EigenComparison> underdamped;
    std::optional<EigenComparison> overdamped;  // absent when eta is undefined
    std::vector<std::string> warnings;
};

// Exact roots vs both applicable asymptotic triples. With omega1 = 0 the
// overdamped comparison is only defined in the omega2 = 0 limit (lambda3 = 0).
EigenCompareReport eigen_compare(const SystemParams& p);

// Exact piecewise-exponential propagation through the eigendecomposition of
// the generator: state(t) = sum_k w_k v_k exp(lambda_k t). Used as the fast
// alternative to step-by-step RK4 on long horizons; both paths agree to 1e-6.
// Throws Error when the spectrum is too close to degenerate to invert the
// eigenvector matrix.
class ModePropagator {
  public:
    explicit ModePropagator(const SystemParams& p);

    // State at time s0.t + t (t >= 0 relative to the input state).
    AmplitudeState at(const AmplitudeState& s0, double t) const;

    double survival_at(const AmplitudeState& s0, double t) const;

    const EigenTriple& eigenvalues() const { return eigs_; }

  private:
    EigenTriple eigs_;
    std::array<std::array<Complex, 3>, 3> vectors_{};  // vectors_[k] = v_k
    std::array<std::array<Complex, 3>, 3> inverse_{};  // rows of V^{-1}
};

}  // namespace nextjump
