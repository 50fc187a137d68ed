#pragma once

#include <cmath>
#include <string>

#include "dimersim/bath.hpp"
#include "dimersim/dynamics.hpp"
#include "dimersim/eigensystem.hpp"
#include "dimersim/errors.hpp"
#include "dimersim/model.hpp"
#include "dimersim/quadrature.hpp"

namespace dimersim {

// Eigenstates dressed by the photon displacement their permanent dipoles
// generate: energies shift by -lambda |d_aa|^2 and the off-diagonal dipoles
// pick up a correction along d_aa - d_bb. Diagonal dipoles are unchanged.
struct PolaronFrame {
    double lambda_ev = 0.0;
    Eigen::Vector3d shifted_energies = Eigen::Vector3d::Zero();
    DipoleMatrix dressed;

    Vec3 delta(int a, int b) const { return dressed(a, a) - dressed(b, b); }
    double shifted_omega(int upper, int lower) const {
        return shifted_energies(upper) - shifted_energies(lower);
    }
};

inline PolaronFrame build_polaron_frame(const EigenSystem& es, double lambda_ev) {
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b)
            if (std::abs(es.energies(a) - es.energies(b)) < secular_gap_ev)
                throw secular_error("build_polaron_frame: eigenstates " + std::to_string(a) +
                                    " and " + std::to_string(b) +
                                    " are degenerate; dressing denominator vanishes");
    PolaronFrame frame;
    frame.lambda_ev = lambda_ev;
    for (int a = 0; a < 3; ++a)
        frame.shifted_energies(a) = es.energies(a) - lambda_ev * es.dipoles(a, a).squaredNorm();
    frame.dressed = es.dipoles;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            if (a == b) continue;
            const Vec3& dab = es.dipoles(a, b);
            const Vec3 sum = es.dipoles(a, a) + es.dipoles(b, b);
            const Vec3 diff = es.dipoles(a, a) - es.dipoles(b, b);
            const double denom = es.energies(a) - es.energies(b);
            frame.dressed(a, b) = dab + (lambda_ev * dab.dot(sum) / denom) * diff;
        }
    return frame;
}

namespace polaron_detail {

// Frequency-domain convolution of two displacement weights,
// (w_m * w_n)(omega) = int w_m(nu) w_n(omega - nu) dnu. The integrand has
// kinks where either argument crosses zero, so the range is split there.
inline double weight_convolution(int m, int n, double omega, const BathSpec& spec,
                                 double rel_tol = 1e-10) {
    const double hi = detail::positive_support(spec);
    const double lo = -detail::negative_support(spec);
    // Support of nu such that both w_m(nu) and w_n(omega - nu) can be nonzero.
    const double a = std::max(lo, omega - hi);
    const double b = std::min(hi, omega - lo);
    if (!(b > a)) return 0.0;
    auto f = [&](double nu) {
        return psi_weight(m, nu, spec) * psi_weight(n, omega - nu, spec);
    };
    double breaks[4] = {a, std::clamp(0.0, a, b), std::clamp(omega, a, b), b};
    std::sort(breaks, breaks + 4);
    double total = 0.0;
    for (int k = 0; k < 3; ++k) {
        if (!(breaks[k + 1] > breaks[k])) continue;
        total += quadrature::integrate_or_throw(f, breaks[k], breaks[k + 1], rel_tol, 0.0,
                                                "weight_convolution");
    }
    return total;
}

} // namespace polaron_detail

// K(omega) = psi2(0) gamma(omega) - (w2 * w0)(omega): the subtracted pair of
// fourth-order emission kernels multiplying |Delta|^2 in the rate correction.
// Nonnegative for the cubic spectral density and obeys the same detailed
// balance as gamma.
inline double kernel_K(double omega, const BathSpec& spec) {
    if (omega == 0.0) throw secular_error("kernel_K: omega = 0 is a degenerate transition");
    const double p20 = psi2_zero(spec);
    const double conv = polaron_detail::weight_convolution(2, 0, omega, spec);
    return p20 * gamma_rate(omega, spec) - conv;
}

struct PolaronRate {
    double rate_ev = 0.0;         // corrected rate
    double sbrme_ev = 0.0;        // |d_ab|^2 gamma(omega), uncorrected
    double term_kernel_ev = 0.0;  // -(|d|^2 |Dbar|^2 + |d.Dbar|^2) K, always <= 0
    double term_lambda_ev = 0.0;  // lambda-linear cross term from the dressing
    double shift_ev = 0.0;        // change from evaluating at the shifted frequency
    double omega_ev = 0.0;
    double omega_bar_ev = 0.0;

    double delta_gamma_ev() const { return rate_ev - sbrme_ev; }
};

// Fourth-order correction to the b -> a transfer rate. The displacement
// kernels scale linearly with lambda relative to the self-dipole strength of
// the bath, so every correction vanishes linearly as lambda -> 0. The
// lambda-linear cross term is evaluated at the unshifted frequency by
// default; `cross_term_at_shifted` switches it to the dressed frequency.
inline PolaronRate corrected_rate(const PolaronFrame& frame, const EigenSystem& es,
                                  const BathSpec& spec, int a, int b,
                                  bool cross_term_at_shifted = false) {
    if (a == b) throw config_error("corrected_rate: a and b must differ");
    const double omega = es.energies(b) - es.energies(a);
    const double omega_bar = frame.shifted_energies(b) - frame.shifted_energies(a);
    if (omega == 0.0 || omega_bar == 0.0)
        throw secular_error("corrected_rate: degenerate transition frequency");

    const Vec3& dab = es.dipoles(a, b);
    const double dsq = dab.squaredNorm();

    PolaronRate out;
    out.omega_ev = omega;
    out.omega_bar_ev = omega_bar;
    out.sbrme_ev = dsq == 0.0 ? 0.0 : dsq * gamma_rate(omega, spec);
    if (dsq == 0.0) return out; // dark transitions stay exactly dark

    const double lambda0 = 16.0 * constants::pi / 3.0 * spec.cutoff_ev * spec.coupling_strength;
    const double kernel_scale = lambda0 > 0.0 ? frame.lambda_ev / lambda0 : 0.0;

    const Vec3 delta_bar = frame.delta(a, b);
    const double k = kernel_K(omega_bar, spec) * kernel_scale;
    out.term_kernel_ev = -(dsq * delta_bar.squaredNorm() + std::pow(dab.dot(delta_bar), 2)) * k;

    const double daa = dab.dot(es.dipoles(a, a));
    const double dbb = dab.dot(es.dipoles(b, b));
    const double cross_omega = cross_term_at_shifted ? omega_bar : omega;
    out.term_lambda_ev = -(daa * daa - dbb * dbb) / cross_omega * 2.0 * frame.lambda_ev *
                         gamma_rate(cross_omega, spec);

    const double base = dsq * gamma_rate(omega_bar, spec);
    out.shift_ev = base - out.sbrme_ev;
    out.rate_ev = base + out.term_kernel_ev + out.term_lambda_ev;
    return out;
}

// Dressed-frame rate with the displacement exponential truncated at second
// order in the dipole-field coupling, evaluated at the shifted frequency.
// Expanding it reproduces corrected_rate through fourth order.
inline double full_polaron_rate(const PolaronFrame& frame, const EigenSystem& es,
                                const BathSpec& spec, int a, int b) {
    if (a == b) throw config_error("full_polaron_rate: a and b must differ");
    const double omega_bar = frame.shifted_energies(b) - frame.shifted_energies(a);
    if (omega_bar == 0.0)
        throw secular_error("full_polaron_rate: degenerate transition frequency");

    const Vec3& dbar = frame.dressed(a, b);
    const double dsq = dbar.squaredNorm();
    if (dsq == 0.0) return 0.0;

    const double lambda0 = 16.0 * constants::pi / 3.0 * spec.cutoff_ev * spec.coupling_strength;
    const double kernel_scale = lambda0 > 0.0 ? frame.lambda_ev / lambda0 : 0.0;

    const Vec3 delta_bar = frame.delta(a, b);
    const double dl_sq = delta_bar.squaredNorm();
    const double proj = dbar.dot(delta_bar);

    const double g = gamma_rate(omega_bar, spec);
    const double p20 = psi2_zero(spec) * kernel_scale;
    const double conv = polaron_detail::weight_convolution(2, 0, omega_bar, spec) * kernel_scale;
    const double k = p20 * g - conv;
    return dsq * ((1.0 - dl_sq * p20) * g + dl_sq * conv) - proj * proj * k;
}

} // namespace dimersim
