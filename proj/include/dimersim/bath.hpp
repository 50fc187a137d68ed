#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "dimersim/constants.hpp"
#include "dimersim/errors.hpp"
#include "dimersim/quadrature.hpp"

namespace dimersim {

// Thermal, unpolarised optical environment with a cubic spectral density and
// exponential high-frequency cutoff.
struct BathSpec {
    double coupling_strength = 1.29e-9; // dimensionless S
    double cutoff_ev = 10.0;            // nu_c
    double temperature_k = 300.0;

    double beta() const {
        if (temperature_k == 0.0) return std::numeric_limits<double>::infinity();
        return 1.0 / (constants::k_boltzmann_ev_per_k * temperature_k);
    }

    void validate() const {
        if (!(cutoff_ev > 0.0)) throw config_error("bath.cutoff_ev: must be > 0");
        if (!(temperature_k >= 0.0)) throw config_error("bath.temperature_k: must be >= 0");
        if (!(coupling_strength >= 0.0)) throw config_error("bath.coupling_strength: must be >= 0");
    }
};

// J(nu) = S nu^3 / nu_c^2 exp(-nu/nu_c)
inline double spectral_density(double nu, const BathSpec& spec) {
    if (nu < 0.0) throw config_error("spectral_density: nu must be >= 0");
    const double x = nu / spec.cutoff_ev;
    return spec.coupling_strength * nu * x * x * std::exp(-x);
}

// Bose-Einstein occupation; exactly zero at zero temperature.
inline double bose_occupation(double omega, const BathSpec& spec) {
    if (!(omega > 0.0)) throw config_error("bose_occupation: omega must be > 0");
    if (spec.temperature_k == 0.0) return 0.0;
    const double x = spec.beta() * omega;
    if (x > 700.0) return 0.0; // exp would overflow; occupation below 1e-304
    return 1.0 / std::expm1(x);
}

inline constexpr double angular_prefactor = 8.0 * constants::pi / 3.0;

// Emission rate per squared unit dipole for omega > 0, absorption for
// omega < 0. Detailed balance: gamma(omega) = exp(beta*omega) gamma(-omega).
inline double gamma_rate(double omega, const BathSpec& spec) {
    if (omega == 0.0)
        throw secular_error("gamma_rate: omega = 0 is a degenerate transition");
    if (omega > 0.0)
        return angular_prefactor * spectral_density(omega, spec) * (bose_occupation(omega, spec) + 1.0);
    return angular_prefactor * spectral_density(-omega, spec) * bose_occupation(-omega, spec);
}

// Frequency-domain weight of the displacement kernels: for nu > 0 the
// emission side (8pi/3) J/nu^n (N+1), for nu < 0 the absorption side with the
// alternating sign (-1)^n N. Continuous at nu = 0 where the thermal limit is
// finite (n = 2).
inline double psi_weight(int n, double nu, const BathSpec& spec) {
    if (n < 0 || n > 2) throw config_error("psi_weight: n must be in {0,1,2}");
    if (nu == 0.0) {
        if (n < 2 || spec.temperature_k == 0.0) return 0.0;
        // J(nu)/nu^2 * N(nu) -> S/nu_c^2 * kT as nu -> 0.
        return angular_prefactor * spec.coupling_strength /
               (spec.cutoff_ev * spec.cutoff_ev) * constants::k_boltzmann_ev_per_k *
               spec.temperature_k;
    }
    const double a = std::abs(nu);
    double powfac = 1.0;
    if (n == 1) powfac = a;
    else if (n == 2) powfac = a * a;
    const double base = angular_prefactor * spectral_density(a, spec) / powfac;
    if (nu > 0.0) return base * (bose_occupation(a, spec) + 1.0);
    const double sign = (n == 1) ? -1.0 : 1.0;
    return sign * base * bose_occupation(a, spec);
}

// Weight values sampled on a caller-supplied frequency grid.
inline std::vector<double> psi_n(std::span<const double> nu_grid, int n, const BathSpec& spec) {
    std::vector<double> out;
    out.reserve(nu_grid.size());
    for (double nu : nu_grid) out.push_back(psi_weight(n, nu, spec));
    return out;
}

namespace detail {
// Frequencies beyond which both the cutoff and the thermal factors are below
// double precision relative to the in-band weights.
inline double positive_support(const BathSpec& spec) { return 40.0 * spec.cutoff_ev; }
inline double negative_support(const BathSpec& spec) {
    if (spec.temperature_k == 0.0) return 0.0;
    const double thermal = 745.0 / spec.beta();
    return std::min(40.0 * spec.cutoff_ev, thermal);
}
} // namespace detail

// psi_2 value at zero time lag: integral of the n = 2 weight over all
// frequencies, (8pi/3) int J/nu^2 (2N+1) dnu. At T = 0 this equals (8pi/3) S.
inline double psi2_zero(const BathSpec& spec, double rel_tol = 1e-10) {
    const double hi = detail::positive_support(spec);
    auto emis = [&](double nu) { return psi_weight(2, nu, spec); };
    double total = quadrature::integrate_or_throw(emis, 0.0, spec.cutoff_ev, rel_tol, 0.0, "psi2_zero");
    total += quadrature::integrate_or_throw(emis, spec.cutoff_ev, hi, rel_tol, 0.0, "psi2_zero");
    if (spec.temperature_k > 0.0) {
        const double lo = -detail::negative_support(spec);
        total += quadrature::integrate_or_throw(emis, lo, 0.0, rel_tol, 0.0, "psi2_zero");
    }
    return total;
}

} // namespace dimersim
