#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "dimersim/constants.hpp"
#include "dimersim/errors.hpp"

namespace dimersim {

using Vec3 = Eigen::Vector3d;

// The three dipole vectors of a monomer, all in Debye. The transition dipole
// is real by choice of the site basis; the change in permanent dipole on
// excitation is always derived, never stored.
struct DipoleSet {
    Vec3 mu = Vec3::Zero();
    Vec3 perm_ground = Vec3::Zero();
    Vec3 perm_excited = Vec3::Zero();

    Vec3 delta() const { return perm_excited - perm_ground; }
};

struct Monomer {
    double excitation_energy_ev = 0.0; // bare E_j - E_0
    DipoleSet dipoles;

    void validate(const std::string& name) const {
        if (!(excitation_energy_ev > 0.0))
            throw config_error(name + ".excitation_energy_ev: must be > 0");
    }
};

// Electrostatic couplings over the site states {0,1,2}, taken real and
// symmetric. Indices follow the site ordering |0>, |1>, |2>.
struct CouplingMatrix {
    double q00 = 0.0, q11 = 0.0, q22 = 0.0;
    double q01 = 0.0, q02 = 0.0, q12 = 0.0;

    double q(int a, int b) const {
        const int lo = a < b ? a : b;
        const int hi = a < b ? b : a;
        if (lo == 0 && hi == 0) return q00;
        if (lo == 1 && hi == 1) return q11;
        if (lo == 2 && hi == 2) return q22;
        if (lo == 0 && hi == 1) return q01;
        if (lo == 0 && hi == 2) return q02;
        return q12;
    }
};

// Dimensionless field-coupling constant for an unstructured medium of
// refractive index n with cubic spectral density and cutoff nu_c, referenced
// to a 1 Debye dipole.
inline double derived_coupling_strength(double refractive_index, double cutoff_ev) {
    const double dsq = constants::debye_natural * constants::debye_natural;
    return refractive_index * cutoff_ev * cutoff_ev * dsq /
           (8.0 * constants::pi * constants::pi);
}

struct DimerConfig {
    Monomer monomer1;
    Monomer monomer2;
    CouplingMatrix coupling;
    bool include_self_dipole = false;
    double cutoff_ev = 10.0;
    double refractive_index = 1.0;
    // Field coupling constant; derived from (n, nu_c) when not supplied.
    std::optional<double> coupling_strength;
    // Overrides the self-dipole strength computed from (S, nu_c).
    std::optional<double> lambda_override_ev;

    double coupling_strength_value() const {
        return coupling_strength
                   ? *coupling_strength
                   : derived_coupling_strength(refractive_index, cutoff_ev);
    }

    void validate() const {
        monomer1.validate("monomer1");
        monomer2.validate("monomer2");
        if (!(cutoff_ev > 0.0)) throw config_error("cutoff_ev: must be > 0");
        if (!(refractive_index > 0.0)) throw config_error("refractive_index: must be > 0");
        if (coupling_strength && !(*coupling_strength >= 0.0))
            throw config_error("coupling_strength: must be >= 0");
        if (!std::isfinite(effective_site_energy(1)) || !std::isfinite(effective_site_energy(2)))
            throw config_error("effective site energies must be finite");
    }

    // Effective energy of site state a relative to the shifted ground state,
    // eps_a = E_a + Q_aa - E_0 - Q_00 with E_0 = 0 for the bare ground state.
    double effective_site_energy(int a) const {
        if (a == 0) return 0.0;
        const double bare = (a == 1) ? monomer1.excitation_energy_ev
                                     : monomer2.excitation_energy_ev;
        return bare + coupling.q(a, a) - coupling.q(0, 0);
    }
};

// Site-basis dipole operator truncated to {|0>,|1>,|2>}; a 3x3 symmetric
// matrix of real vectors in Debye. Also reused for the eigenbasis dipoles.
struct DipoleMatrix {
    std::array<std::array<Vec3, 3>, 3> d{};

    const Vec3& operator()(int a, int b) const { return d[a][b]; }
    Vec3& operator()(int a, int b) { return d[a][b]; }

    void set_symmetric(int a, int b, const Vec3& v) {
        d[a][b] = v;
        d[b][a] = v;
    }

    // Sum over all nine entries of |d_ab|^2; conserved under any orthogonal
    // change of basis.
    double frobenius_sq() const {
        double s = 0.0;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) s += d[a][b].squaredNorm();
        return s;
    }
};

struct SiteHamiltonian {
    Eigen::Matrix3d h = Eigen::Matrix3d::Zero(); // eV, basis (|0>,|1>,|2>)
};

// d[0][0] = G1+G2, d[1][1] = E1+G2, d[2][2] = G1+E2, d[0][1] = mu1,
// d[0][2] = mu2, d[1][2] = 0. The doubly excited state is truncated away.
inline DipoleMatrix site_dipole_matrix(const DimerConfig& cfg) {
    const DipoleSet& m1 = cfg.monomer1.dipoles;
    const DipoleSet& m2 = cfg.monomer2.dipoles;
    DipoleMatrix out;
    out.set_symmetric(0, 0, m1.perm_ground + m2.perm_ground);
    out.set_symmetric(1, 1, m1.perm_excited + m2.perm_ground);
    out.set_symmetric(2, 2, m1.perm_ground + m2.perm_excited);
    out.set_symmetric(0, 1, m1.mu);
    out.set_symmetric(0, 2, m2.mu);
    out.set_symmetric(1, 2, Vec3::Zero());
    return out;
}

// Self-dipole strength lambda = (16 pi / 3) nu_c S.
inline double compute_lambda(const DimerConfig& cfg) {
    const double s = cfg.coupling_strength_value();
    if (!(cfg.cutoff_ev > 0.0)) throw config_error("cutoff_ev: must be > 0");
    if (!(s > 0.0)) throw config_error("coupling_strength: must be > 0");
    return 16.0 * constants::pi / 3.0 * cfg.cutoff_ev * s;
}

inline double effective_lambda(const DimerConfig& cfg) {
    if (cfg.lambda_override_ev) return *cfg.lambda_override_ev;
    return compute_lambda(cfg);
}

// lambda <a|(d1+d2)^2|b> over the truncated 3-state space; the operator
// square becomes a matrix product with dot products between vector entries.
inline double self_dipole_shift(const DimerConfig& cfg, int a, int b) {
    if (a < 0 || a > 2 || b < 0 || b > 2)
        throw config_error("self_dipole_shift: state index out of range");
    const DipoleMatrix d = site_dipole_matrix(cfg);
    double acc = 0.0;
    for (int c = 0; c < 3; ++c) acc += d(a, c).dot(d(c, b));
    return effective_lambda(cfg) * acc;
}

// H = diag(0, eps1, eps2) with off-diagonals Q'_0j, Q'_12, where Q' carries
// the self-dipole shift when enabled.
inline SiteHamiltonian assemble_site_hamiltonian(const DimerConfig& cfg) {
    cfg.validate();
    auto qp = [&](int a, int b) {
        double v = cfg.coupling.q(a, b);
        if (cfg.include_self_dipole) v += self_dipole_shift(cfg, a, b);
        return v;
    };
    const double q00 = qp(0, 0);
    SiteHamiltonian out;
    out.h(0, 0) = 0.0;
    out.h(1, 1) = cfg.monomer1.excitation_energy_ev + qp(1, 1) - q00;
    out.h(2, 2) = cfg.monomer2.excitation_energy_ev + qp(2, 2) - q00;
    out.h(0, 1) = out.h(1, 0) = qp(0, 1);
    out.h(0, 2) = out.h(2, 0) = qp(0, 2);
    out.h(1, 2) = out.h(2, 1) = qp(1, 2);
    return out;
}

} // namespace dimersim
