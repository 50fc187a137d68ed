#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "dimersim/errors.hpp"
#include "dimersim/model.hpp"

namespace dimersim {

enum class CaseTag { Direct, Indirect, Mixed, Numeric };

inline const char* to_string(CaseTag tag) {
    switch (tag) {
        case CaseTag::Direct: return "direct";
        case CaseTag::Indirect: return "indirect";
        case CaseTag::Mixed: return "mixed";
        default: return "numeric";
    }
}

// Diagonalised dimer: ascending energies, orthogonal site->eigen transform
// (rows are eigenvectors), and the full symmetric matrix of eigenbasis dipole
// vectors in Debye.
struct EigenSystem {
    Eigen::Vector3d energies = Eigen::Vector3d::Zero();
    Eigen::Matrix3d unitary = Eigen::Matrix3d::Identity();
    DipoleMatrix dipoles;
    CaseTag tag = CaseTag::Numeric;

    double omega(int upper, int lower) const { return energies(upper) - energies(lower); }
};

// chi is the mixing angle of the 2x2 block that hybridises; the weights are
// the normalised driving terms of the indirect-coupling structure.
struct MixingAngles {
    double chi = 0.0;
    double d1_weight = 1.0;
    double d2_weight = 0.0;
};

inline constexpr double case_tolerance_ev = 1e-12;

namespace detail {

inline void half_angle(double cos_chi, double sin_chi, double& c, double& s) {
    c = std::sqrt(0.5 * (1.0 + cos_chi));
    s = std::copysign(std::sqrt(0.5 * (1.0 - cos_chi)), sin_chi);
}

// Deterministic eigenvector orientation: the largest-magnitude component is
// made positive, ties resolved toward the lowest index.
inline void canonical_signs(Eigen::Matrix3d& unitary, DipoleMatrix& dip) {
    for (int r = 0; r < 3; ++r) {
        int imax = 0;
        for (int c = 1; c < 3; ++c)
            if (std::abs(unitary(r, c)) > std::abs(unitary(r, imax))) imax = c;
        if (unitary(r, imax) < 0.0) {
            unitary.row(r) = -unitary.row(r);
            for (int b = 0; b < 3; ++b) {
                dip(r, b) = -dip(r, b);
                if (b != r) dip(b, r) = dip(r, b);
            }
        }
    }
}

// Sorts states ascending by energy, carrying rows and dipole entries along.
inline void sort_states(Eigen::Vector3d& e, Eigen::Matrix3d& u, DipoleMatrix& d) {
    std::array<int, 3> p{0, 1, 2};
    std::stable_sort(p.begin(), p.end(), [&](int a, int b) { return e(a) < e(b); });
    if (p == std::array<int, 3>{0, 1, 2}) return;
    Eigen::Vector3d es;
    Eigen::Matrix3d us;
    DipoleMatrix ds;
    for (int i = 0; i < 3; ++i) {
        es(i) = e(p[i]);
        us.row(i) = u.row(p[i]);
        for (int j = 0; j < 3; ++j) ds(i, j) = d(p[i], p[j]);
    }
    e = es;
    u = us;
    d = ds;
}

inline void require_offdiag_zero(double value, const char* name) {
    if (std::abs(value) > case_tolerance_ev)
        throw config_error(std::string("closed-form path requires ") + name +
                           " = 0 (|value| = " + std::to_string(std::abs(value)) +
                           " eV); use the numeric path");
}

} // namespace detail

inline DipoleMatrix transform_dipoles(const Eigen::Matrix3d& unitary, const DipoleMatrix& site) {
    DipoleMatrix out;
    for (int k = 0; k < 3; ++k) {
        Eigen::Matrix3d comp;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) comp(a, b) = site(a, b)(k);
        const Eigen::Matrix3d t = unitary * comp * unitary.transpose();
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) out(a, b)(k) = t(a, b);
    }
    return out;
}

// General-input path and oracle: dense symmetric diagonalisation plus the
// unitary transform of the site dipole matrix.
inline EigenSystem diag_numeric(const SiteHamiltonian& h, const DipoleMatrix& site) {
    const double scale = h.h.cwiseAbs().maxCoeff();
    if ((h.h - h.h.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1.0))
        throw config_error("diag_numeric: hamiltonian must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(h.h);
    if (solver.info() != Eigen::Success)
        throw numeric_error("diag_numeric: eigensolver failed to converge");
    EigenSystem out;
    out.energies = solver.eigenvalues();
    out.unitary = solver.eigenvectors().transpose(); // rows = eigenvectors
    out.dipoles = transform_dipoles(out.unitary, site);
    out.tag = CaseTag::Numeric;
    detail::canonical_signs(out.unitary, out.dipoles);
    return out;
}

inline EigenSystem diag_numeric(const DimerConfig& cfg) {
    return diag_numeric(assemble_site_hamiltonian(cfg), site_dipole_matrix(cfg));
}

inline MixingAngles direct_mixing(double eps1, double eps2, double q12) {
    const double w = std::hypot(eps1 - eps2, 2.0 * q12);
    if (!(w > case_tolerance_ev))
        throw config_error("direct coupling: excited states degenerate, eigenbasis undefined");
    MixingAngles m;
    // Orientation chosen so that cos(chi/2)|1> + sin(chi/2)|2> is the lower
    // excited eigenstate.
    m.chi = std::atan2(-2.0 * q12 / w, (eps2 - eps1) / w);
    m.d1_weight = 1.0;
    m.d2_weight = 0.0;
    return m;
}

// Direct coupling: only the two single-excitation states hybridise. The
// ground state is untouched and the inter-excited dipole is carried entirely
// by the difference of the permanent-dipole changes.
inline EigenSystem diag_case_a(const DimerConfig& cfg) {
    const SiteHamiltonian sh = assemble_site_hamiltonian(cfg);
    detail::require_offdiag_zero(sh.h(0, 1), "Q'_01");
    detail::require_offdiag_zero(sh.h(0, 2), "Q'_02");
    const double eps1 = sh.h(1, 1), eps2 = sh.h(2, 2), q12 = sh.h(1, 2);
    const double w12 = std::hypot(eps1 - eps2, 2.0 * q12);
    if (!(w12 > case_tolerance_ev))
        throw config_error("direct coupling: excited states degenerate, eigenbasis undefined");

    const double cos_chi = (eps2 - eps1) / w12;
    const double sin_chi = -2.0 * q12 / w12;
    double c, s;
    detail::half_angle(cos_chi, sin_chi, c, s);

    EigenSystem out;
    out.tag = CaseTag::Direct;
    out.energies << 0.0, 0.5 * (eps1 + eps2 - w12), 0.5 * (eps1 + eps2 + w12);
    out.unitary << 1, 0, 0,
                   0, c, s,
                   0, -s, c;

    const DipoleMatrix site = site_dipole_matrix(cfg);
    const Vec3 mu1 = site(0, 1), mu2 = site(0, 2);
    const Vec3 p11 = site(1, 1), p22 = site(2, 2);
    DipoleMatrix d;
    d.set_symmetric(0, 0, site(0, 0));
    d.set_symmetric(0, 1, c * mu1 + s * mu2);
    d.set_symmetric(0, 2, c * mu2 - s * mu1);
    d.set_symmetric(1, 1, c * c * p11 + s * s * p22);
    d.set_symmetric(2, 2, s * s * p11 + c * c * p22);
    d.set_symmetric(1, 2, -c * s * (p11 - p22));
    out.dipoles = d;

    detail::sort_states(out.energies, out.unitary, out.dipoles);
    detail::canonical_signs(out.unitary, out.dipoles);
    return out;
}

inline MixingAngles indirect_mixing(double eps, double q01, double q02) {
    const double qbar = std::hypot(q01, q02);
    if (!(qbar > case_tolerance_ev))
        throw config_error("indirect coupling: no ground-excited driving, eigenbasis undefined");
    const double w02 = std::hypot(eps, 2.0 * qbar);
    MixingAngles m;
    m.chi = std::atan2(2.0 * qbar / w02, eps / w02);
    m.d1_weight = q01 / qbar;
    m.d2_weight = q02 / qbar;
    return m;
}

// Indirect coupling: the ground state drives both excitations; the state
// orthogonal to the driven combination keeps its site energy, and permanent
// dipole changes enter every ground-manifold transition dipole.
inline EigenSystem diag_case_b(const DimerConfig& cfg) {
    const SiteHamiltonian sh = assemble_site_hamiltonian(cfg);
    detail::require_offdiag_zero(sh.h(1, 2), "Q'_12");
    const double eps1 = sh.h(1, 1), eps2 = sh.h(2, 2);
    if (std::abs(eps1 - eps2) > case_tolerance_ev)
        throw config_error("indirect coupling requires degenerate site energies "
                           "(|eps1 - eps2| = " + std::to_string(std::abs(eps1 - eps2)) + " eV)");
    const double eps = 0.5 * (eps1 + eps2);
    const double q01 = sh.h(0, 1), q02 = sh.h(0, 2);
    const double qbar = std::hypot(q01, q02);
    if (!(qbar > case_tolerance_ev))
        throw config_error("indirect coupling: no ground-excited driving, eigenbasis undefined");

    const double d1 = q01 / qbar, d2 = q02 / qbar;
    const double w02 = std::hypot(eps, 2.0 * qbar);
    const double cos_chi = eps / w02;
    const double sin_chi = 2.0 * qbar / w02;
    double c, s;
    detail::half_angle(cos_chi, sin_chi, c, s);

    EigenSystem out;
    out.tag = CaseTag::Indirect;
    out.energies << 0.5 * (eps - w02), eps, 0.5 * (eps + w02);
    out.unitary << c, -s * d1, -s * d2,
                   0, d2, -d1,
                   s, c * d1, c * d2;

    const DipoleMatrix site = site_dipole_matrix(cfg);
    const Vec3 mu1 = site(0, 1), mu2 = site(0, 2);
    const Vec3 p00 = site(0, 0), p11 = site(1, 1), p22 = site(2, 2);
    const Vec3 delta1 = p11 - p00, delta2 = p22 - p00; // Delta_j of each monomer
    const Vec3 driven_mu = d1 * mu1 + d2 * mu2;
    const Vec3 driven_perm = d1 * d1 * p11 + d2 * d2 * p22;

    DipoleMatrix d;
    d.set_symmetric(0, 0, c * c * p00 + s * s * driven_perm - sin_chi * driven_mu);
    d.set_symmetric(1, 1, d2 * d2 * p11 + d1 * d1 * p22);
    d.set_symmetric(2, 2, s * s * p00 + c * c * driven_perm + sin_chi * driven_mu);
    d.set_symmetric(0, 1, c * (d2 * mu1 - d1 * mu2) - s * d1 * d2 * (delta1 - delta2));
    d.set_symmetric(1, 2, s * (d2 * mu1 - d1 * mu2) + c * d1 * d2 * (delta1 - delta2));
    d.set_symmetric(0, 2, cos_chi * driven_mu -
                              0.5 * sin_chi * (d1 * d1 * delta1 + d2 * d2 * delta2));
    out.dipoles = d;

    detail::sort_states(out.energies, out.unitary, out.dipoles);
    detail::canonical_signs(out.unitary, out.dipoles);
    return out;
}

inline MixingAngles mixed_mixing(double eps, double qg, double qx) {
    const double shifted = eps + qx;
    const double w02 = std::hypot(shifted, 2.0 * std::sqrt(2.0) * qg);
    if (!(w02 > case_tolerance_ev))
        throw config_error("mixed coupling: vanishing bright-block splitting");
    MixingAngles m;
    m.chi = std::atan2(2.0 * std::sqrt(2.0) * qg / w02, shifted / w02);
    m.d1_weight = 1.0 / std::sqrt(2.0);
    m.d2_weight = 1.0 / std::sqrt(2.0);
    return m;
}

// Mixed coupling for symmetric homodimers: equal driving on both monomers
// plus a direct inter-excited coupling. The antisymmetric state decouples at
// eps - Q_X while |0> hybridises with the symmetric combination.
inline EigenSystem diag_case_c(const DimerConfig& cfg) {
    const SiteHamiltonian sh = assemble_site_hamiltonian(cfg);
    const double eps1 = sh.h(1, 1), eps2 = sh.h(2, 2);
    if (std::abs(eps1 - eps2) > case_tolerance_ev)
        throw config_error("mixed coupling requires degenerate site energies "
                           "(|eps1 - eps2| = " + std::to_string(std::abs(eps1 - eps2)) + " eV)");
    if (std::abs(sh.h(0, 1) - sh.h(0, 2)) > case_tolerance_ev)
        throw config_error("mixed coupling requires symmetric driving Q'_01 = Q'_02");
    const double eps = 0.5 * (eps1 + eps2);
    const double qg = 0.5 * (sh.h(0, 1) + sh.h(0, 2));
    const double qx = sh.h(1, 2);

    const double shifted = eps + qx;
    const double w02 = std::hypot(shifted, 2.0 * std::sqrt(2.0) * qg);
    if (!(w02 > case_tolerance_ev))
        throw config_error("mixed coupling: vanishing bright-block splitting");
    const double cos_chi = shifted / w02;
    const double sin_chi = 2.0 * std::sqrt(2.0) * qg / w02;
    double c, s;
    detail::half_angle(cos_chi, sin_chi, c, s);
    const double r2 = 1.0 / std::sqrt(2.0);

    EigenSystem out;
    out.tag = CaseTag::Mixed;
    out.energies << 0.5 * (shifted - w02), eps - qx, 0.5 * (shifted + w02);
    out.unitary << c, -s * r2, -s * r2,
                   0, r2, -r2,
                   s, c * r2, c * r2;

    const DipoleMatrix site = site_dipole_matrix(cfg);
    const Vec3 mu1 = site(0, 1), mu2 = site(0, 2);
    const Vec3 p00 = site(0, 0), p11 = site(1, 1), p22 = site(2, 2);
    const Vec3 delta1 = p11 - p00, delta2 = p22 - p00;

    DipoleMatrix d;
    d.set_symmetric(0, 0, c * c * p00 + 0.5 * s * s * (p11 + p22) - sin_chi * r2 * (mu1 + mu2));
    d.set_symmetric(1, 1, 0.5 * (p11 + p22));
    d.set_symmetric(2, 2, s * s * p00 + 0.5 * c * c * (p11 + p22) + sin_chi * r2 * (mu1 + mu2));
    d.set_symmetric(0, 1, c * r2 * (mu1 - mu2) - 0.5 * s * (delta1 - delta2));
    d.set_symmetric(1, 2, s * r2 * (mu1 - mu2) + 0.5 * c * (delta1 - delta2));
    d.set_symmetric(0, 2, cos_chi * r2 * (mu1 + mu2) - 0.25 * sin_chi * (delta1 + delta2));
    out.dipoles = d;

    detail::sort_states(out.energies, out.unitary, out.dipoles);
    detail::canonical_signs(out.unitary, out.dipoles);
    return out;
}

// Plumbing: picks the closed-form structure whose preconditions the effective
// Hamiltonian satisfies, falling back to the numeric path.
inline CaseTag classify(const DimerConfig& cfg, double tol = case_tolerance_ev) {
    const SiteHamiltonian sh = assemble_site_hamiltonian(cfg);
    const double q01 = sh.h(0, 1), q02 = sh.h(0, 2), q12 = sh.h(1, 2);
    const double deps = sh.h(1, 1) - sh.h(2, 2);
    if (std::abs(q01) <= tol && std::abs(q02) <= tol &&
        std::hypot(deps, 2.0 * q12) > tol)
        return CaseTag::Direct;
    if (std::abs(deps) <= tol && std::abs(q01 - q02) <= tol && std::hypot(q01, q02) > tol)
        return std::abs(q12) <= tol ? CaseTag::Indirect : CaseTag::Mixed;
    return CaseTag::Numeric;
}

inline EigenSystem diagonalize(const DimerConfig& cfg, CaseTag tag) {
    switch (tag) {
        case CaseTag::Direct: return diag_case_a(cfg);
        case CaseTag::Indirect: return diag_case_b(cfg);
        case CaseTag::Mixed: return diag_case_c(cfg);
        default: return diag_numeric(cfg);
    }
}

// Eigenbasis transition dipole of a single monomer in a uniform electric
// field, as derived from first-order state mixing. Not unit-normalised in the
// zero-field limit, where it evaluates to 2 mu.
inline Vec3 uniform_field_transition_dipole(const Monomer& monomer, const Vec3& field_ev_per_debye) {
    const double eps = monomer.excitation_energy_ev;
    const Vec3 mu = monomer.dipoles.mu;
    const Vec3 delta = monomer.dipoles.delta();
    const double de = delta.dot(field_ev_per_debye);
    const double me = mu.dot(field_ev_per_debye);
    const double arg = 0.25 * (eps + de) * (eps + de) + me * me;
    if (!(arg > 0.0))
        throw numeric_error("uniform_field_transition_dipole: degenerate monomer (zero splitting)");
    return ((eps + de) * mu - me * delta) / std::sqrt(arg);
}

} // namespace dimersim
