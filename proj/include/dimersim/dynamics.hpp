#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "dimersim/bath.hpp"
#include "dimersim/eigensystem.hpp"
#include "dimersim/errors.hpp"

namespace dimersim {

// Pairwise population-transfer rates among the three eigenstates, in eV.
// rate(from, to) moves population from -> to; the generator acts on column
// population vectors and its columns sum to zero.
struct RateMatrix {
    Eigen::Matrix3d rate = Eigen::Matrix3d::Zero();

    Eigen::Matrix3d generator() const {
        Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
        for (int from = 0; from < 3; ++from)
            for (int to = 0; to < 3; ++to) {
                if (from == to) continue;
                g(to, from) += rate(from, to);
                g(from, from) -= rate(from, to);
            }
        return g;
    }
};

inline constexpr double secular_gap_ev = 1e-12;

// rate(b -> a) = |d_ab|^2 gamma(E_b - E_a): downhill transfers take the
// emission branch, uphill the absorption branch, and permanent (diagonal)
// dipoles never enter.
inline RateMatrix build_rate_matrix(const EigenSystem& es, const BathSpec& bath) {
    bath.validate();
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b)
            if (std::abs(es.energies(a) - es.energies(b)) < secular_gap_ev)
                throw secular_error("build_rate_matrix: eigenstates " + std::to_string(a) +
                                    " and " + std::to_string(b) + " are degenerate (gap " +
                                    std::to_string(std::abs(es.energies(a) - es.energies(b))) +
                                    " eV), secular rates undefined");
    RateMatrix rm;
    for (int from = 0; from < 3; ++from)
        for (int to = 0; to < 3; ++to) {
            if (from == to) continue;
            const double dsq = es.dipoles(to, from).squaredNorm();
            if (dsq == 0.0) continue;
            rm.rate(from, to) = dsq * gamma_rate(es.energies(from) - es.energies(to), bath);
        }
    return rm;
}

struct PopulationTrajectory {
    std::vector<double> times_natural;            // hbar/eV
    std::vector<Eigen::Vector3d> populations;
    bool series_fallback = false;
    double fallback_error_bound = 0.0;

    double time_seconds(std::size_t i) const {
        return constants::seconds_from_natural(times_natural[i]);
    }
};

namespace detail {

inline Eigen::Matrix3d expm_scaled_taylor(const Eigen::Matrix3d& a, double& err_bound) {
    const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    double scale = 1.0;
    while (norm * scale > 0.5) {
        scale *= 0.5;
        ++squarings;
    }
    const Eigen::Matrix3d as = a * scale;
    Eigen::Matrix3d term = Eigen::Matrix3d::Identity();
    Eigen::Matrix3d sum = Eigen::Matrix3d::Identity();
    constexpr int order = 24;
    for (int k = 1; k <= order; ++k) {
        term = (term * as) / static_cast<double>(k);
        sum += term;
    }
    // Truncation of the scaled series, amplified by the squaring stages.
    double tail = term.cwiseAbs().maxCoeff();
    err_bound = tail * std::exp2(squarings) * 3.0;
    for (int k = 0; k < squarings; ++k) sum = sum * sum;
    return sum;
}

} // namespace detail

// Propagates p' = G p through the spectral decomposition of the generator;
// a defective or ill-conditioned eigenbasis falls back to a scaled series
// exponential with a reported error bound.
inline PopulationTrajectory evolve(const RateMatrix& rm, const Eigen::Vector3d& initial,
                                   const std::vector<double>& times_natural) {
    const double total = initial.sum();
    if (std::abs(total - 1.0) > 1e-9)
        throw config_error("evolve: initial populations must sum to 1");
    for (int i = 0; i < 3; ++i)
        if (initial(i) < -1e-12) throw config_error("evolve: initial populations must be nonnegative");

    const Eigen::Matrix3d g = rm.generator();
    PopulationTrajectory out;
    out.times_natural = times_natural;
    out.populations.reserve(times_natural.size());

    Eigen::EigenSolver<Eigen::Matrix3d> solver(g);
    bool spectral_ok = solver.info() == Eigen::Success;
    Eigen::Matrix3cd v;
    Eigen::Vector3cd lam, coeff;
    if (spectral_ok) {
        v = solver.eigenvectors();
        lam = solver.eigenvalues();
        const Eigen::JacobiSVD<Eigen::Matrix3cd> svd(v);
        const double cond = svd.singularValues()(0) / svd.singularValues()(2);
        if (!std::isfinite(cond) || cond > 1e10) {
            spectral_ok = false;
        } else {
            coeff = v.colPivHouseholderQr().solve(initial.cast<std::complex<double>>());
        }
    }

    for (double t : times_natural) {
        Eigen::Vector3d p;
        if (spectral_ok) {
            Eigen::Vector3cd acc = Eigen::Vector3cd::Zero();
            for (int k = 0; k < 3; ++k) {
                const std::complex<double> lt = lam(k) * t;
                acc += coeff(k) * std::exp(lt) * v.col(k);
            }
            p = acc.real();
        } else {
            double bound = 0.0;
            const Eigen::Matrix3d u = detail::expm_scaled_taylor(g * t, bound);
            p = u * initial;
            out.series_fallback = true;
            out.fallback_error_bound = std::max(out.fallback_error_bound, bound);
        }
        for (int i = 0; i < 3; ++i) p(i) = std::clamp(p(i), 0.0, 1.0);
        out.populations.push_back(p);
    }
    return out;
}

namespace detail {

// Reachability closure over the directed rate graph.
inline std::array<std::array<bool, 3>, 3> reachability(const RateMatrix& rm) {
    std::array<std::array<bool, 3>, 3> r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r[i][j] = (i == j) || rm.rate(i, j) > 0.0;
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r[i][j] = r[i][j] || (r[i][k] && r[k][j]);
    return r;
}

} // namespace detail

// Stationary distribution: the normalised null vector of the generator,
// supported on the unique closed communicating class. Several closed classes
// mean the stationary state is not unique and the caller must split the
// problem.
inline Eigen::Vector3d steady_state(const RateMatrix& rm) {
    const auto reach = detail::reachability(rm);
    std::array<int, 3> cls{-1, -1, -1};
    int ncls = 0;
    for (int i = 0; i < 3; ++i) {
        if (cls[i] >= 0) continue;
        cls[i] = ncls;
        for (int j = i + 1; j < 3; ++j)
            if (reach[i][j] && reach[j][i]) cls[j] = ncls;
        ++ncls;
    }
    std::vector<std::vector<int>> closed;
    for (int c = 0; c < ncls; ++c) {
        std::vector<int> members;
        for (int i = 0; i < 3; ++i)
            if (cls[i] == c) members.push_back(i);
        bool is_closed = true;
        for (int i : members)
            for (int j = 0; j < 3; ++j)
                if (cls[j] != c && reach[i][j]) is_closed = false;
        if (is_closed) closed.push_back(members);
    }
    if (closed.size() != 1) {
        std::string msg = "steady_state: multiple steady states; closed classes:";
        for (const auto& cc : closed) {
            msg += " {";
            for (std::size_t k = 0; k < cc.size(); ++k)
                msg += (k ? "," : "") + std::to_string(cc[k]);
            msg += "}";
        }
        throw numeric_error(msg);
    }

    const std::vector<int>& support = closed.front();
    Eigen::Vector3d pi = Eigen::Vector3d::Zero();
    const int n = static_cast<int>(support.size());
    if (n == 1) {
        pi(support[0]) = 1.0;
        return pi;
    }
    const Eigen::Matrix3d g = rm.generator();
    Eigen::MatrixXd sub(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) sub(i, j) = g(support[i], support[j]);
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub, Eigen::ComputeFullV);
    Eigen::VectorXd null_vec = svd.matrixV().col(n - 1);
    if (null_vec.sum() < 0.0) null_vec = -null_vec;
    for (int i = 0; i < n; ++i) pi(support[i]) = std::max(null_vec(i), 0.0);
    pi /= pi.sum();
    return pi;
}

// Squared ground-manifold transition dipoles of the excited eigenstates with
// a relative darkness measure against the strongest monomer dipole.
struct DarkReport {
    double d01_sq_debye2 = 0.0;
    double d02_sq_debye2 = 0.0;
    double relative1 = 0.0;
    double relative2 = 0.0;
    bool dark1 = false;
    bool dark2 = false;
    double threshold = 1e-6;
};

inline DarkReport dark_report(const EigenSystem& es, double mu_max_sq_debye2, double threshold) {
    if (!(threshold > 0.0)) throw config_error("dark_report: threshold must be > 0");
    if (!(mu_max_sq_debye2 > 0.0))
        throw config_error("dark_report: reference dipole must be nonzero");
    DarkReport rep;
    rep.threshold = threshold;
    rep.d01_sq_debye2 = es.dipoles(0, 1).squaredNorm();
    rep.d02_sq_debye2 = es.dipoles(0, 2).squaredNorm();
    rep.relative1 = rep.d01_sq_debye2 / mu_max_sq_debye2;
    rep.relative2 = rep.d02_sq_debye2 / mu_max_sq_debye2;
    rep.dark1 = rep.relative1 < threshold;
    rep.dark2 = rep.relative2 < threshold;
    return rep;
}

inline DarkReport dark_report(const EigenSystem& es, const DimerConfig& cfg, double threshold) {
    const double m1 = cfg.monomer1.dipoles.mu.squaredNorm();
    const double m2 = cfg.monomer2.dipoles.mu.squaredNorm();
    return dark_report(es, std::max(m1, m2), threshold);
}

} // namespace dimersim
