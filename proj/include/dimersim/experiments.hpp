#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "dimersim/dynamics.hpp"
#include "dimersim/eigensystem.hpp"
#include "dimersim/errors.hpp"
#include "dimersim/rng.hpp"

namespace dimersim {

// Logarithmically spaced population dynamics for a direct-coupling dimer.
inline PopulationTrajectory run_population_study(const DimerConfig& cfg, const BathSpec& bath,
                                                 const Eigen::Vector3d& initial, double t_min_s,
                                                 double t_max_s, int points) {
    if (!(t_min_s > 0.0) || !(t_max_s > t_min_s))
        throw config_error("population study: need 0 < t_min_s < t_max_s");
    if (points < 2) throw config_error("population study: need at least 2 time points");
    const EigenSystem es = diag_case_a(cfg);
    const RateMatrix rm = build_rate_matrix(es, bath);
    std::vector<double> times(points);
    const double lo = std::log(constants::natural_from_seconds(t_min_s));
    const double hi = std::log(constants::natural_from_seconds(t_max_s));
    for (int i = 0; i < points; ++i)
        times[i] = std::exp(lo + (hi - lo) * i / (points - 1));
    return evolve(rm, initial, times);
}

struct ScanAxis {
    double min = 0.0;
    double max = 0.0;
    int steps = 0;

    double value(int i) const {
        if (steps == 1) return min;
        return min + (max - min) * i / (steps - 1);
    }
    void validate(const char* name) const {
        if (steps < 1) throw config_error(std::string(name) + ": steps must be >= 1");
        if (steps > 1 && !(max > min))
            throw config_error(std::string(name) + ": max must exceed min");
    }
};

struct ScanCell {
    double q01_ev = 0.0;
    double q02_ev = 0.0;
    double delta_debye = 0.0;
    DarkReport report;
};

struct ScanGrid {
    ScanAxis q01_axis;
    ScanAxis delta_axis;
    std::vector<double> q02_values;
    double threshold = 1e-6;
    std::vector<ScanCell> cells; // q02 outer, then q01, then delta
};

// Sweeps the indirect-coupling configuration space: ground-excited driving on
// one axis, magnitude of the permanent-dipole change on the other, one slice
// per Q_02 value. The template fixes transition dipoles and the directions of
// the permanent-dipole changes; their magnitudes come from the grid.
inline ScanGrid run_dark_scan(const DimerConfig& tmpl, const BathSpec&, const ScanAxis& q01_axis,
                              const ScanAxis& delta_axis, const std::vector<double>& q02_values,
                              double threshold) {
    q01_axis.validate("scan q01 axis");
    delta_axis.validate("scan delta axis");
    if (q02_values.empty()) throw config_error("scan: need at least one q02 value");
    if (!(threshold > 0.0)) throw config_error("scan: threshold must be > 0");

    auto direction = [](const Vec3& v, const Vec3& fallback) {
        const double n = v.norm();
        return n > 0.0 ? Vec3(v / n) : fallback;
    };
    const Vec3 mu1_hat = direction(tmpl.monomer1.dipoles.mu, Vec3::UnitX());
    const Vec3 dir1 = direction(tmpl.monomer1.dipoles.delta(), mu1_hat);
    const Vec3 dir2 = direction(tmpl.monomer2.dipoles.delta(), -dir1);

    ScanGrid grid;
    grid.q01_axis = q01_axis;
    grid.delta_axis = delta_axis;
    grid.q02_values = q02_values;
    grid.threshold = threshold;
    grid.cells.reserve(static_cast<std::size_t>(q01_axis.steps) * delta_axis.steps *
                       q02_values.size());

    for (double q02 : q02_values)
        for (int i = 0; i < q01_axis.steps; ++i)
            for (int j = 0; j < delta_axis.steps; ++j) {
                DimerConfig cfg = tmpl;
                cfg.coupling.q01 = q01_axis.value(i);
                cfg.coupling.q02 = q02;
                cfg.coupling.q12 = 0.0;
                const double mag = delta_axis.value(j);
                cfg.monomer1.dipoles.perm_excited = cfg.monomer1.dipoles.perm_ground + mag * dir1;
                cfg.monomer2.dipoles.perm_excited = cfg.monomer2.dipoles.perm_ground + mag * dir2;
                ScanCell cell;
                cell.q01_ev = cfg.coupling.q01;
                cell.q02_ev = q02;
                cell.delta_debye = mag;
                cell.report = dark_report(diag_case_b(cfg), cfg, threshold);
                grid.cells.push_back(cell);
            }
    return grid;
}

// Solves for the mixed-coupling strengths (Q_G, Q_X >= 0) that keep the
// excited-state splitting fixed while the ratio r = Q_G/(Q_G + Q_X) sweeps
// from pure direct (r = 0) to pure indirect (r = 1) coupling.
struct MixedCouplings {
    double qg = 0.0;
    double qx = 0.0;
};

inline MixedCouplings couplings_for_ratio(double r, double eps_ev, double splitting_ev) {
    if (!(r >= 0.0 && r <= 1.0)) throw config_error("ratio must be in [0, 1]");
    if (!(splitting_ev > 0.0) || !(eps_ev > 0.0))
        throw config_error("couplings_for_ratio: eps and splitting must be > 0");
    const double w = splitting_ev, eps = eps_ev;
    if (r == 0.0) return {0.0, 0.5 * w};
    if (r == 1.0) return {std::sqrt(0.5 * w * (eps + w)), 0.0};

    // Scale t with Q_G = r t, Q_X = (1-r) t solves
    //   2(2r-1) t^2 + (3w+2eps)(1-r) t - w(w+eps) = 0,
    // subject to 3 Q_X <= 2w + eps (the branch where the splitting formula
    // holds before squaring).
    const double a = 2.0 * (2.0 * r - 1.0);
    const double b = (3.0 * w + 2.0 * eps) * (1.0 - r);
    const double c = w * (w + eps);
    double t;
    if (std::abs(a) < 1e-14) {
        t = c / b;
    } else {
        const double disc = b * b + 4.0 * a * c;
        if (disc < 0.0) throw numeric_error("couplings_for_ratio: no real solution");
        const double sq = std::sqrt(disc);
        const double t1 = (-b + sq) / (2.0 * a);
        const double t2 = (-b - sq) / (2.0 * a);
        t = -1.0;
        for (double cand : {t1, t2}) {
            if (!(cand > 0.0)) continue;
            if (3.0 * (1.0 - r) * cand > 2.0 * w + eps + 1e-12) continue;
            if (t < 0.0 || cand < t) t = cand;
        }
        if (t < 0.0) throw numeric_error("couplings_for_ratio: no admissible root");
    }
    return {r * t, (1.0 - r) * t};
}

struct EnsembleSpec {
    double epsilon_ev = 2.4;
    double mu_debye = 10.0;
    double splitting_ev = 0.150;
    double sigma_ev = 0.025;
    int samples = 1000;
    std::uint64_t master_seed = 1;

    void validate() const {
        if (!(sigma_ev >= 0.0)) throw config_error("ensemble.sigma_ev: must be >= 0");
        if (samples < 1) throw config_error("ensemble.samples: must be >= 1");
        if (!(epsilon_ev > 0.0)) throw config_error("ensemble.epsilon_ev: must be > 0");
        if (!(splitting_ev > 0.0)) throw config_error("ensemble.splitting_ev: must be > 0");
    }
};

struct EnsembleStats {
    double ratio = 0.0;
    double delta_debye = 0.0;
    double mean_rate_10_ev = 0.0, stderr_10_ev = 0.0;
    double mean_rate_20_ev = 0.0, stderr_20_ev = 0.0;
    double mean_rate_21_ev = 0.0, stderr_21_ev = 0.0;
    long redraws = 0;
    int samples = 0;
    std::uint64_t master_seed = 0;
};

namespace ensemble_detail {

struct SampleRates {
    double r10 = 0.0, r20 = 0.0, r21 = 0.0;
    int redraws = 0;
};

// Draws of sample i depend only on (master_seed, i); cells reuse the same
// stream so different configurations see paired perturbations.
inline SampleRates one_sample(const EnsembleSpec& spec, const BathSpec& bath,
                              const DipoleMatrix& site, double qg, double qx,
                              std::uint64_t sample_index) {
    rng::SplitMix64 gen(rng::derive_stream(spec.master_seed, sample_index));
    SampleRates out;
    for (int attempt = 0;; ++attempt) {
        if (attempt > 100)
            throw numeric_error("ensemble: sample kept producing degenerate spectra");
        double z[4];
        rng::normal_pair(gen, z[0], z[1]);
        rng::normal_pair(gen, z[2], z[3]);
        SiteHamiltonian sh;
        const double qg_p = qg + spec.sigma_ev * z[2];
        sh.h(0, 0) = 0.0;
        sh.h(1, 1) = spec.epsilon_ev + spec.sigma_ev * z[0];
        sh.h(2, 2) = spec.epsilon_ev + spec.sigma_ev * z[1];
        sh.h(0, 1) = sh.h(1, 0) = qg_p;
        sh.h(0, 2) = sh.h(2, 0) = qg_p;
        sh.h(1, 2) = sh.h(2, 1) = qx + spec.sigma_ev * z[3];
        const EigenSystem es = diag_numeric(sh, site);
        bool degenerate = false;
        for (int p = 0; p < 3 && !degenerate; ++p)
            for (int q = p + 1; q < 3; ++q)
                if (std::abs(es.energies(p) - es.energies(q)) < secular_gap_ev) degenerate = true;
        if (degenerate) {
            ++out.redraws;
            continue;
        }
        const RateMatrix rm = build_rate_matrix(es, bath);
        out.r10 = rm.rate(1, 0);
        out.r20 = rm.rate(2, 0);
        out.r21 = rm.rate(2, 1);
        return out;
    }
}

inline void reduce(EnsembleStats& stats, const std::vector<SampleRates>& rates) {
    const int n = static_cast<int>(rates.size());
    double s10 = 0, s20 = 0, s21 = 0;
    for (const auto& r : rates) {
        s10 += r.r10;
        s20 += r.r20;
        s21 += r.r21;
        stats.redraws += r.redraws;
    }
    stats.samples = n;
    stats.mean_rate_10_ev = s10 / n;
    stats.mean_rate_20_ev = s20 / n;
    stats.mean_rate_21_ev = s21 / n;
    if (n > 1) {
        double v10 = 0, v20 = 0, v21 = 0;
        for (const auto& r : rates) {
            v10 += (r.r10 - stats.mean_rate_10_ev) * (r.r10 - stats.mean_rate_10_ev);
            v20 += (r.r20 - stats.mean_rate_20_ev) * (r.r20 - stats.mean_rate_20_ev);
            v21 += (r.r21 - stats.mean_rate_21_ev) * (r.r21 - stats.mean_rate_21_ev);
        }
        const double denom = static_cast<double>(n) * (n - 1);
        stats.stderr_10_ev = std::sqrt(v10 / denom);
        stats.stderr_20_ev = std::sqrt(v20 / denom);
        stats.stderr_21_ev = std::sqrt(v21 / denom);
    }
}

} // namespace ensemble_detail

// Site-basis dipoles of the aligned homodimer used throughout the robustness
// study: equal transition dipoles and equal permanent-dipole changes along x.
inline DimerConfig ensemble_base_config(const EnsembleSpec& spec, double delta_debye) {
    DimerConfig cfg;
    cfg.monomer1.excitation_energy_ev = spec.epsilon_ev;
    cfg.monomer2.excitation_energy_ev = spec.epsilon_ev;
    cfg.monomer1.dipoles.mu = Vec3(spec.mu_debye, 0, 0);
    cfg.monomer2.dipoles.mu = Vec3(spec.mu_debye, 0, 0);
    cfg.monomer1.dipoles.perm_excited = Vec3(delta_debye, 0, 0);
    cfg.monomer2.dipoles.perm_excited = Vec3(delta_debye, 0, 0);
    return cfg;
}

// Gaussian static disorder on the site energies and the two symmetric
// coupling strengths, one perturbed Hamiltonian per sample, diagonalised
// numerically. Samples are embarrassingly parallel and bit-exactly
// reproducible for a fixed master seed under any thread count.
inline std::vector<EnsembleStats> run_robustness_ensemble(const EnsembleSpec& spec,
                                                          const std::vector<double>& ratios,
                                                          const std::vector<double>& deltas_debye,
                                                          const BathSpec& bath, int threads = 1) {
    spec.validate();
    bath.validate();
    if (ratios.empty() || deltas_debye.empty())
        throw config_error("ensemble: ratio and delta grids must be nonempty");
    if (threads < 1) threads = 1;

    std::vector<EnsembleStats> out;
    out.reserve(ratios.size() * deltas_debye.size());

    for (double delta : deltas_debye) {
        const DimerConfig base = ensemble_base_config(spec, delta);
        const DipoleMatrix site = site_dipole_matrix(base);
        for (double r : ratios) {
            const MixedCouplings qc = couplings_for_ratio(r, spec.epsilon_ev, spec.splitting_ev);
            std::vector<ensemble_detail::SampleRates> rates(spec.samples);
            std::exception_ptr failure;
            std::mutex failure_mutex;
            auto worker = [&](int begin, int end) {
                try {
                    for (int i = begin; i < end; ++i)
                        rates[i] = ensemble_detail::one_sample(spec, bath, site, qc.qg, qc.qx,
                                                               static_cast<std::uint64_t>(i));
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            };
            if (threads == 1) {
                worker(0, spec.samples);
            } else {
                std::vector<std::thread> pool;
                const int chunk = (spec.samples + threads - 1) / threads;
                for (int t = 0; t < threads; ++t) {
                    const int begin = t * chunk;
                    const int end = std::min(spec.samples, begin + chunk);
                    if (begin >= end) break;
                    pool.emplace_back(worker, begin, end);
                }
                for (auto& th : pool) th.join();
            }
            if (failure) std::rethrow_exception(failure);

            EnsembleStats stats;
            stats.ratio = r;
            stats.delta_debye = delta;
            stats.master_seed = spec.master_seed;
            ensemble_detail::reduce(stats, rates);
            out.push_back(stats);
        }
    }
    return out;
}

} // namespace dimersim
