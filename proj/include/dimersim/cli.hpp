#pragma once

#include <cinttypes>
#include <filesystem>
#include <string>
#include <vector>

#include "dimersim/config.hpp"
#include "dimersim/csv.hpp"
#include "dimersim/dynamics.hpp"
#include "dimersim/eigensystem.hpp"
#include "dimersim/experiments.hpp"
#include "dimersim/polaron.hpp"

namespace dimersim {

inline constexpr const char* version_string = "0.1.0";

enum class ExitCode : int { Ok = 0, Config = 2, Numeric = 3, Secular = 4 };

namespace cli_detail {

inline EigenSystem diagonalize_selected(const RunConfig& rc) {
    CaseTag tag = CaseTag::Numeric;
    if (rc.case_selection == "auto") tag = classify(rc.dimer);
    else if (rc.case_selection == "direct") tag = CaseTag::Direct;
    else if (rc.case_selection == "indirect") tag = CaseTag::Indirect;
    else if (rc.case_selection == "mixed") tag = CaseTag::Mixed;
    return diagonalize(rc.dimer, tag);
}

inline std::string config_echo(const RunConfig& rc) { return resolved_config_json(rc).dump(); }

inline std::string out_path(const std::string& out_dir, const RunConfig& rc) {
    std::filesystem::create_directories(out_dir);
    return (std::filesystem::path(out_dir) / (std::string(to_string(rc.command)) + ".csv"))
        .string();
}

inline void write_spectrum(const RunConfig& rc, const std::string& path) {
    const EigenSystem es = cli_detail::diagonalize_selected(rc);
    csv::Writer w(path, version_string, config_echo(rc), rc.master_seed);
    w.row({std::string("# case: ") + to_string(es.tag)});
    w.header({"state_a", "state_b", "e_a_ev", "e_b_ev", "omega_ab_ev", "d_ab_sq_debye2"});
    for (int a = 0; a < 3; ++a)
        for (int b = a; b < 3; ++b)
            w.row({std::to_string(a), std::to_string(b), csv::format_double(es.energies(a)),
                   csv::format_double(es.energies(b)),
                   csv::format_double(es.energies(a) - es.energies(b)),
                   csv::format_double(es.dipoles(a, b).squaredNorm())});
}

inline void write_rates(const RunConfig& rc, const std::string& path) {
    const EigenSystem es = cli_detail::diagonalize_selected(rc);
    const RateMatrix rm = build_rate_matrix(es, rc.bath);
    csv::Writer w(path, version_string, config_echo(rc), rc.master_seed);
    w.header({"from_state", "to_state", "omega_ev", "rate_ev"});
    for (int from = 0; from < 3; ++from)
        for (int to = 0; to < 3; ++to) {
            if (from == to) continue;
            w.row({std::to_string(from), std::to_string(to),
                   csv::format_double(es.energies(from) - es.energies(to)),
                   csv::format_double(rm.rate(from, to))});
        }
}

inline void write_evolve(const RunConfig& rc, const std::string& path) {
    const EvolveBlock& eb = *rc.evolve_block;
    const Eigen::Vector3d initial(eb.initial[0], eb.initial[1], eb.initial[2]);
    const PopulationTrajectory traj =
        run_population_study(rc.dimer, rc.bath, initial, eb.t_min_s, eb.t_max_s, eb.points);
    csv::Writer w(path, version_string, config_echo(rc), rc.master_seed);
    w.header({"time_s", "pop0_dimensionless", "pop1_dimensionless", "pop2_dimensionless"});
    for (std::size_t i = 0; i < traj.times_natural.size(); ++i)
        w.row({csv::format_double(traj.time_seconds(i)),
               csv::format_double(traj.populations[i](0)),
               csv::format_double(traj.populations[i](1)),
               csv::format_double(traj.populations[i](2))});
}

inline void write_scan(const RunConfig& rc, const std::string& path) {
    const ScanBlock& sb = *rc.scan_block;
    const ScanGrid grid = run_dark_scan(rc.dimer, rc.bath, sb.q01_axis, sb.delta_axis,
                                        sb.q02_values_ev, rc.dark_threshold);
    csv::Writer w(path, version_string, config_echo(rc), rc.master_seed);
    w.header({"q01_ev", "q02_ev", "delta_debye", "d01_sq_debye2", "d01_relative_dimensionless",
              "d01_dark_flag", "d02_sq_debye2", "d02_relative_dimensionless", "d02_dark_flag"});
    for (const ScanCell& c : grid.cells)
        w.row({csv::format_double(c.q01_ev), csv::format_double(c.q02_ev),
               csv::format_double(c.delta_debye), csv::format_double(c.report.d01_sq_debye2),
               csv::format_double(c.report.relative1), c.report.dark1 ? "1" : "0",
               csv::format_double(c.report.d02_sq_debye2), csv::format_double(c.report.relative2),
               c.report.dark2 ? "1" : "0"});
}

inline void write_ensemble(const RunConfig& rc, const std::string& path) {
    EnsembleBlock eb = *rc.ensemble_block;
    eb.spec.master_seed = rc.master_seed;
    const std::vector<EnsembleStats> stats =
        run_robustness_ensemble(eb.spec, eb.ratios, eb.deltas_debye, rc.bath, rc.threads);
    csv::Writer w(path, version_string, config_echo(rc), rc.master_seed);
    w.header({"ratio_dimensionless", "delta_debye", "mean_rate_10_ev", "stderr_10_ev",
              "mean_rate_20_ev", "stderr_20_ev", "mean_rate_21_ev", "stderr_21_ev", "redraws"});
    for (const EnsembleStats& s : stats)
        w.row({csv::format_double(s.ratio), csv::format_double(s.delta_debye),
               csv::format_double(s.mean_rate_10_ev), csv::format_double(s.stderr_10_ev),
               csv::format_double(s.mean_rate_20_ev), csv::format_double(s.stderr_20_ev),
               csv::format_double(s.mean_rate_21_ev), csv::format_double(s.stderr_21_ev),
               std::to_string(s.redraws)});
}

inline void write_polaron(const RunConfig& rc, const std::string& path) {
    const EigenSystem es = cli_detail::diagonalize_selected(rc);
    const double lambda = effective_lambda(rc.dimer);
    const PolaronFrame frame = build_polaron_frame(es, lambda);
    csv::Writer w(path, version_string, config_echo(rc), rc.master_seed);
    w.row({std::string("# lambda_ev: ") + csv::format_double(lambda)});
    w.header({"from_state", "to_state", "omega_ev", "omega_bar_ev", "rate_sbrme_ev",
              "rate_corrected_ev", "rate_full_ev", "delta_relative_dimensionless"});
    for (int from = 0; from < 3; ++from)
        for (int to = 0; to < 3; ++to) {
            if (from == to) continue;
            const PolaronRate pr = corrected_rate(frame, es, rc.bath, to, from);
            const double full = full_polaron_rate(frame, es, rc.bath, to, from);
            const double rel =
                pr.sbrme_ev != 0.0 ? pr.delta_gamma_ev() / pr.sbrme_ev : 0.0;
            w.row({std::to_string(from), std::to_string(to), csv::format_double(pr.omega_ev),
                   csv::format_double(pr.omega_bar_ev), csv::format_double(pr.sbrme_ev),
                   csv::format_double(pr.rate_ev), csv::format_double(full),
                   csv::format_double(rel)});
        }
}

} // namespace cli_detail

// Dispatches a parsed configuration and writes the command's CSV artifact.
// Returns the output path.
inline std::string run(const RunConfig& rc, const std::string& out_dir) {
    const std::string path = cli_detail::out_path(out_dir, rc);
    switch (rc.command) {
        case Command::Spectrum: cli_detail::write_spectrum(rc, path); break;
        case Command::Rates: cli_detail::write_rates(rc, path); break;
        case Command::Evolve: cli_detail::write_evolve(rc, path); break;
        case Command::ScanDark: cli_detail::write_scan(rc, path); break;
        case Command::Ensemble: cli_detail::write_ensemble(rc, path); break;
        case Command::Polaron: cli_detail::write_polaron(rc, path); break;
    }
    return path;
}

} // namespace dimersim
