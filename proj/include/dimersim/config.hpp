#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "dimersim/bath.hpp"
#include "dimersim/errors.hpp"
#include "dimersim/experiments.hpp"
#include "dimersim/model.hpp"

namespace dimersim {

using json = nlohmann::json;

enum class Command { Spectrum, Rates, Evolve, ScanDark, Ensemble, Polaron };

inline const char* to_string(Command c) {
    switch (c) {
        case Command::Spectrum: return "spectrum";
        case Command::Rates: return "rates";
        case Command::Evolve: return "evolve";
        case Command::ScanDark: return "scan-dark";
        case Command::Ensemble: return "ensemble";
        default: return "polaron";
    }
}

struct EvolveBlock {
    std::vector<double> initial{0.0, 0.0, 1.0};
    double t_min_s = 1e-12;
    double t_max_s = 10.0;
    int points = 601;
};

struct ScanBlock {
    ScanAxis q01_axis{0.01, 0.15, 29};
    ScanAxis delta_axis{0.0, 200.0, 41};
    std::vector<double> q02_values_ev{0.0};
};

struct EnsembleBlock {
    EnsembleSpec spec;
    std::vector<double> ratios;
    std::vector<double> deltas_debye;
};

struct RunConfig {
    Command command = Command::Spectrum;
    DimerConfig dimer;
    BathSpec bath;
    std::string case_selection = "auto"; // auto|direct|indirect|mixed|numeric
    double dark_threshold = 1e-6;
    std::uint64_t master_seed = 1;
    int threads = 1;
    std::optional<EvolveBlock> evolve_block;
    std::optional<ScanBlock> scan_block;
    std::optional<EnsembleBlock> ensemble_block;
};

namespace config_detail {

[[noreturn]] inline void fail(const std::string& path, const std::string& what) {
    throw config_error("config error at " + path + ": " + what);
}

inline void check_keys(const json& obj, const std::string& path,
                       const std::set<std::string>& allowed) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) fail(path + "." + it.key(), "unknown key");
}

inline double get_number(const json& obj, const std::string& path, const std::string& key,
                         std::optional<double> fallback = std::nullopt) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        fail(path + "." + key, "missing required number");
    }
    if (!obj[key].is_number()) fail(path + "." + key, "expected a number");
    return obj[key].get<double>();
}

inline Vec3 get_vec3(const json& obj, const std::string& path, const std::string& key,
                     std::optional<Vec3> fallback = std::nullopt) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        fail(path + "." + key, "missing required 3-vector");
    }
    const json& v = obj[key];
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() ||
        !v[2].is_number())
        fail(path + "." + key, "expected an array of 3 numbers");
    return Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
}

inline Monomer parse_monomer(const json& obj, const std::string& path) {
    check_keys(obj, path,
               {"excitation_energy_ev", "transition_dipole_debye", "permanent_ground_debye",
                "permanent_excited_debye"});
    Monomer m;
    m.excitation_energy_ev = get_number(obj, path, "excitation_energy_ev");
    m.dipoles.mu = get_vec3(obj, path, "transition_dipole_debye", Vec3(Vec3::Zero()));
    m.dipoles.perm_ground = get_vec3(obj, path, "permanent_ground_debye", Vec3(Vec3::Zero()));
    m.dipoles.perm_excited = get_vec3(obj, path, "permanent_excited_debye", Vec3(Vec3::Zero()));
    if (!(m.excitation_energy_ev > 0.0)) fail(path + ".excitation_energy_ev", "must be > 0");
    return m;
}

inline DimerConfig parse_dimer(const json& obj, const std::string& path) {
    check_keys(obj, path,
               {"monomer1", "monomer2", "coupling_ev", "include_self_dipole",
                "lambda_override_ev"});
    if (!obj.contains("monomer1") || !obj.contains("monomer2"))
        fail(path, "monomer1 and monomer2 are required");
    DimerConfig cfg;
    cfg.monomer1 = parse_monomer(obj["monomer1"], path + ".monomer1");
    cfg.monomer2 = parse_monomer(obj["monomer2"], path + ".monomer2");
    if (obj.contains("coupling_ev")) {
        const json& q = obj["coupling_ev"];
        check_keys(q, path + ".coupling_ev", {"q00", "q11", "q22", "q01", "q02", "q12"});
        cfg.coupling.q00 = get_number(q, path + ".coupling_ev", "q00", 0.0);
        cfg.coupling.q11 = get_number(q, path + ".coupling_ev", "q11", 0.0);
        cfg.coupling.q22 = get_number(q, path + ".coupling_ev", "q22", 0.0);
        cfg.coupling.q01 = get_number(q, path + ".coupling_ev", "q01", 0.0);
        cfg.coupling.q02 = get_number(q, path + ".coupling_ev", "q02", 0.0);
        cfg.coupling.q12 = get_number(q, path + ".coupling_ev", "q12", 0.0);
    }
    if (obj.contains("include_self_dipole")) {
        if (!obj["include_self_dipole"].is_boolean())
            fail(path + ".include_self_dipole", "expected a boolean");
        cfg.include_self_dipole = obj["include_self_dipole"].get<bool>();
    }
    if (obj.contains("lambda_override_ev"))
        cfg.lambda_override_ev = get_number(obj, path, "lambda_override_ev");
    return cfg;
}

inline void parse_bath(const json& obj, const std::string& path, RunConfig& rc) {
    check_keys(obj, path,
               {"temperature_k", "cutoff_ev", "refractive_index", "coupling_strength"});
    rc.bath.temperature_k = get_number(obj, path, "temperature_k", 300.0);
    rc.bath.cutoff_ev = get_number(obj, path, "cutoff_ev", 10.0);
    const double n = get_number(obj, path, "refractive_index", 1.0);
    if (!(rc.bath.temperature_k >= 0.0)) fail(path + ".temperature_k", "must be >= 0");
    if (!(rc.bath.cutoff_ev > 0.0)) fail(path + ".cutoff_ev", "must be > 0");
    if (!(n > 0.0)) fail(path + ".refractive_index", "must be > 0");
    rc.dimer.cutoff_ev = rc.bath.cutoff_ev;
    rc.dimer.refractive_index = n;
    if (obj.contains("coupling_strength")) {
        const double s = get_number(obj, path, "coupling_strength");
        if (!(s >= 0.0)) fail(path + ".coupling_strength", "must be >= 0");
        rc.bath.coupling_strength = s;
        rc.dimer.coupling_strength = s;
    } else {
        rc.bath.coupling_strength = derived_coupling_strength(n, rc.bath.cutoff_ev);
        rc.dimer.coupling_strength = rc.bath.coupling_strength;
    }
}

} // namespace config_detail

inline RunConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("config is not valid JSON: ") + e.what());
    }
    using config_detail::check_keys;
    using config_detail::fail;
    using config_detail::get_number;
    check_keys(root, "$",
               {"command", "dimer", "bath", "case", "dark_threshold", "master_seed", "threads",
                "evolve", "scan_dark", "ensemble"});

    RunConfig rc;
    if (!root.contains("command") || !root["command"].is_string())
        fail("$.command", "missing required command string");
    const std::string cmd = root["command"].get<std::string>();
    if (cmd == "spectrum") rc.command = Command::Spectrum;
    else if (cmd == "rates") rc.command = Command::Rates;
    else if (cmd == "evolve") rc.command = Command::Evolve;
    else if (cmd == "scan-dark") rc.command = Command::ScanDark;
    else if (cmd == "ensemble") rc.command = Command::Ensemble;
    else if (cmd == "polaron") rc.command = Command::Polaron;
    else fail("$.command", "unknown command '" + cmd + "'");

    const bool needs_dimer = rc.command != Command::Ensemble;
    if (needs_dimer && !root.contains("dimer")) fail("$.dimer", "required for this command");
    if (root.contains("dimer")) rc.dimer = config_detail::parse_dimer(root["dimer"], "$.dimer");
    config_detail::parse_bath(root.contains("bath") ? root["bath"] : json::object(), "$.bath", rc);

    if (root.contains("case")) {
        if (!root["case"].is_string()) fail("$.case", "expected a string");
        rc.case_selection = root["case"].get<std::string>();
        static const std::set<std::string> valid{"auto", "direct", "indirect", "mixed", "numeric"};
        if (!valid.count(rc.case_selection))
            fail("$.case", "must be one of auto|direct|indirect|mixed|numeric");
    }
    rc.dark_threshold = get_number(root, "$", "dark_threshold", 1e-6);
    if (!(rc.dark_threshold > 0.0)) fail("$.dark_threshold", "must be > 0");
    if (root.contains("master_seed")) {
        if (!root["master_seed"].is_number_unsigned())
            fail("$.master_seed", "expected an unsigned integer");
        rc.master_seed = root["master_seed"].get<std::uint64_t>();
    }
    if (root.contains("threads")) {
        if (!root["threads"].is_number_integer()) fail("$.threads", "expected an integer");
        rc.threads = root["threads"].get<int>();
        if (rc.threads < 1) fail("$.threads", "must be >= 1");
    }

    // Exactly one experiment block, and it must match the command.
    const int block_count = int(root.contains("evolve")) + int(root.contains("scan_dark")) +
                            int(root.contains("ensemble"));
    if (block_count > 1) fail("$", "only one experiment block may be present");
    if (rc.command == Command::Evolve) {
        EvolveBlock eb;
        if (root.contains("evolve")) {
            const json& e = root["evolve"];
            check_keys(e, "$.evolve", {"initial", "t_min_s", "t_max_s", "points"});
            if (e.contains("initial")) {
                const json& ini = e["initial"];
                if (!ini.is_array() || ini.size() != 3) fail("$.evolve.initial", "expected 3 numbers");
                eb.initial = {ini[0].get<double>(), ini[1].get<double>(), ini[2].get<double>()};
            }
            eb.t_min_s = get_number(e, "$.evolve", "t_min_s", eb.t_min_s);
            eb.t_max_s = get_number(e, "$.evolve", "t_max_s", eb.t_max_s);
            if (e.contains("points")) {
                if (!e["points"].is_number_integer()) fail("$.evolve.points", "expected an integer");
                eb.points = e["points"].get<int>();
            }
        }
        rc.evolve_block = eb;
    } else if (root.contains("evolve")) {
        fail("$.evolve", "block does not match command '" + cmd + "'");
    }
    if (rc.command == Command::ScanDark) {
        ScanBlock sb;
        if (root.contains("scan_dark")) {
            const json& s = root["scan_dark"];
            check_keys(s, "$.scan_dark",
                       {"q01_min_ev", "q01_max_ev", "q01_steps", "delta_min_debye",
                        "delta_max_debye", "delta_steps", "q02_values_ev"});
            sb.q01_axis.min = get_number(s, "$.scan_dark", "q01_min_ev", sb.q01_axis.min);
            sb.q01_axis.max = get_number(s, "$.scan_dark", "q01_max_ev", sb.q01_axis.max);
            if (s.contains("q01_steps")) sb.q01_axis.steps = s["q01_steps"].get<int>();
            sb.delta_axis.min = get_number(s, "$.scan_dark", "delta_min_debye", sb.delta_axis.min);
            sb.delta_axis.max = get_number(s, "$.scan_dark", "delta_max_debye", sb.delta_axis.max);
            if (s.contains("delta_steps")) sb.delta_axis.steps = s["delta_steps"].get<int>();
            if (s.contains("q02_values_ev")) {
                sb.q02_values_ev.clear();
                for (const auto& q : s["q02_values_ev"]) sb.q02_values_ev.push_back(q.get<double>());
            }
        }
        rc.scan_block = sb;
    } else if (root.contains("scan_dark")) {
        fail("$.scan_dark", "block does not match command '" + cmd + "'");
    }
    if (rc.command == Command::Ensemble) {
        EnsembleBlock en;
        en.spec.master_seed = rc.master_seed;
        en.ratios = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.925, 0.95, 0.975, 1.0};
        en.deltas_debye = {0.0, 60.0, 75.0, 90.0};
        if (root.contains("ensemble")) {
            const json& e = root["ensemble"];
            check_keys(e, "$.ensemble",
                       {"epsilon_ev", "mu_debye", "splitting_ev", "sigma_ev", "samples", "ratios",
                        "deltas_debye"});
            en.spec.epsilon_ev = get_number(e, "$.ensemble", "epsilon_ev", en.spec.epsilon_ev);
            en.spec.mu_debye = get_number(e, "$.ensemble", "mu_debye", en.spec.mu_debye);
            en.spec.splitting_ev = get_number(e, "$.ensemble", "splitting_ev", en.spec.splitting_ev);
            en.spec.sigma_ev = get_number(e, "$.ensemble", "sigma_ev", en.spec.sigma_ev);
            if (e.contains("samples")) en.spec.samples = e["samples"].get<int>();
            if (e.contains("ratios")) {
                en.ratios.clear();
                for (const auto& r : e["ratios"]) en.ratios.push_back(r.get<double>());
            }
            if (e.contains("deltas_debye")) {
                en.deltas_debye.clear();
                for (const auto& d : e["deltas_debye"]) en.deltas_debye.push_back(d.get<double>());
            }
        }
        en.spec.validate();
        rc.ensemble_block = en;
    } else if (root.contains("ensemble")) {
        fail("$.ensemble", "block does not match command '" + cmd + "'");
    }

    if (needs_dimer) rc.dimer.validate();
    rc.bath.validate();
    return rc;
}

// Canonical serialisation of the fully resolved configuration: defaults
// applied, keys sorted. Echoed into every output header for provenance and
// used by the round-trip test.
inline json resolved_config_json(const RunConfig& rc) {
    json root;
    root["command"] = to_string(rc.command);
    auto mono = [](const Monomer& m) {
        json j;
        j["excitation_energy_ev"] = m.excitation_energy_ev;
        j["transition_dipole_debye"] = {m.dipoles.mu(0), m.dipoles.mu(1), m.dipoles.mu(2)};
        j["permanent_ground_debye"] = {m.dipoles.perm_ground(0), m.dipoles.perm_ground(1),
                                       m.dipoles.perm_ground(2)};
        j["permanent_excited_debye"] = {m.dipoles.perm_excited(0), m.dipoles.perm_excited(1),
                                        m.dipoles.perm_excited(2)};
        return j;
    };
    if (rc.command != Command::Ensemble) {
        json d;
        d["monomer1"] = mono(rc.dimer.monomer1);
        d["monomer2"] = mono(rc.dimer.monomer2);
        d["coupling_ev"] = {{"q00", rc.dimer.coupling.q00}, {"q11", rc.dimer.coupling.q11},
                            {"q22", rc.dimer.coupling.q22}, {"q01", rc.dimer.coupling.q01},
                            {"q02", rc.dimer.coupling.q02}, {"q12", rc.dimer.coupling.q12}};
        d["include_self_dipole"] = rc.dimer.include_self_dipole;
        if (rc.dimer.lambda_override_ev) d["lambda_override_ev"] = *rc.dimer.lambda_override_ev;
        root["dimer"] = d;
    }
    root["bath"] = {{"temperature_k", rc.bath.temperature_k},
                    {"cutoff_ev", rc.bath.cutoff_ev},
                    {"refractive_index", rc.dimer.refractive_index},
                    {"coupling_strength", rc.bath.coupling_strength}};
    // threads is an execution detail and deliberately not echoed: outputs
    // must be byte-identical under any thread count.
    root["case"] = rc.case_selection;
    root["dark_threshold"] = rc.dark_threshold;
    root["master_seed"] = rc.master_seed;
    if (rc.evolve_block) {
        const EvolveBlock& e = *rc.evolve_block;
        root["evolve"] = {{"initial", e.initial},
                          {"t_min_s", e.t_min_s},
                          {"t_max_s", e.t_max_s},
                          {"points", e.points}};
    }
    if (rc.scan_block) {
        const ScanBlock& s = *rc.scan_block;
        root["scan_dark"] = {{"q01_min_ev", s.q01_axis.min},   {"q01_max_ev", s.q01_axis.max},
                             {"q01_steps", s.q01_axis.steps},  {"delta_min_debye", s.delta_axis.min},
                             {"delta_max_debye", s.delta_axis.max},
                             {"delta_steps", s.delta_axis.steps},
                             {"q02_values_ev", s.q02_values_ev}};
    }
    if (rc.ensemble_block) {
        const EnsembleBlock& e = *rc.ensemble_block;
        root["ensemble"] = {{"epsilon_ev", e.spec.epsilon_ev},
                            {"mu_debye", e.spec.mu_debye},
                            {"splitting_ev", e.spec.splitting_ev},
                            {"sigma_ev", e.spec.sigma_ev},
                            {"samples", e.spec.samples},
                            {"ratios", e.ratios},
                            {"deltas_debye", e.deltas_debye}};
    }
    return root;
}

} // namespace dimersim
