#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "dimersim/cli.hpp"

using namespace dimersim;
using Catch::Approx;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string config_file(const char* name) {
    return (std::filesystem::path(DIMERSIM_CONFIG_DIR) / name).string();
}

std::filesystem::path fresh_out_dir(const char* tag) {
    const auto dir = std::filesystem::temp_directory_path() / (std::string("dimersim_") + tag);
    std::filesystem::remove_all(dir);
    return dir;
}

// Data rows of a CSV artifact (skips comment lines and the column header).
std::vector<std::vector<double>> data_rows(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

} // namespace

TEST_CASE("config parsing") {
    SECTION("minimal config resolves documented defaults") {
        const RunConfig rc = parse_config(R"({
            "command": "spectrum",
            "dimer": {
                "monomer1": {"excitation_energy_ev": 2.5},
                "monomer2": {"excitation_energy_ev": 2.8}
            }
        })");
        CHECK(rc.bath.temperature_k == 300.0);
        CHECK(rc.bath.cutoff_ev == 10.0);
        CHECK(rc.dimer.refractive_index == 1.0);
        CHECK(rc.dark_threshold == 1e-6);
        CHECK(rc.bath.coupling_strength == Approx(1.29285651297995e-9).epsilon(1e-10));
        const json echoed = resolved_config_json(rc);
        CHECK(echoed["bath"]["temperature_k"] == 300.0);
        CHECK(echoed["dark_threshold"] == 1e-6);
    }
    SECTION("negative temperature rejected with its key path") {
        try {
            parse_config(R"({
                "command": "spectrum",
                "dimer": {
                    "monomer1": {"excitation_energy_ev": 2.5},
                    "monomer2": {"excitation_energy_ev": 2.8}
                },
                "bath": {"temperature_k": -5.0}
            })");
            FAIL("expected config_error");
        } catch (const config_error& e) {
            CHECK(std::string(e.what()).find("temperature_k") != std::string::npos);
        }
    }
    SECTION("unknown keys rejected with their path") {
        try {
            parse_config(R"({"command": "spectrum", "dimer": {
                "monomer1": {"excitation_energy_ev": 2.5, "dipole": [1,0,0]},
                "monomer2": {"excitation_energy_ev": 2.8}}})");
            FAIL("expected config_error");
        } catch (const config_error& e) {
            CHECK(std::string(e.what()).find("monomer1.dipole") != std::string::npos);
        }
    }
    SECTION("mismatched experiment block rejected") {
        CHECK_THROWS_AS(parse_config(R"({
            "command": "spectrum",
            "dimer": {
                "monomer1": {"excitation_energy_ev": 2.5},
                "monomer2": {"excitation_energy_ev": 2.8}
            },
            "evolve": {}
        })"),
                        config_error);
    }
    SECTION("shipped population config parses and round-trips") {
        const RunConfig rc = parse_config(slurp(config_file("fig3_population.json")));
        CHECK(rc.command == Command::Evolve);
        CHECK(rc.dimer.coupling.q12 == 0.15);
        REQUIRE(rc.evolve_block.has_value());
        const std::string once = resolved_config_json(rc).dump();
        const RunConfig rc2 = parse_config(once);
        CHECK(resolved_config_json(rc2).dump() == once);
    }
    SECTION("every shipped config parses") {
        for (const char* name : {"fig3_population.json", "fig4_darkscan.json",
                                 "fig5_ensemble.json", "spectrum_example.json",
                                 "polaron_example.json"})
            CHECK_NOTHROW(parse_config(slurp(config_file(name))));
    }
}

TEST_CASE("command dispatch") {
    SECTION("spectrum of an uncoupled dimer echoes the site energies") {
        const RunConfig rc = parse_config(R"({
            "command": "spectrum",
            "dimer": {
                "monomer1": {"excitation_energy_ev": 2.5, "transition_dipole_debye": [10,0,0]},
                "monomer2": {"excitation_energy_ev": 2.8}
            }
        })");
        const auto dir = fresh_out_dir("spectrum");
        const std::string path = run(rc, dir.string());
        const auto rows = data_rows(slurp(path));
        REQUIRE(rows.size() == 6u);
        // rows are (a, b, e_a, e_b, omega, dsq); diagonal entries a == b
        CHECK(rows[0][2] == 0.0);
        CHECK(rows[3][2] == 2.5);
        CHECK(rows[5][2] == 2.8);
        std::filesystem::remove_all(dir);
    }
    SECTION("evolve artifact ends at the thermal state") {
        const RunConfig rc = parse_config(slurp(config_file("fig3_population.json")));
        const auto dir = fresh_out_dir("evolve");
        const std::string path = run(rc, dir.string());
        const auto rows = data_rows(slurp(path));
        REQUIRE(rows.size() == 601u);
        const auto& last = rows.back();
        CHECK(last[1] == Approx(1.0).margin(1e-6)); // ground population
        CHECK(last[2] + last[3] < 1e-6);
        for (const auto& row : rows)
            CHECK(row[1] + row[2] + row[3] == Approx(1.0).margin(1e-9));
        std::filesystem::remove_all(dir);
    }
    SECTION("rates artifact for the same system") {
        const RunConfig rc = parse_config(R"({
            "command": "rates",
            "case": "direct",
            "dimer": {
                "monomer1": {"excitation_energy_ev": 2.65, "transition_dipole_debye": [10,0,0],
                              "permanent_excited_debye": [30,0,0]},
                "monomer2": {"excitation_energy_ev": 2.65, "transition_dipole_debye": [10,0,0],
                              "permanent_excited_debye": [-30,0,0]},
                "coupling_ev": {"q12": 0.15}
            }
        })");
        const auto dir = fresh_out_dir("rates");
        const auto rows = data_rows(slurp(run(rc, dir.string())));
        REQUIRE(rows.size() == 6u);
        double r10 = -1.0;
        for (const auto& row : rows)
            if (row[0] == 1 && row[1] == 0) r10 = row[3];
        CHECK(r10 == 0.0); // dark state
        std::filesystem::remove_all(dir);
    }
    SECTION("ensemble artifacts are byte-identical for equal seeds") {
        RunConfig rc = parse_config(R"({
            "command": "ensemble",
            "ensemble": {"samples": 60, "ratios": [0.0, 0.5, 1.0], "deltas_debye": [0.0, 70.0]},
            "master_seed": 42
        })");
        const auto dir1 = fresh_out_dir("ens1");
        const auto dir2 = fresh_out_dir("ens2");
        rc.threads = 1;
        const std::string p1 = run(rc, dir1.string());
        rc.threads = 5;
        const std::string p2 = run(rc, dir2.string());
        CHECK(slurp(p1) == slurp(p2));
        std::filesystem::remove_all(dir1);
        std::filesystem::remove_all(dir2);
    }
    SECTION("polaron artifact keeps dark transitions dark") {
        const RunConfig rc = parse_config(slurp(config_file("polaron_example.json")));
        const auto dir = fresh_out_dir("polaron");
        const auto rows = data_rows(slurp(run(rc, dir.string())));
        REQUIRE(rows.size() == 6u);
        for (const auto& row : rows) {
            if ((row[0] == 0 && row[1] == 1) || (row[0] == 1 && row[1] == 0)) {
                CHECK(row[4] == 0.0); // uncorrected
                CHECK(row[5] == 0.0); // corrected
                CHECK(row[6] == 0.0); // full
            }
        }
        std::filesystem::remove_all(dir);
    }
    SECTION("scan artifact row count matches the grid") {
        RunConfig rc = parse_config(slurp(config_file("fig4_darkscan.json")));
        rc.scan_block->q01_axis.steps = 5;
        rc.scan_block->delta_axis.steps = 7;
        rc.scan_block->q02_values_ev = {0.0, 0.05};
        const auto dir = fresh_out_dir("scan");
        const auto rows = data_rows(slurp(run(rc, dir.string())));
        CHECK(rows.size() == 5u * 7u * 2u);
        std::filesystem::remove_all(dir);
    }
}
