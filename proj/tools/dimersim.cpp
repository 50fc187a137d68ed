#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dimersim/cli.hpp"

namespace {

int fail(dimersim::ExitCode code, const char* category, const std::string& message) {
    nlohmann::json err;
    err["category"] = category;
    err["message"] = message;
    std::cerr << "error: " << err.dump() << std::endl;
    return static_cast<int>(code);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dimersim: optical rates, dark states and disorder ensembles "
                 "for molecular dimers with permanent dipoles"};
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_given = false;
    int threads = 0;
    double lambda_override = 0.0;
    bool lambda_given = false;

    app.add_option("--config", config_path, "Path to a JSON run configuration")->required();
    app.add_option("--out", out_dir, "Output directory for CSV artifacts");
    app.add_option("--seed", seed, "Master seed override")->each([&](std::string) { seed_given = true; });
    app.add_option("--threads", threads, "Worker threads for ensembles");
    app.add_option("--lambda-override", lambda_override, "Self-dipole strength override in eV")
        ->each([&](std::string) { lambda_given = true; });

    CLI11_PARSE(app, argc, argv);

    std::string text;
    {
        std::ifstream in(config_path);
        if (!in) return fail(dimersim::ExitCode::Config, "config",
                             "cannot read config file: " + config_path);
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }

    try {
        dimersim::RunConfig rc = dimersim::parse_config(text);
        if (seed_given) {
            rc.master_seed = seed;
            if (rc.ensemble_block) rc.ensemble_block->spec.master_seed = seed;
        }
        if (threads > 0) rc.threads = threads;
        if (lambda_given) rc.dimer.lambda_override_ev = lambda_override;
        const std::string path = dimersim::run(rc, out_dir);
        std::cout << path << std::endl;
        return 0;
    } catch (const dimersim::config_error& e) {
        return fail(dimersim::ExitCode::Config, "config", e.what());
    } catch (const dimersim::secular_error& e) {
        return fail(dimersim::ExitCode::Secular, "secular", e.what());
    } catch (const dimersim::numeric_error& e) {
        return fail(dimersim::ExitCode::Numeric, "numeric", e.what());
    } catch (const std::exception& e) {
        return fail(dimersim::ExitCode::Numeric, "numeric", e.what());
    }
}
