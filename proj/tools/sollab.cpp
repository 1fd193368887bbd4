#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sollab/io.hpp"
#include "sollab/scenario.hpp"

namespace sc = sollab::scenario;

namespace {

// Exit codes: 0 success, 1 module error, 2 invalid configuration.
int report_config_error(const sc::ConfigError& e) {
    nlohmann::json j{{"error", {{"type", "config"}, {"path", e.path()}, {"message", e.what()}}}};
    std::cerr << j.dump(2) << '\n';
    return 2;
}

sc::ScenarioConfig load(const std::string& path, long long seed, int workers) {
    sc::ScenarioConfig c = sc::load_config(path);
    if (seed >= 0) c.seed = static_cast<unsigned long>(seed);
    if (workers > 0) c.workers = workers;
    return c;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sollab: numerical lab for the radial energy-critical wave equation in 6D"};
    app.set_version_flag("--version", sollab::io::software_version());
    app.require_subcommand(1);

    std::string config, out;
    long long seed = -1;
    int workers = 0;

    auto* run = app.add_subcommand("run", "run a scenario and write its artifact directory");
    run->add_option("--config", config, "scenario JSON document")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out, "output directory (default: $SOLLAB_OUTPUT_ROOT/<kind>-seed<N>)");
    run->add_option("--seed", seed, "override the config seed")->check(CLI::NonNegativeNumber);
    run->add_option("--workers", workers, "worker threads for batteries")->check(CLI::PositiveNumber);

    auto* validate = app.add_subcommand("validate", "validate a scenario and print the resolved config");
    validate->add_option("--config", config, "scenario JSON document")->required()->check(CLI::ExistingFile);
    validate->add_option("--seed", seed, "override the config seed")->check(CLI::NonNegativeNumber);
    validate->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);

    auto* list = app.add_subcommand("list-scenarios", "list scenario kinds with their default parameters");
    bool with_defaults = false;
    list->add_flag("--defaults", with_defaults, "print default parameters as JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*list) {
            for (const auto& k : sc::kinds()) {
                std::cout << k.name << "\n    " << k.description << "\n    outputs:";
                for (const auto& o : k.outputs) std::cout << ' ' << o;
                std::cout << '\n';
                if (with_defaults) std::cout << "    defaults: " << sc::default_params(k.name).dump() << '\n';
            }
            return 0;
        }
        const sc::ScenarioConfig c = load(config, seed, workers);
        if (*validate) {
            std::cout << nlohmann::json{{"valid", true}, {"config", c.to_json()}}.dump(2) << '\n';
            return 0;
        }
        const auto res = out.empty() ? sc::run(c) : sc::run(c, out);
        std::cout << "output: " << res.directory.string() << '\n';
        if (res.status != 0) {
            std::cerr << nlohmann::json{{"error", {{"type", "run"}, {"kind", c.kind}, {"message", res.error}}}}.dump(2)
                      << '\n';
            return 1;
        }
        std::cout << res.summary.dump(2) << '\n';
        return 0;
    } catch (const sc::ConfigError& e) {
        return report_config_error(e);
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"error", {{"type", "internal"}, {"message", e.what()}}}}.dump(2) << '\n';
        return 1;
    }
}
