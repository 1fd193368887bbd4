#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace sollab::scenario {

// A semantic or schema error tied to a JSON pointer into the config.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string path, const std::string& message)
        : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

struct KindInfo {
    std::string name;
    std::string description;
    std::vector<std::string> outputs; // files written besides manifest.json and summary.txt
};
const std::vector<KindInfo>& kinds();

// Document layout: {"kind": ..., "seed": N, "workers": N, "output": DIR, "params": {...}}.
struct ScenarioConfig {
    std::string kind;
    unsigned long seed = 1;
    int workers = 1;
    std::string output;        // empty: output root / <kind>-seed<N>
    nlohmann::json params;     // resolved, defaults filled in

    nlohmann::json to_json() const;
};

nlohmann::json default_params(const std::string& kind);

// Full schema and invariant validation; throws ConfigError.
ScenarioConfig parse_config(const nlohmann::json& doc);
// Parse errors are reported as ConfigError with path "" and the parser position.
ScenarioConfig load_config(const std::filesystem::path& file);

// $SOLLAB_OUTPUT_ROOT or "runs".
std::filesystem::path output_root();
std::filesystem::path output_dir(const ScenarioConfig& c);

struct RunResult {
    int status = 0;                  // 0 success, 1 module error
    std::filesystem::path directory;
    nlohmann::json summary;
    std::string error;
};

// Writes manifest.json, summary.txt and the kind's outputs into dir; on a
// module error writes error.json and returns status 1.
RunResult run(const ScenarioConfig& c, const std::filesystem::path& dir);
inline RunResult run(const ScenarioConfig& c) { return run(c, output_dir(c)); }

} // namespace sollab::scenario
