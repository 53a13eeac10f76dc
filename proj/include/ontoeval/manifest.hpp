#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ontoeval {

inline constexpr const char* kToolVersion = "0.1.0";

std::string sha256_hex(std::string_view data);
/// Throws ConfigError when the file cannot be read.
std::string sha256_file(const std::string& path);

std::string utc_now();

/// Reproducibility record for one command invocation.
struct RunManifest {
    std::string command;
    std::vector<std::string> arguments;
    std::map<std::string, std::string> inputs;   // path -> sha256
    std::map<std::string, std::string> outputs;  // path -> sha256
    std::optional<std::uint64_t> seed;
    nlohmann::json config = nlohmann::json::object();
    std::string version = kToolVersion;
    std::string started_at;
    std::string finished_at;

    void add_input(const std::string& path) { inputs[path] = sha256_file(path); }
    void add_output(const std::string& path) { outputs[path] = sha256_file(path); }
};

nlohmann::json to_json(const RunManifest& m);

/// Writes `data` to `path` through a temporary file and rename.
void write_file_atomic(const std::string& path, std::string_view data);
std::string read_file(const std::string& path);

} // namespace ontoeval
