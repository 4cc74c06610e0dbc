#pragma once

#include <cstdint>
#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace fhc::io {

using json = nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Key-value run configuration: defaults < config file < command-line overrides.
/// Keys are validated against the schema of the subcommand; unknown keys reject.
class RunConfig {
public:
    RunConfig() : data_(json::object()) {}
    explicit RunConfig(json j) : data_(std::move(j)) {
        if (!data_.is_object()) throw ConfigError("config root must be a JSON object");
    }

    static RunConfig from_file(const std::string& path);

    void merge(const json& overrides);   // later wins
    void validate(const std::vector<std::string>& allowed,
                  const std::vector<std::string>& required) const;

    bool has(const std::string& key) const { return data_.contains(key); }

    template <class T>
    T get(const std::string& key, const T& fallback) const {
        if (!data_.contains(key)) return fallback;
        try {
            return data_.at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError("config key '" + key + "' has the wrong type");
        }
    }

    template <class T>
    T require(const std::string& key) const {
        if (!data_.contains(key)) throw ConfigError("missing required config key '" + key + "'");
        try {
            return data_.at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError("config key '" + key + "' has the wrong type");
        }
    }

    const json& raw() const { return data_; }
    std::string canonical() const { return data_.dump(); }
    std::uint64_t hash() const;   // FNV-1a of the canonical dump

private:
    json data_;
};

/// Deterministic CSV writer: fixed header, %.17g floats, '\n' line ends.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns);
    ~CsvWriter();
    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& values);

private:
    struct Impl;
    Impl* impl_;
};

std::string format_double(double v);

/// Writes <out_dir>/run.json: resolved config, config hash, tool version, seed.
void write_run_metadata(const std::string& out_dir, const RunConfig& config,
                        const std::string& command);

void ensure_directory(const std::string& path);

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace fhc::io
