#include "fhc/run_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace fhc::io {

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return RunConfig(std::move(j));
}

void RunConfig::merge(const json& overrides) {
    for (auto it = overrides.begin(); it != overrides.end(); ++it) data_[it.key()] = it.value();
}

void RunConfig::validate(const std::vector<std::string>& allowed,
                         const std::vector<std::string>& required) const {
    for (auto it = data_.begin(); it != data_.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw ConfigError("unknown config key '" + it.key() + "'");
    }
    for (const auto& key : required) {
        if (!data_.contains(key)) throw ConfigError("missing required config key '" + key + "'");
    }
}

std::uint64_t RunConfig::hash() const {
    const std::string s = canonical();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

struct CsvWriter::Impl {
    std::ofstream os;
    std::size_t columns;
};

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns)
    : impl_(new Impl) {
    impl_->os.open(path, std::ios::binary);   // '\n' endings on every platform
    if (!impl_->os) {
        delete impl_;
        throw std::runtime_error("CsvWriter: cannot open " + path);
    }
    impl_->columns = columns.size();
    for (std::size_t i = 0; i < columns.size(); ++i)
        impl_->os << columns[i] << (i + 1 < columns.size() ? "," : "");
    impl_->os << '\n';
}

CsvWriter::~CsvWriter() { delete impl_; }

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void CsvWriter::row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i)
        impl_->os << format_double(values[i]) << (i + 1 < values.size() ? "," : "");
    impl_->os << '\n';
}

void CsvWriter::row_mixed(const std::vector<std::string>& values) {
    for (std::size_t i = 0; i < values.size(); ++i)
        impl_->os << values[i] << (i + 1 < values.size() ? "," : "");
    impl_->os << '\n';
}

void ensure_directory(const std::string& path) {
    std::filesystem::create_directories(path);
}

void write_run_metadata(const std::string& out_dir, const RunConfig& config,
                        const std::string& command) {
    json meta;
    meta["command"] = command;
    meta["config"] = config.raw();
    meta["config_hash"] = config.hash();
    meta["tool_version"] = kToolVersion;
    std::ofstream os(out_dir + "/run.json", std::ios::binary);
    if (!os) throw std::runtime_error("cannot write run.json in " + out_dir);
    os << meta.dump(2) << '\n';
}

}  // namespace fhc::io
