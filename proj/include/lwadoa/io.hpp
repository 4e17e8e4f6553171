#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lwadoa/bench.hpp"

namespace lwadoa {

/// Ordered `key = value` config. Lines starting with '#' are comments.
/// Parse errors and missing keys are reported with line/key context.
class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig parse_file(const std::string& path);
    static KeyValueConfig parse_text(const std::string& text, const std::string& origin);

    bool has(const std::string& key) const;
    void set(const std::string& key, const std::string& value);

    const std::string& require(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    double require_double(const std::string& key) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_double_list(const std::string& key) const;
    std::vector<std::string> get_string_list(const std::string& key) const;

    /// Loss-free echo; parsing the dump reproduces this config.
    std::string dump() const;

    const std::vector<std::pair<std::string, std::string>>& entries() const {
        return entries_;
    }

private:
    std::vector<std::pair<std::string, std::string>> entries_;  // insertion order
    std::map<std::string, std::size_t> index_;
};

std::string format_angle(double deg);     // 1e-4 degree precision
std::string format_runtime(double secs);
std::string format_exact(double v);       // round-trips a double exactly

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// rmse.csv, runtime.csv, trials.csv in the given directory; returns the
/// file paths in emission order.
std::vector<std::string> emit_bench_csvs(const BenchResult& result,
                                         const std::string& out_dir);

void write_snapshots_csv(const SnapshotMatrix& y, const std::string& path);
SnapshotMatrix read_snapshots_csv(const std::string& path);

struct RunManifest {
    std::string tool_version;
    std::string command;
    std::uint64_t master_seed = 0;
    std::string started_utc;
    std::string finished_utc;
    std::vector<std::string> outputs;
    KeyValueConfig resolved_config;
};

void write_manifest(const RunManifest& manifest, const std::string& path);

}  // namespace lwadoa
