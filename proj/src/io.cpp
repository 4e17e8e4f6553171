#include "lwadoa/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace lwadoa {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    if (!s.empty() && s.back() == sep) out.push_back("");
    return out;
}

std::string printf_format(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), path);
}

KeyValueConfig KeyValueConfig::parse_text(const std::string& text,
                                          const std::string& origin) {
    KeyValueConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": expected 'key = value', got '" + t + "'");
        const std::string key = trim(t.substr(0, eq));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        cfg.set(key, trim(t.substr(eq + 1)));
    }
    return cfg;
}

bool KeyValueConfig::has(const std::string& key) const {
    return index_.count(key) > 0;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
    auto it = index_.find(key);
    if (it != index_.end()) {
        entries_[it->second].second = value;
    } else {
        index_[key] = entries_.size();
        entries_.emplace_back(key, value);
    }
}

const std::string& KeyValueConfig::require(const std::string& key) const {
    auto it = index_.find(key);
    if (it == index_.end()) throw ConfigError("missing config key '" + key + "'");
    return entries_[it->second].second;
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
    return has(key) ? require(key) : fallback;
}

double KeyValueConfig::require_double(const std::string& key) const {
    const std::string& v = require(key);
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected number, got '" + v + "'");
    }
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    return has(key) ? require_double(key) : fallback;
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    const double d = require_double(key);
    const int i = static_cast<int>(d);
    if (static_cast<double>(i) != d)
        throw ConfigError("config key '" + key + "': expected integer");
    return i;
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key,
                                      std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const std::string& v = require(key);
    try {
        return std::stoull(v);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected unsigned integer, got '" + v + "'");
    }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string& v = require(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config key '" + key + "': expected boolean, got '" + v + "'");
}

std::vector<double> KeyValueConfig::get_double_list(const std::string& key) const {
    std::vector<double> out;
    for (const std::string& item : split(require(key), ',')) {
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "': bad list item '" + item + "'");
        }
    }
    return out;
}

std::vector<std::string> KeyValueConfig::get_string_list(const std::string& key) const {
    std::vector<std::string> out;
    for (const std::string& item : split(require(key), ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::string KeyValueConfig::dump() const {
    std::string out;
    for (const auto& [k, v] : entries_) {
        out += k;
        out += " = ";
        out += v;
        out += "\n";
    }
    return out;
}

std::string format_angle(double deg) { return printf_format("%.4f", deg); }
std::string format_runtime(double secs) { return printf_format("%.9f", secs); }
std::string format_exact(double v) { return printf_format("%.17g", v); }

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw IoError("write failed for '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> emit_bench_csvs(const BenchResult& result,
                                         const std::string& out_dir) {
    const std::string rmse_path = out_dir + "/rmse.csv";
    const std::string runtime_path = out_dir + "/runtime.csv";
    const std::string trials_path = out_dir + "/trials.csv";

    std::string rmse_csv = "method,snr_db,rmse_deg,failures\n";
    std::string runtime_csv = "method,snr_db,mean_runtime_s\n";
    for (const BenchCell& c : result.cells) {
        rmse_csv += c.method + "," + format_angle(c.snr_db) + "," +
                    format_angle(c.rmse_deg) + "," + std::to_string(c.failures) + "\n";
        runtime_csv += c.method + "," + format_angle(c.snr_db) + "," +
                       format_runtime(c.mean_runtime_s) + "\n";
    }

    std::string trials_csv = "method,snr_db,trial";
    for (int k = 1; k <= result.k; ++k) trials_csv += ",err_" + std::to_string(k);
    trials_csv += ",runtime_s\n";
    for (const TrialRecord& r : result.trials) {
        trials_csv += r.method + "," + format_angle(r.snr_db) + "," + std::to_string(r.trial);
        for (double e : r.errors_deg) trials_csv += "," + format_angle(e);
        trials_csv += "," + format_runtime(r.runtime_s) + "\n";
    }

    write_text_file(rmse_path, rmse_csv);
    write_text_file(runtime_path, runtime_csv);
    write_text_file(trials_path, trials_csv);
    return {rmse_path, runtime_path, trials_path};
}

void write_snapshots_csv(const SnapshotMatrix& y, const std::string& path) {
    std::string csv = "freq_index,snapshot_index,re,im\n";
    for (int i = 0; i < y.rows(); ++i)
        for (int j = 0; j < y.snapshots(); ++j)
            csv += std::to_string(i) + "," + std::to_string(j) + "," +
                   format_exact(y.data(i, j).real()) + "," +
                   format_exact(y.data(i, j).imag()) + "\n";
    write_text_file(path, csv);
}

SnapshotMatrix read_snapshots_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty snapshot file '" + path + "'");

    struct Entry {
        int i, j;
        double re, im;
    };
    std::vector<Entry> entries;
    int max_i = -1, max_j = -1;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto cols = split(line, ',');
        if (cols.size() != 4)
            throw IoError(path + ":" + std::to_string(lineno) + ": expected 4 columns");
        Entry e{};
        try {
            e.i = std::stoi(cols[0]);
            e.j = std::stoi(cols[1]);
            e.re = std::stod(cols[2]);
            e.im = std::stod(cols[3]);
        } catch (const std::exception&) {
            throw IoError(path + ":" + std::to_string(lineno) + ": bad number");
        }
        max_i = std::max(max_i, e.i);
        max_j = std::max(max_j, e.j);
        entries.push_back(e);
    }
    if (max_i < 0 || max_j < 0) throw IoError("no data rows in '" + path + "'");
    SnapshotMatrix y;
    y.data = MatC::Zero(max_i + 1, max_j + 1);
    for (const Entry& e : entries) y.data(e.i, e.j) = Cplx(e.re, e.im);
    return y;
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
    std::string out;
    out += "version = " + manifest.tool_version + "\n";
    out += "command = " + manifest.command + "\n";
    out += "master_seed = " + std::to_string(manifest.master_seed) + "\n";
    out += "started_utc = " + manifest.started_utc + "\n";
    out += "finished_utc = " + manifest.finished_utc + "\n";
    std::string files;
    for (const std::string& f : manifest.outputs) {
        if (!files.empty()) files += ",";
        files += f;
    }
    out += "outputs = " + files + "\n";
    out += "# resolved configuration\n";
    for (const auto& [k, v] : manifest.resolved_config.entries())
        out += "config." + k + " = " + v + "\n";
    write_text_file(path, out);
}

}  // namespace lwadoa
