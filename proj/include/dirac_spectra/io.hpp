#pragma once

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"

namespace dirac_spectra {

inline constexpr const char* tool_version = "dirac_spectra 1.0.0";

/// Shortest round-trip decimal form of a double (17 significant digits).
inline std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string format_reals(const std::vector<double>& xs, char sep = ',') {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += sep;
        s += format_real(xs[i]);
    }
    return s;
}

inline std::vector<double> parse_reals(const std::string& text, char sep = ',') {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw DomainError("not a number: '" + item + "'");
        }
        while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
        if (used != item.size()) throw DomainError("not a number: '" + item + "'");
        out.push_back(v);
    }
    return out;
}

/// Run configuration as ordered key=value pairs. Keys are kept sorted so the
/// serialized form, and everything derived from it, is canonical.
class RunConfig {
public:
    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    void set(const std::string& key, double value) { values_[key] = format_real(value); }
    void set(const std::string& key, const std::vector<double>& v) { values_[key] = format_reals(v); }

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::string& get(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end()) throw DomainError("missing config key: " + key);
        return it->second;
    }
    double real(const std::string& key) const {
        const auto v = parse_reals(get(key));
        if (v.size() != 1) throw DomainError("config key " + key + " is not a single number");
        return v[0];
    }
    std::vector<double> reals(const std::string& key) const { return parse_reals(get(key)); }

    std::string to_text() const {
        std::string s;
        for (const auto& [k, v] : values_) s += k + "=" + v + "\n";
        return s;
    }
    static RunConfig from_text(const std::string& text) {
        RunConfig c;
        std::stringstream ss(text);
        std::string line;
        while (std::getline(ss, line)) {
            if (line.empty() || line[0] == '#') continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw DomainError("malformed config line: " + line);
            c.values_[line.substr(0, eq)] = line.substr(eq + 1);
        }
        return c;
    }
    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

/// FNV-1a, 64 bit.
inline std::uint64_t content_hash(const std::string& data) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// CSV text with a '#'-prefixed header block (tool version, config,
/// tolerances) followed by the column names and the rows.
class CsvTable {
public:
    CsvTable(std::vector<std::string> columns, const RunConfig& config) : columns_(std::move(columns)) {
        header_ = "# " + std::string(tool_version) + "\n";
        for (const auto& [k, v] : config.entries()) header_ += "# " + k + "=" + v + "\n";
    }
    void add_row(const std::vector<double>& row) { rows_.push_back(format_reals(row)); }
    std::string text() const {
        std::string s = header_;
        for (std::size_t i = 0; i < columns_.size(); ++i) s += (i ? "," : "") + columns_[i];
        s += "\n";
        for (const auto& r : rows_) s += r + "\n";
        return s;
    }
    std::size_t rows() const { return rows_.size(); }

private:
    std::vector<std::string> columns_;
    std::string header_;
    std::vector<std::string> rows_;
};

/// Writes through a temporary file in the same directory and renames it into
/// place, so readers never observe a partial file.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    if (!dir.empty() && !fs::exists(dir)) fs::create_directories(dir);
    fs::path tmp = path;
    tmp += ".tmp" + hash_hex(content_hash(path.string() + content)).substr(0, 8);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Output cache keyed by a content hash of (subcommand, config). The
/// directory comes from DIRAC_SPECTRA_CACHE, else from an explicit setting;
/// with neither, caching is off.
class ResultCache {
public:
    explicit ResultCache(std::optional<std::filesystem::path> dir = std::nullopt) {
        if (const char* env = std::getenv("DIRAC_SPECTRA_CACHE"); env && *env)
            dir_ = std::filesystem::path(env);
        else
            dir_ = std::move(dir);
    }
    bool enabled() const { return dir_.has_value(); }
    const std::optional<std::filesystem::path>& directory() const { return dir_; }

    static std::string key(const std::string& subcommand, const RunConfig& config) {
        return hash_hex(content_hash(subcommand + "\n" + config.to_text()));
    }
    std::optional<std::string> load(const std::string& key, const std::string& suffix) const {
        if (!dir_) return std::nullopt;
        const auto p = *dir_ / (key + suffix);
        if (!std::filesystem::exists(p)) return std::nullopt;
        return read_file(p);
    }
    void store(const std::string& key, const std::string& suffix, const std::string& content) const {
        if (dir_) write_atomic(*dir_ / (key + suffix), content);
    }

private:
    std::optional<std::filesystem::path> dir_;
};

}  // namespace dirac_spectra
