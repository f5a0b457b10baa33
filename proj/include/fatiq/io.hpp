#pragma once

// Text formats: CSV with 17-significant-digit floats, a sectioned
// key = value config file, severity-sequence and cell-partition CSVs.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "errors.hpp"
#include "specimen.hpp"
#include "structure.hpp"

namespace fatiq::io {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Comma-separated writer; doubles are printed with %.17g.
class CsvWriter {
public:
    CsvWriter(std::ostream& os, const std::vector<std::string>& header) : os_(os), columns_(header.size()) {
        write_fields(header);
    }

    template <class... Fields>
    void row(const Fields&... fields) {
        static_assert(sizeof...(Fields) > 0);
        std::vector<std::string> out;
        out.reserve(sizeof...(Fields));
        (out.push_back(to_field(fields)), ...);
        write_fields(out);
    }

    void row(const std::vector<double>& values) {
        std::vector<std::string> out;
        out.reserve(values.size());
        for (double v : values) out.push_back(format_double(v));
        write_fields(out);
    }

private:
    static std::string to_field(double v) { return format_double(v); }
    static std::string to_field(int v) { return std::to_string(v); }
    static std::string to_field(long v) { return std::to_string(v); }
    static std::string to_field(long long v) { return std::to_string(v); }
    static std::string to_field(unsigned v) { return std::to_string(v); }
    static std::string to_field(unsigned long v) { return std::to_string(v); }
    static std::string to_field(unsigned long long v) { return std::to_string(v); }
    static std::string to_field(const std::string& v) { return v; }
    static std::string to_field(const char* v) { return v; }

    void write_fields(const std::vector<std::string>& fields) {
        if (fields.size() != columns_) throw std::logic_error("CSV row width does not match the header");
        for (std::size_t i = 0; i < fields.size(); ++i) os_ << (i ? "," : "") << fields[i];
        os_ << '\n';
    }

    std::ostream& os_;
    std::size_t columns_;
};

/// Malformed or invalid configuration; `line` is 0 when not tied to a line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& source, std::size_t line, const std::string& msg)
        : std::runtime_error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + msg),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

namespace detail {

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

inline std::optional<double> parse_double(const std::string& s) {
    if (s.empty()) return std::nullopt;
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) return std::nullopt;
        return v;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

}  // namespace detail

/// Sectioned key = value file:
///
///     # comment
///     [specimen]
///     m = 1.5
///
/// Keys are unique per section. Typed getters report the defining line on
/// conversion or validation failures.
class Config {
public:
    struct Entry {
        std::string value;
        std::size_t line = 0;
    };

    Config() = default;

    static Config parse(std::istream& in, const std::string& source = "<config>") {
        Config cfg;
        cfg.source_ = source;
        std::string raw, section;
        std::size_t lineno = 0;
        while (std::getline(in, raw)) {
            ++lineno;
            auto hash = raw.find_first_of("#;");
            std::string line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') throw ConfigError(source, lineno, "unterminated section header");
                section = detail::trim(line.substr(1, line.size() - 2));
                if (section.empty()) throw ConfigError(source, lineno, "empty section name");
                cfg.sections_[section];
                continue;
            }
            auto eq = line.find('=');
            if (eq == std::string::npos) throw ConfigError(source, lineno, "expected 'key = value'");
            if (section.empty()) throw ConfigError(source, lineno, "key outside of any section");
            std::string key = detail::trim(line.substr(0, eq));
            if (key.empty()) throw ConfigError(source, lineno, "empty key");
            auto& sec = cfg.sections_[section];
            if (sec.count(key)) throw ConfigError(source, lineno, "duplicate key '" + key + "'");
            sec[key] = Entry{detail::trim(line.substr(eq + 1)), lineno};
        }
        return cfg;
    }

    static Config parse_string(const std::string& text, const std::string& source = "<config>") {
        std::istringstream in(text);
        return parse(in, source);
    }

    const std::string& source() const noexcept { return source_; }
    bool has_section(const std::string& s) const { return sections_.count(s) > 0; }
    bool has(const std::string& s, const std::string& key) const {
        auto it = sections_.find(s);
        return it != sections_.end() && it->second.count(key) > 0;
    }

    const Entry* entry(const std::string& s, const std::string& key) const {
        auto it = sections_.find(s);
        if (it == sections_.end()) return nullptr;
        auto kt = it->second.find(key);
        return kt == it->second.end() ? nullptr : &kt->second;
    }

    void set(const std::string& s, const std::string& key, const std::string& value) {
        sections_[s][key] = Entry{value, 0};
    }

    /// Drops line numbers, e.g. for built-in defaults.
    void clear_lines() {
        for (auto& [name, keys] : sections_)
            for (auto& [k, e] : keys) e.line = 0;
    }

    /// Copies every entry of `other` over this config, keeping its line
    /// numbers and source name for diagnostics.
    void overlay(const Config& other) {
        for (const auto& [name, keys] : other.sections_)
            for (const auto& [k, e] : keys) sections_[name][k] = e;
        source_ = other.source_;
    }

    std::string get_string(const std::string& s, const std::string& key, const std::string& fallback) const {
        const Entry* e = entry(s, key);
        return e ? e->value : fallback;
    }

    double get_double(const std::string& s, const std::string& key, double fallback) const {
        const Entry* e = entry(s, key);
        if (!e) return fallback;
        auto v = detail::parse_double(e->value);
        if (!v) fail(*e, s, key, "expected a number, got '" + e->value + "'");
        return *v;
    }

    std::uint64_t get_count(const std::string& s, const std::string& key, std::uint64_t fallback) const {
        const Entry* e = entry(s, key);
        if (!e) return fallback;
        auto v = detail::parse_double(e->value);
        if (!v || *v < 0.0 || *v != std::floor(*v) || *v > 1.8e19)
            fail(*e, s, key, "expected a nonnegative integer, got '" + e->value + "'");
        return static_cast<std::uint64_t>(*v);
    }

    std::vector<double> get_list(const std::string& s, const std::string& key,
                                 const std::vector<double>& fallback) const {
        const Entry* e = entry(s, key);
        if (!e) return fallback;
        std::vector<double> out;
        for (const auto& item : detail::split(e->value, ',')) {
            auto v = detail::parse_double(item);
            if (!v) fail(*e, s, key, "expected a comma-separated list of numbers, got '" + e->value + "'");
            out.push_back(*v);
        }
        return out;
    }

    /// Throws a ConfigError pointing at the key's line (or the file when absent).
    [[noreturn]] void reject(const std::string& s, const std::string& key, const std::string& msg) const {
        const Entry* e = entry(s, key);
        throw ConfigError(source_, e ? e->line : 0, "[" + s + "] " + key + ": " + msg);
    }

    /// Sections and keys in sorted order, one `key = value` per line.
    std::string dump() const {
        std::ostringstream os;
        for (const auto& [name, keys] : sections_) {
            os << '[' << name << "]\n";
            for (const auto& [k, e] : keys) os << k << " = " << e.value << '\n';
            os << '\n';
        }
        return os.str();
    }

    const std::map<std::string, std::map<std::string, Entry>>& sections() const noexcept { return sections_; }

private:
    [[noreturn]] void fail(const Entry& e, const std::string& s, const std::string& key, const std::string& msg) const {
        throw ConfigError(source_, e.line, "[" + s + "] " + key + ": " + msg);
    }

    std::string source_ = "<config>";
    std::map<std::string, std::map<std::string, Entry>> sections_;
};

/// Reads a severity_mpa,count CSV (header required).
inline SeveritySequence read_severity_csv(std::istream& in, const std::string& source = "<severities>") {
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    SeveritySequence seq;
    while (std::getline(in, line)) {
        ++lineno;
        line = detail::trim(line);
        if (line.empty()) continue;
        auto fields = detail::split(line, ',');
        if (!header) {
            if (fields.size() != 2 || fields[0] != "severity_mpa" || fields[1] != "count")
                throw ConfigError(source, lineno, "expected header 'severity_mpa,count'");
            header = true;
            continue;
        }
        if (fields.size() != 2) throw ConfigError(source, lineno, "expected two columns");
        auto s = detail::parse_double(fields[0]);
        auto n = detail::parse_double(fields[1]);
        if (!s || !n || *s <= 0.0 || *n < 1.0 || *n != std::floor(*n))
            throw ConfigError(source, lineno, "invalid block '" + line + "'");
        seq.append(*s, static_cast<std::uint64_t>(*n));
    }
    if (!header) throw ConfigError(source, 0, "missing header 'severity_mpa,count'");
    return seq;
}

inline void write_partition_csv(std::ostream& os, const CellPartition& cells) {
    CsvWriter csv(os, {"cell_id", "measure_m3", "severity_unitary"});
    for (std::size_t i = 0; i < cells.size(); ++i) csv.row(i, cells[i].measure, cells[i].severity);
}

inline CellPartition read_partition_csv(std::istream& in, const std::string& source = "<partition>") {
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    std::vector<Cell> cells;
    while (std::getline(in, line)) {
        ++lineno;
        line = detail::trim(line);
        if (line.empty()) continue;
        auto fields = detail::split(line, ',');
        if (!header) {
            if (fields.size() != 3 || fields[0] != "cell_id" || fields[1] != "measure_m3" ||
                fields[2] != "severity_unitary")
                throw ConfigError(source, lineno, "expected header 'cell_id,measure_m3,severity_unitary'");
            header = true;
            continue;
        }
        if (fields.size() != 3) throw ConfigError(source, lineno, "expected three columns");
        auto id = detail::parse_double(fields[0]);
        auto v = detail::parse_double(fields[1]);
        auto s = detail::parse_double(fields[2]);
        if (!id || *id != static_cast<double>(cells.size()) || !v || !s || *v <= 0.0 || *s < 0.0)
            throw ConfigError(source, lineno, "invalid cell '" + line + "'");
        cells.push_back(Cell{*v, *s, {}});
    }
    if (!header) throw ConfigError(source, 0, "missing partition header");
    return CellPartition(std::move(cells));
}

}  // namespace fatiq::io
