#pragma once

#include <map>
#include <string>
#include <vector>

namespace frfid::io {

/// Minimal INI-style config: [section] headers, key = value lines, '#' or ';'
/// comments. Keys are stored as "section.key". Values keep insertion order
/// for deterministic write-back.
class IniFile {
public:
    static IniFile parse_file(const std::string& path);
    static IniFile parse_string(const std::string& text);

    bool has(const std::string& key) const;
    std::string get(const std::string& key) const;  // throws if missing
    std::string get_or(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    long long get_int(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::vector<double> get_doubles(const std::string& key) const;  // comma list
    std::vector<std::string> get_list(const std::string& key) const;

    void set(const std::string& key, const std::string& value);
    void set_double(const std::string& key, double value);
    void set_int(const std::string& key, long long value);

    std::string serialize() const;
    void write_file(const std::string& path) const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
    std::map<std::string, std::size_t> index_;
};

/// One parsed CSV table: header names plus rows of doubles.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const;  // throws if absent
};

CsvTable read_csv(const std::string& path);

/// Writes rows with %.17g so reruns are byte-identical.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// FNV-1a of a string, used as a cheap config fingerprint.
std::string fnv1a_hex(const std::string& text);

}  // namespace frfid::io
