#include "frfid/io.hpp"

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace frfid::io {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

IniFile IniFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
}

IniFile IniFile::parse_string(const std::string& text) {
    IniFile ini;
    std::istringstream in(text);
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw std::runtime_error("config line " + std::to_string(lineno) +
                                         ": malformed section header");
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected key = value");
        const std::string key =
            (section.empty() ? "" : section + ".") + trim(t.substr(0, eq));
        std::string value = t.substr(eq + 1);
        // Inline comments: a '#' or ';' preceded by whitespace ends the value.
        for (std::size_t i = 1; i < value.size(); ++i) {
            if ((value[i] == '#' || value[i] == ';') &&
                std::isspace(static_cast<unsigned char>(value[i - 1]))) {
                value.resize(i);
                break;
            }
        }
        ini.set(key, trim(value));
    }
    return ini;
}

bool IniFile::has(const std::string& key) const { return index_.count(key) > 0; }

std::string IniFile::get(const std::string& key) const {
    const auto it = index_.find(key);
    if (it == index_.end())
        throw std::runtime_error("missing config key: " + key);
    return entries_[it->second].second;
}

std::string IniFile::get_or(const std::string& key,
                            const std::string& fallback) const {
    return has(key) ? get(key) : fallback;
}

double IniFile::get_double(const std::string& key) const {
    const std::string v = get(key);
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (trim(v.substr(pos)) != "")
        throw std::runtime_error("config key " + key + ": not a number: " + v);
    return d;
}

long long IniFile::get_int(const std::string& key) const {
    const std::string v = get(key);
    std::size_t pos = 0;
    const long long d = std::stoll(v, &pos);
    if (trim(v.substr(pos)) != "")
        throw std::runtime_error("config key " + key + ": not an integer: " + v);
    return d;
}

bool IniFile::get_bool(const std::string& key) const {
    const std::string v = get(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::runtime_error("config key " + key + ": not a boolean: " + v);
}

std::vector<double> IniFile::get_doubles(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : get_list(key)) out.push_back(std::stod(item));
    return out;
}

std::vector<std::string> IniFile::get_list(const std::string& key) const {
    std::vector<std::string> out;
    std::istringstream in(get(key));
    std::string item;
    while (std::getline(in, item, ',')) {
        const std::string t = trim(item);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

void IniFile::set(const std::string& key, const std::string& value) {
    const auto it = index_.find(key);
    if (it != index_.end()) {
        entries_[it->second].second = value;
    } else {
        index_[key] = entries_.size();
        entries_.emplace_back(key, value);
    }
}

void IniFile::set_double(const std::string& key, double value) {
    set(key, fmt_double(value));
}

void IniFile::set_int(const std::string& key, long long value) {
    set(key, std::to_string(value));
}

std::string IniFile::serialize() const {
    // Group by section, keeping first-appearance order of sections and keys.
    std::ostringstream out;
    std::vector<std::string> sections;
    for (const auto& [key, value] : entries_) {
        const auto dot = key.find('.');
        const std::string sec = (dot == std::string::npos) ? "" : key.substr(0, dot);
        bool seen = false;
        for (const auto& s : sections) seen = seen || s == sec;
        if (!seen) sections.push_back(sec);
    }
    for (const auto& sec : sections) {
        if (!sec.empty()) out << "[" << sec << "]\n";
        for (const auto& [key, value] : entries_) {
            const auto dot = key.find('.');
            const std::string ksec =
                (dot == std::string::npos) ? "" : key.substr(0, dot);
            if (ksec != sec) continue;
            const std::string name =
                (dot == std::string::npos) ? key : key.substr(dot + 1);
            out << name << " = " << value << "\n";
        }
        out << "\n";
    }
    return out.str();
}

void IniFile::write_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config file: " + path);
    out << serialize();
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw std::runtime_error("csv: missing column " + name);
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open csv file: " + path);
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("csv: empty file " + path);
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) table.header.push_back(trim(cell));
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::istringstream rs(line);
        std::vector<double> row;
        while (std::getline(rs, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != table.header.size())
            throw std::runtime_error("csv: ragged row in " + path);
        table.rows.push_back(std::move(row));
    }
    return table;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (f == nullptr) throw std::runtime_error("cannot write csv file: " + path);
    for (std::size_t i = 0; i < header.size(); ++i)
        std::fprintf(f, "%s%s", header[i].c_str(),
                     i + 1 == header.size() ? "\n" : ",");
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            std::fprintf(f, "%.17g%s", row[i], i + 1 == row.size() ? "\n" : ",");
    }
    std::fclose(f);
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace frfid::io
