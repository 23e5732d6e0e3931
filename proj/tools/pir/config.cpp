#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pir/csv.hpp"
#include "pir/error.hpp"

namespace pir::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::pair<std::string, std::string> split_assignment(const std::string& line, const std::string& where) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key=value, got '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(where + ": empty key");
    return {std::move(key), trim(line.substr(eq + 1))};
}

}  // namespace

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return from_text(text.str(), path);
}

Config Config::from_text(const std::string& text, const std::string& source) {
    Config c;
    c.source_ = source;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto [key, value] = split_assignment(t, source + " line " + std::to_string(line_no));
        if (!c.entries_.emplace(key, value).second) {
            throw ConfigError(source + " line " + std::to_string(line_no) + ": key '" + key + "' given twice");
        }
    }
    return c;
}

void Config::set(const std::string& assignment) {
    auto [key, value] = split_assignment(assignment, "--set");
    entries_[key] = value;
}

bool Config::has(const std::string& key) const {
    if (entries_.count(key) == 0) return false;
    used_.insert(key);
    return true;
}

const std::string& Config::raw(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError(source_ + ": missing key '" + key + "'");
    used_.insert(key);
    return it->second;
}

std::string Config::text(const std::string& key) const { return raw(key); }

std::string Config::text(const std::string& key, const std::string& fallback) const {
    return has(key) ? raw(key) : fallback;
}

double Config::number(const std::string& key) const {
    try {
        return csv::parse_number(raw(key), source_ + " key '" + key + "'");
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

double Config::number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

std::size_t Config::count(const std::string& key) const {
    const double v = number(key);
    if (v < 0.0 || v != std::floor(v) || v > 1e15) {
        throw ConfigError(source_ + ": key '" + key + "' must be a nonnegative integer");
    }
    return static_cast<std::size_t>(v);
}

std::size_t Config::count(const std::string& key, std::size_t fallback) const {
    return has(key) ? count(key) : fallback;
}

bool Config::flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string& v = raw(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(source_ + ": key '" + key + "' must be true or false");
}

std::vector<double> Config::numbers(const std::string& key) const {
    std::vector<double> out;
    for (const auto& cell : csv::split_line(raw(key))) {
        try {
            out.push_back(csv::parse_number(cell, source_ + " key '" + key + "'"));
        } catch (const Error& e) {
            throw ConfigError(e.what());
        }
    }
    return out;
}

std::vector<double> Config::numbers(const std::string& key, std::vector<double> fallback) const {
    return has(key) ? numbers(key) : fallback;
}

std::vector<std::pair<std::string, std::string>> Config::section(const std::string& prefix) const {
    std::vector<std::pair<std::string, std::string>> out;
    const std::string p = prefix + ".";
    for (const auto& [key, value] : entries_) {
        if (key.rfind(p, 0) == 0) {
            used_.insert(key);
            out.emplace_back(key.substr(p.size()), value);
        }
    }
    return out;
}

void Config::require_all_used(const std::vector<std::string>& ignored) const {
    std::string unknown;
    for (const auto& [key, value] : entries_) {
        const auto section = key.substr(0, key.find('.'));
        if (std::find(ignored.begin(), ignored.end(), section) != ignored.end()) continue;
        if (used_.count(key) == 0) unknown += (unknown.empty() ? "" : ", ") + key;
    }
    if (!unknown.empty()) throw ConfigError(source_ + ": unknown keys: " + unknown);
}

}  // namespace pir::cli
