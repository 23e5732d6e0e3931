#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pir::cli {

/// Bad command line or configuration (exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flat `key=value` configuration with dotted section prefixes
/// (`sim.step=1.0`). Blank lines and lines starting with '#' are ignored.
/// Every lookup marks the key as used so that typos can be reported.
class Config {
public:
    Config() = default;

    static Config from_file(const std::string& path);
    static Config from_text(const std::string& text, const std::string& source = "<text>");

    /// `key=value`, replacing any value from the file.
    void set(const std::string& assignment);

    [[nodiscard]] bool has(const std::string& key) const;

    [[nodiscard]] std::string text(const std::string& key) const;
    [[nodiscard]] std::string text(const std::string& key, const std::string& fallback) const;

    [[nodiscard]] double number(const std::string& key) const;
    [[nodiscard]] double number(const std::string& key, double fallback) const;

    [[nodiscard]] std::size_t count(const std::string& key) const;
    [[nodiscard]] std::size_t count(const std::string& key, std::size_t fallback) const;

    [[nodiscard]] bool flag(const std::string& key, bool fallback) const;

    /// Comma-separated numbers.
    [[nodiscard]] std::vector<double> numbers(const std::string& key) const;
    [[nodiscard]] std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const;

    /// Keys `prefix.<name>` as (name, value) pairs, in key order.
    [[nodiscard]] std::vector<std::pair<std::string, std::string>> section(const std::string& prefix) const;

    /// Throws ConfigError naming every key that was never looked up, except
    /// keys under one of the `ignored` sections.
    void require_all_used(const std::vector<std::string>& ignored = {}) const;

private:
    const std::string& raw(const std::string& key) const;

    std::map<std::string, std::string> entries_;
    std::string source_ = "<empty>";
    mutable std::set<std::string> used_;
};

}  // namespace pir::cli
