// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace actiload::core {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Line-oriented config: "[section.name]" headers, "key = value" entries,
// '#' comments. Keys may repeat within a section (used for table rows).
class ConfigSection {
public:
    struct Entry {
        std::string key;
        std::string value;
        int line = 0;
    };

    std::string name;
    int line = 0;
    std::vector<Entry> entries;

    bool has(const std::string& key) const;
    std::optional<std::string> get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    const std::string& require(const std::string& key) const;

    double require_double(const std::string& key) const;
    double get_double_or(const std::string& key, double fallback) const;
    int require_int(const std::string& key) const;
    int get_int_or(const std::string& key, int fallback) const;
    bool get_bool_or(const std::string& key, bool fallback) const;

    // All values for a repeated key, in file order.
    std::vector<std::string> values(const std::string& key) const;

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const;
};

class ConfigDoc {
public:
    static ConfigDoc parse_file(const std::string& path);
    static ConfigDoc parse_string(const std::string& text, const std::string& origin);

    const std::vector<ConfigSection>& sections() const { return sections_; }
    const ConfigSection* find(const std::string& name) const;
    const ConfigSection& require(const std::string& name) const;
    std::vector<const ConfigSection*> with_prefix(const std::string& prefix) const;
    const std::string& origin() const { return origin_; }

private:
    std::vector<ConfigSection> sections_;
    std::string origin_;
};

// Comma-separated list helper; trims whitespace around items, drops empties.
std::vector<std::string> split_list(const std::string& value);
std::string trim(const std::string& s);

double parse_double(const std::string& s, const std::string& context);
int parse_int(const std::string& s, const std::string& context);

} // namespace actiload::core
