// SPDX-License-Identifier: Apache-2.0
#include "actiload/core/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace actiload::core {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos)
        return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string cur;
    std::stringstream ss(value);
    while (std::getline(ss, cur, ',')) {
        std::string t = trim(cur);
        if (!t.empty())
            out.push_back(t);
    }
    return out;
}

double parse_double(const std::string& s, const std::string& context) {
    char* end = nullptr;
    std::string t = trim(s);
    double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size())
        throw ConfigError(context + ": '" + s + "' is not a number");
    return v;
}

int parse_int(const std::string& s, const std::string& context) {
    char* end = nullptr;
    std::string t = trim(s);
    long v = std::strtol(t.c_str(), &end, 10);
    if (t.empty() || end != t.c_str() + t.size())
        throw ConfigError(context + ": '" + s + "' is not an integer");
    return static_cast<int>(v);
}

bool ConfigSection::has(const std::string& key) const {
    for (const auto& e : entries)
        if (e.key == key)
            return true;
    return false;
}

std::optional<std::string> ConfigSection::get(const std::string& key) const {
    for (const auto& e : entries)
        if (e.key == key)
            return e.value;
    return std::nullopt;
}

std::string ConfigSection::get_or(const std::string& key, const std::string& fallback) const {
    auto v = get(key);
    return v ? *v : fallback;
}

const std::string& ConfigSection::require(const std::string& key) const {
    for (const auto& e : entries)
        if (e.key == key)
            return e.value;
    throw ConfigError("[" + name + "]: missing required key '" + key + "'");
}

double ConfigSection::require_double(const std::string& key) const {
    return parse_double(require(key), "[" + name + "] " + key);
}

double ConfigSection::get_double_or(const std::string& key, double fallback) const {
    auto v = get(key);
    return v ? parse_double(*v, "[" + name + "] " + key) : fallback;
}

int ConfigSection::require_int(const std::string& key) const {
    return parse_int(require(key), "[" + name + "] " + key);
}

int ConfigSection::get_int_or(const std::string& key, int fallback) const {
    auto v = get(key);
    return v ? parse_int(*v, "[" + name + "] " + key) : fallback;
}

bool ConfigSection::get_bool_or(const std::string& key, bool fallback) const {
    auto v = get(key);
    if (!v)
        return fallback;
    std::string t = trim(*v);
    if (t == "true" || t == "1" || t == "yes" || t == "on")
        return true;
    if (t == "false" || t == "0" || t == "no" || t == "off")
        return false;
    throw ConfigError("[" + name + "] " + key + ": '" + *v + "' is not a boolean");
}

std::vector<std::string> ConfigSection::values(const std::string& key) const {
    std::vector<std::string> out;
    for (const auto& e : entries)
        if (e.key == key)
            out.push_back(e.value);
    return out;
}

void ConfigSection::fail(const std::string& key, const std::string& msg) const {
    int ln = line;
    for (const auto& e : entries)
        if (e.key == key)
            ln = e.line;
    throw ConfigError("[" + name + "] " + key + " (line " + std::to_string(ln) + "): " + msg);
}

ConfigDoc ConfigDoc::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
}

ConfigDoc ConfigDoc::parse_string(const std::string& text, const std::string& origin) {
    ConfigDoc doc;
    doc.origin_ = origin;
    std::stringstream ss(text);
    std::string raw;
    int line_no = 0;
    ConfigSection* current = nullptr;
    while (std::getline(ss, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#')
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": unterminated section header");
            std::string name = trim(line.substr(1, line.size() - 2));
            if (name.empty())
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty section name");
            for (const auto& s : doc.sections_)
                if (s.name == name)
                    throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate section [" +
                                      name + "]");
            doc.sections_.push_back(ConfigSection{name, line_no, {}});
            current = &doc.sections_.back();
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
        if (!current)
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": entry outside any section");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
        current->entries.push_back(ConfigSection::Entry{key, value, line_no});
    }
    return doc;
}

const ConfigSection* ConfigDoc::find(const std::string& name) const {
    for (const auto& s : sections_)
        if (s.name == name)
            return &s;
    return nullptr;
}

const ConfigSection& ConfigDoc::require(const std::string& name) const {
    const ConfigSection* s = find(name);
    if (!s)
        throw ConfigError(origin_ + ": missing required section [" + name + "]");
    return *s;
}

std::vector<const ConfigSection*> ConfigDoc::with_prefix(const std::string& prefix) const {
    std::vector<const ConfigSection*> out;
    for (const auto& s : sections_)
        if (s.name.size() > prefix.size() && s.name.compare(0, prefix.size(), prefix) == 0)
            out.push_back(&s);
    return out;
}

} // namespace actiload::core
