#include "unifield/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "unifield/errors.hpp"

namespace unifield {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

} // namespace

ConfigMap parse_config_text(const std::string& text) {
    ConfigMap out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t const hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string const stripped = trim(line);
        if (stripped.empty()) continue;
        std::size_t const eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string const key = trim(stripped.substr(0, eq));
        std::string const value = trim(stripped.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        out[key] = value;
    }
    return out;
}

ConfigMap parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoFailure("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

double config_double(const std::string& key, const std::string& value) {
    const char* begin = value.c_str();
    char* end = nullptr;
    double const v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw ConfigError(key + ": not a number: '" + value + "'");
    return v;
}

std::size_t config_count(const std::string& key, const std::string& value) {
    std::uint64_t const v = config_u64(key, value);
    return std::size_t(v);
}

std::uint64_t config_u64(const std::string& key, const std::string& value) {
    const char* begin = value.c_str();
    char* end = nullptr;
    unsigned long long const v = std::strtoull(begin, &end, 10);
    if (end == begin || *end != '\0' || value.find('-') != std::string::npos)
        throw ConfigError(key + ": not a non-negative integer: '" + value + "'");
    return std::uint64_t(v);
}

bool config_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw ConfigError(key + ": not a boolean: '" + value + "'");
}

std::vector<double> config_double_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(value);
    while (std::getline(in, item, ',')) {
        std::string const t = trim(item);
        if (t.empty())
            throw ConfigError(key + ": empty list element in '" + value + "'");
        out.push_back(config_double(key, t));
    }
    if (out.empty())
        throw ConfigError(key + ": empty list");
    return out;
}

std::vector<std::string> config_string_list(const std::string& key, const std::string& value) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(value);
    while (std::getline(in, item, ',')) {
        std::string const t = trim(item);
        if (t.empty())
            throw ConfigError(key + ": empty list element in '" + value + "'");
        out.push_back(t);
    }
    if (out.empty())
        throw ConfigError(key + ": empty list");
    return out;
}

} // namespace unifield
