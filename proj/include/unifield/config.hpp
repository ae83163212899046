#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace unifield {

// Flat key-value config source: one `key = value` per line, '#' comments,
// blank lines ignored. Keys are validated by the consumer.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config_text(const std::string& text);
ConfigMap parse_config_file(const std::string& path);

// Typed value parsers; all throw ConfigError naming the key on bad input.
double config_double(const std::string& key, const std::string& value);
std::size_t config_count(const std::string& key, const std::string& value);
std::uint64_t config_u64(const std::string& key, const std::string& value);
bool config_bool(const std::string& key, const std::string& value);
std::vector<double> config_double_list(const std::string& key, const std::string& value);
std::vector<std::string> config_string_list(const std::string& key, const std::string& value);

} // namespace unifield
