#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sgdlab {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Flat key-value experiment description: one INI section naming the
// experiment, simple `key = value` lines, `#` or `;` comments.
struct ExperimentConfig {
    std::string experiment;
    std::map<std::string, std::string> kv;

    bool has(const std::string& key) const { return kv.count(key) > 0; }
    std::string get_string(const std::string& key, std::optional<std::string> fallback = {}) const;
    double get_double(const std::string& key, std::optional<double> fallback = {}) const;
    std::int64_t get_int(const std::string& key, std::optional<std::int64_t> fallback = {}) const;
    bool get_bool(const std::string& key, std::optional<bool> fallback = {}) const;
    std::vector<double> get_double_list(const std::string& key) const;
    std::vector<std::int64_t> get_int_list(const std::string& key) const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// Canonical re-emission (sorted keys); parse(dump(c)) == c.
std::string dump_config(const ExperimentConfig& cfg);

// Known experiments and their allowed keys; unknown keys are rejected.
const std::vector<std::string>& experiment_names();
void validate_config(const ExperimentConfig& cfg);

} // namespace sgdlab
