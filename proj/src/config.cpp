#include "sgdlab/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace sgdlab {

namespace {

std::string trim(const std::string& s)
{
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
    return out;
}

const std::map<std::string, std::set<std::string>>& schema()
{
    static const std::set<std::string> common = {"family", "phi", "seed", "output", "svg",
                                                 "threads"};
    static const std::map<std::string, std::set<std::string>> s = [] {
        std::map<std::string, std::set<std::string>> m;
        auto with = [&](std::set<std::string> extra) {
            extra.insert(common.begin(), common.end());
            return extra;
        };
        m["weak-error"] = with({"x", "T", "eta_grid", "n_samples", "antithetic", "slope_min",
                                "slope_max", "method"});
        m["uniformity"] = with({"x", "eta", "n_list", "n_samples", "antithetic", "growth_factor",
                                "reference_t", "method"});
        m["stationary"] = with({"eta", "burn_in", "n_samples", "x0", "bins", "assert_uniform_ks"});
        m["w2-decay"] = with({"eta", "x0_a", "x0_b", "n_grid", "n_samples", "assert_rate_bound"});
        m["descent-time"] = with({"eta_grid", "n_samples", "x0", "max_ratio_spread", "antithetic"});
        m["expansion-grid"] = with({"x_min", "x_max", "x_count", "t_min", "t_max", "t_count",
                                    "eta", "method"});
        m["ou-check"] = with({"eta", "t_mean", "t_second", "x0", "n_paths", "dt"});
        return m;
    }();
    return s;
}

} // namespace

std::string ExperimentConfig::get_string(const std::string& key,
                                         std::optional<std::string> fallback) const
{
    auto it = kv.find(key);
    if (it != kv.end()) return it->second;
    if (fallback) return *fallback;
    throw ConfigError("missing field: " + key);
}

double ExperimentConfig::get_double(const std::string& key, std::optional<double> fallback) const
{
    auto it = kv.find(key);
    if (it == kv.end()) {
        if (fallback) return *fallback;
        throw ConfigError("missing field: " + key);
    }
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("invalid number for key '" + key + "': " + it->second);
    }
}

std::int64_t ExperimentConfig::get_int(const std::string& key,
                                       std::optional<std::int64_t> fallback) const
{
    auto it = kv.find(key);
    if (it == kv.end()) {
        if (fallback) return *fallback;
        throw ConfigError("missing field: " + key);
    }
    std::int64_t v = 0;
    const std::string& s = it->second;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw ConfigError("invalid integer for key '" + key + "': " + s);
    return v;
}

bool ExperimentConfig::get_bool(const std::string& key, std::optional<bool> fallback) const
{
    auto it = kv.find(key);
    if (it == kv.end()) {
        if (fallback) return *fallback;
        throw ConfigError("missing field: " + key);
    }
    std::string v = it->second;
    std::transform(v.begin(), v.end(), v.begin(), ::tolower);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("invalid boolean for key '" + key + "': " + it->second);
}

std::vector<double> ExperimentConfig::get_double_list(const std::string& key) const
{
    std::vector<double> out;
    for (const std::string& item : split_list(get_string(key))) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("invalid number in list '" + key + "': " + item);
        }
    }
    if (out.empty()) throw ConfigError("empty list for key: " + key);
    return out;
}

std::vector<std::int64_t> ExperimentConfig::get_int_list(const std::string& key) const
{
    std::vector<std::int64_t> out;
    for (const std::string& item : split_list(get_string(key))) {
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc() || p != item.data() + item.size())
            throw ConfigError("invalid integer in list '" + key + "': " + item);
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError("empty list for key: " + key);
    return out;
}

ExperimentConfig parse_config_text(const std::string& text)
{
    ExperimentConfig cfg;
    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError("malformed section at line " + std::to_string(line_no));
            if (!cfg.experiment.empty())
                throw ConfigError("multiple experiment sections (one per config file)");
            cfg.experiment = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key = value at line " + std::to_string(line_no));
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key at line " + std::to_string(line_no));
        if (cfg.experiment.empty())
            throw ConfigError("key before experiment section at line " + std::to_string(line_no));
        if (!cfg.kv.emplace(key, value).second)
            throw ConfigError("duplicate key: " + key);
    }
    if (cfg.experiment.empty()) throw ConfigError("missing field: experiment");
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config_text(ss.str());
}

std::string dump_config(const ExperimentConfig& cfg)
{
    std::ostringstream os;
    os << "[" << cfg.experiment << "]\n";
    for (const auto& [k, v] : cfg.kv) os << k << " = " << v << "\n";
    return os.str();
}

const std::vector<std::string>& experiment_names()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [name, keys] : schema()) v.push_back(name);
        return v;
    }();
    return names;
}

void validate_config(const ExperimentConfig& cfg)
{
    auto it = schema().find(cfg.experiment);
    if (it == schema().end()) throw ConfigError("unknown experiment: " + cfg.experiment);
    for (const auto& [key, value] : cfg.kv)
        if (!it->second.count(key))
            throw ConfigError("unknown key for " + cfg.experiment + ": " + key);
}

} // namespace sgdlab
