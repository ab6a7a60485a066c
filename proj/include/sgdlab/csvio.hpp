#pragma once

#include <json.hpp>

#include <fstream>
#include <string>
#include <vector>

namespace sgdlab {

// 17 significant digits: doubles round-trip losslessly.
std::string format_g17(double v);

std::string csv_escape(const std::string& field);

// Build identifier recorded in experiment headers (git describe at configure time).
const char* build_id();

// RFC-4180 rows preceded by a single JSON header line carrying the full
// experiment configuration.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const nlohmann::json& header);

    void columns(const std::vector<std::string>& names);
    void cell(const std::string& v);
    void cell(double v);
    void cell(std::int64_t v);
    void cell(int v) { cell(static_cast<std::int64_t>(v)); }
    void cell(bool v) { cell(std::string(v ? "true" : "false")); }
    void end_row();

private:
    std::ofstream out_;
    bool row_open_ = false;
};

} // namespace sgdlab
