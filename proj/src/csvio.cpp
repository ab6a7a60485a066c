#include "sgdlab/csvio.hpp"

#include <cstdio>
#include <stdexcept>

#ifndef SGDLAB_GIT_DESCRIBE
#define SGDLAB_GIT_DESCRIBE "unknown"
#endif

namespace sgdlab {

std::string format_g17(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string csv_escape(const std::string& field)
{
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

const char* build_id() { return SGDLAB_GIT_DESCRIBE; }

CsvWriter::CsvWriter(const std::string& path, const nlohmann::json& header)
    : out_(path, std::ios::binary)
{
    if (!out_) throw std::runtime_error("cannot open output file: " + path);
    out_ << header.dump() << "\n";
}

void CsvWriter::columns(const std::vector<std::string>& names)
{
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out_ << ",";
        out_ << csv_escape(names[i]);
    }
    out_ << "\n";
}

void CsvWriter::cell(const std::string& v)
{
    if (row_open_) out_ << ",";
    out_ << csv_escape(v);
    row_open_ = true;
}

void CsvWriter::cell(double v) { cell(format_g17(v)); }

void CsvWriter::cell(std::int64_t v) { cell(std::to_string(v)); }

void CsvWriter::end_row()
{
    out_ << "\n";
    row_open_ = false;
}

} // namespace sgdlab
