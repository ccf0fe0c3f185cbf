#include "foca/csv_io.hpp"

#include <cstdio>
#include <fstream>

namespace foca {

std::string csv_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvBuilder::CsvBuilder(const std::string& normalized_config) {
    buf_ += kCsvVersionLine;
    buf_ += '\n';
    buf_ += "# config ";
    buf_ += normalized_config;
    buf_ += '\n';
}

void CsvBuilder::header(const std::vector<std::string>& columns) {
    columns_ = columns.size();
    for (size_t i = 0; i < columns.size(); ++i) {
        if (i)
            buf_ += ',';
        buf_ += columns[i];
    }
    buf_ += '\n';
}

void CsvBuilder::row(const std::vector<std::string>& fields) {
    if (fields.size() != columns_)
        throw RangeError("CsvBuilder::row: field count does not match header");
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i)
            buf_ += ',';
        buf_ += fields[i];
    }
    buf_ += '\n';
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw ConfigError("cannot open output file " + path);
    os.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!os)
        throw ConfigError("failed writing " + path);
}

std::vector<std::string> read_csv_checked(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw ConfigError("cannot open " + path);
    std::string line;
    if (!std::getline(is, line))
        throw ConfigError(path + ": empty file");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != kCsvVersionLine)
        throw ConfigError(path + ": unknown format version line '" + line + "'");
    std::vector<std::string> rows;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (!line.empty() && line[0] == '#')
            continue;
        rows.push_back(line);
    }
    return rows;
}

}  // namespace foca
