#pragma once

#include <string>
#include <vector>

#include "foca/errors.hpp"

namespace foca {

inline constexpr const char* kCsvVersionLine = "# foca csv v1";
inline constexpr const char* kJsonFormatVersion = "foca-json-v1";

/// Fixed numeric formatting: 17 significant digits, '.' separator, so 64-bit
/// values round-trip and outputs are byte-comparable.
std::string csv_double(double v);

/// Builds a CSV in memory: version line, embedded normalized config, header,
/// rows. '\n' line endings throughout.
class CsvBuilder {
  public:
    explicit CsvBuilder(const std::string& normalized_config);
    void header(const std::vector<std::string>& columns);
    void row(const std::vector<std::string>& fields);
    const std::string& str() const { return buf_; }

  private:
    std::string buf_;
    size_t columns_ = 0;
};

void write_text_file(const std::string& path, const std::string& contents);

/// Rejects files whose version line is missing or unknown; returns the lines
/// after the headers (header row first).
std::vector<std::string> read_csv_checked(const std::string& path);

}  // namespace foca
