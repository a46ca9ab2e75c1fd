#pragma once

#include <string>
#include <vector>

namespace rplink::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const; // -1 if absent
};

/// Reads a comma-separated file. No quoting support: the formats this
/// project defines never emit quotes. Trailing CR is stripped so CRLF
/// input is tolerated; output is always LF.
Table read_file(const std::string& path);

void write_file(const std::string& path, const Table& table);

/// Strict numeric cell parsing; `where` names file/line/column in errors.
double parse_double(const std::string& cell, const std::string& where);
long parse_long(const std::string& cell, const std::string& where);

} // namespace rplink::csv
