#pragma once

#include <string>
#include <vector>

namespace har::csv {

// Minimal comma-separated reader/writer for the toolkit's file formats.
// None of our schemas use quoting or embedded commas, so a plain split
// is sufficient. Rows are trimmed of trailing '\r' (Windows exports).

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Index of a column by name, -1 if absent.
    int column(const std::string& name) const;
};

std::vector<std::string> split_line(const std::string& line);

// Parses a CSV file with a header row. Throws std::runtime_error on
// missing file or rows whose field count differs from the header's.
Table read_file(const std::string& path);

// Same, but from an in-memory string (used by tests).
Table read_string(const std::string& text);

// Shortest decimal text that round-trips the exact double value.
std::string format_double(double v);

// Strict numeric parsers: the whole field must be consumed.
double parse_double(const std::string& field, const std::string& context);
long parse_long(const std::string& field, const std::string& context);

}  // namespace har::csv
