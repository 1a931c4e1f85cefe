#pragma once

// Internal CSV helpers. Plain comma-separated files, no quoting: symbols,
// ISO dates and numbers only.

#include <fstream>
#include <string>
#include <vector>

namespace deadalpha::csv {

struct Row {
    std::vector<std::string> fields;
    long line = 0;   // 1-based line number in the source file
};

/// Reads all data rows, validating the exact header. Blank lines are
/// skipped. Throws ValidationError naming the offending line.
std::vector<Row> read_rows(const std::string& path, const std::string& expected_header);

/// Reads rows of a file whose header starts with a fixed prefix and has a
/// variable number of extra columns (e.g. `symbol,c1,...,cp`). Returns the
/// header fields through `header_out`.
std::vector<Row> read_rows_variable(const std::string& path, const std::string& header_prefix,
                                    std::vector<std::string>& header_out);

/// Strict double parse (whole field must be consumed). Throws
/// ValidationError naming the line.
double parse_double(const std::string& field, long line);

/// Shortest representation that round-trips to the same double.
std::string format_double(double v);

class Writer {
public:
    explicit Writer(const std::string& path);
    void row(const std::vector<std::string>& fields);
    void raw_line(const std::string& line);

private:
    std::ofstream out_;
    std::string path_;
};

}  // namespace deadalpha::csv
