#include "csv.hpp"

#include <charconv>
#include <system_error>

#include "deadalpha/errors.hpp"

namespace deadalpha::csv {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
        size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

}  // namespace

std::vector<Row> read_rows(const std::string& path, const std::string& expected_header) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path);

    std::string line;
    long lineno = 0;
    if (!std::getline(in, line)) throw ValidationError(path + ": no data rows");
    ++lineno;
    if (strip_cr(line) != expected_header) {
        throw ValidationError(path + " line 1: expected header '" + expected_header +
                              "', got '" + strip_cr(line) + "'");
    }

    const size_t n_fields = split(expected_header).size();
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        Row row{split(line), lineno};
        if (row.fields.size() != n_fields) {
            throw ValidationError(path + " line " + std::to_string(lineno) + ": expected " +
                                  std::to_string(n_fields) + " fields, got " +
                                  std::to_string(row.fields.size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ValidationError(path + ": no data rows");
    return rows;
}

std::vector<Row> read_rows_variable(const std::string& path, const std::string& header_prefix,
                                    std::vector<std::string>& header_out) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path);

    std::string line;
    long lineno = 0;
    if (!std::getline(in, line)) throw ValidationError(path + ": no data rows");
    ++lineno;
    header_out = split(strip_cr(line));
    if (header_out.empty() || header_out.front() != header_prefix) {
        throw ValidationError(path + " line 1: expected header starting with '" + header_prefix +
                              "'");
    }

    std::vector<Row> rows;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        Row row{split(line), lineno};
        if (row.fields.size() != header_out.size()) {
            throw ValidationError(path + " line " + std::to_string(lineno) + ": expected " +
                                  std::to_string(header_out.size()) + " fields, got " +
                                  std::to_string(row.fields.size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ValidationError(path + ": no data rows");
    return rows;
}

double parse_double(const std::string& field, long line) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw ValidationError("line " + std::to_string(line) + ": cannot parse number '" + field +
                              "'");
    }
    return value;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

Writer::Writer(const std::string& path) : out_(path, std::ios::binary), path_(path) {
    if (!out_) throw ValidationError("cannot open file for writing: " + path);
}

void Writer::row(const std::vector<std::string>& fields) {
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        out_ << fields[i];
    }
    out_ << '\n';
}

void Writer::raw_line(const std::string& line) { out_ << line << '\n'; }

}  // namespace deadalpha::csv
