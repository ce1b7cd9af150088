// CSV and JSONLines output for sweep rows

#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qbattery/sweep.hpp"

namespace qbattery {

struct OutputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {
// Shortest representation that parses back to the same double.
inline void append_real(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

inline void append_csv_text(std::string& out, const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) {
        out += s;
        return;
    }
    out += '"';
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
}
}  // namespace detail

inline std::string csv_header(const std::vector<Column>& cols) {
    std::string line;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) line += ',';
        detail::append_csv_text(line, cols[i].name);
    }
    line += '\n';
    return line;
}

inline std::string csv_line(const ResultRow& row) {
    std::string line;
    for (std::size_t i = 0; i < row.values.size(); ++i) {
        if (i) line += ',';
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, std::string>) {
                    detail::append_csv_text(line, v);
                } else if constexpr (std::is_same_v<T, double>) {
                    detail::append_real(line, v);
                } else {
                    char buf[24];
                    const auto res = std::to_chars(buf, buf + sizeof buf, v);
                    line.append(buf, res.ptr);
                }
            },
            row.values[i]);
    }
    line += '\n';
    return line;
}

// NaN and infinities become null.
inline std::string jsonl_line(const std::vector<Column>& cols, const ResultRow& row) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < cols.size(); ++i) {
        std::visit([&](const auto& v) { obj[cols[i].name] = v; }, row.values[i]);
    }
    return obj.dump() + '\n';
}

// Writes to a file (or an existing stream) as rows arrive.
class RowWriter {
public:
    RowWriter(std::ostream& os, std::vector<Column> cols, OutputFormat format, std::string path = "<stdout>")
        : os_(&os), cols_(std::move(cols)), format_(format), path_(std::move(path)) {
        begin();
    }

    RowWriter(const std::string& path, std::vector<Column> cols, OutputFormat format)
        : file_(path, std::ios::binary | std::ios::trunc), cols_(std::move(cols)), format_(format), path_(path) {
        if (!file_) throw OutputError("cannot open output file '" + path + "'");
        os_ = &file_;
        begin();
    }

    void write(const ResultRow& row) {
        if (row.values.size() != cols_.size()) {
            throw ContractViolation("RowWriter: row width does not match the header");
        }
        put(format_ == OutputFormat::Csv ? csv_line(row) : jsonl_line(cols_, row));
    }

    void finish() {
        os_->flush();
        if (!*os_) throw OutputError("write failed for '" + path_ + "'");
    }

private:
    void begin() {
        if (format_ == OutputFormat::Csv) put(csv_header(cols_));
    }

    void put(const std::string& s) {
        os_->write(s.data(), static_cast<std::streamsize>(s.size()));
        if (!*os_) throw OutputError("write failed for '" + path_ + "'");
    }

    std::ofstream file_;
    std::ostream* os_{nullptr};
    std::vector<Column> cols_;
    OutputFormat format_;
    std::string path_;
};

inline std::string emit_string(const std::vector<Column>& cols, const std::vector<ResultRow>& rows,
                               OutputFormat format) {
    std::ostringstream os;
    RowWriter w(os, cols, format);
    for (const auto& r : rows) w.write(r);
    w.finish();
    return os.str();
}

// ---------------------------------------------------------------- reading

namespace detail {
inline std::vector<std::vector<std::string>> split_csv(const std::string& text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
            continue;
        }
        any = true;
        if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c == '\n') {
            fields.push_back(std::move(cur));
            cur.clear();
            records.push_back(std::move(fields));
            fields.clear();
            any = false;
        } else {
            cur += c;
        }
    }
    if (quoted) throw ContractViolation("parse_csv: unterminated quote");
    if (any) {
        fields.push_back(std::move(cur));
        records.push_back(std::move(fields));
    }
    return records;
}

template <class T>
T parse_number(const std::string& s) {
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ContractViolation("parse_csv: bad number '" + s + "'");
    }
    return v;
}
}  // namespace detail

// Inverse of the CSV writer for a known column schema.
inline std::vector<ResultRow> parse_csv(const std::string& text, const std::vector<Column>& cols) {
    const auto records = detail::split_csv(text);
    if (records.empty()) throw ContractViolation("parse_csv: missing header");
    const auto& header = records.front();
    if (header.size() != cols.size()) throw ContractViolation("parse_csv: header width mismatch");
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (header[i] != cols[i].name) throw ContractViolation("parse_csv: unexpected column " + header[i]);
    }
    std::vector<ResultRow> rows;
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != cols.size()) throw ContractViolation("parse_csv: row width mismatch");
        ResultRow row;
        for (std::size_t i = 0; i < cols.size(); ++i) {
            const auto& f = records[r][i];
            switch (cols[i].type) {
                case ColumnType::Integer: row.values.emplace_back(detail::parse_number<std::int64_t>(f)); break;
                case ColumnType::Real: row.values.emplace_back(detail::parse_number<double>(f)); break;
                case ColumnType::Text: row.values.emplace_back(f); break;
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace qbattery
