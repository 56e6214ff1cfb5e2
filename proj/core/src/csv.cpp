#include "segiso/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "segiso/errors.hpp"

namespace segiso {

namespace {

std::string loc(const std::string& path, std::size_t line, std::size_t col) {
    std::ostringstream out;
    out << path << ":" << line << ":" << col;
    return out.str();
}

bool needs_quoting(std::string_view field, char delimiter) {
    return field.find_first_of(std::string{delimiter} + "\"\n\r") != std::string_view::npos;
}

}  // namespace

std::size_t CsvTable::column(std::string_view name) const {
    if (auto idx = find_column(name)) return *idx;
    throw_error(Errc::schema, path + ":1: missing required column '" + std::string(name) + "'");
}

std::optional<std::size_t> CsvTable::find_column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    return std::nullopt;
}

CsvTable parse_csv(std::string_view text, const std::string& path_label, char delimiter) {
    CsvTable table;
    table.path = path_label;

    std::vector<std::string> current;
    std::string field;
    bool in_quotes = false;
    bool row_started = false;
    std::size_t line = 1;
    std::size_t field_start_col = 1;
    std::size_t col = 1;

    auto end_field = [&] {
        current.push_back(std::move(field));
        field.clear();
        row_started = true;
        field_start_col = col + 1;
    };
    auto end_row = [&] {
        if (!row_started && field.empty() && current.empty()) return;  // blank line
        end_field();
        if (table.header.empty()) {
            table.header = std::move(current);
        } else {
            if (current.size() != table.header.size()) {
                throw_error(Errc::schema, loc(path_label, line, 1) + ": expected " +
                                              std::to_string(table.header.size()) + " fields, got " +
                                              std::to_string(current.size()));
            }
            table.rows.push_back(std::move(current));
        }
        current.clear();
        row_started = false;
        field_start_col = 1;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                    col += 2;
                } else {
                    in_quotes = false;
                    ++col;
                }
            } else {
                field.push_back(c);
                if (c == '\n') {
                    ++line;
                    col = 1;
                } else {
                    ++col;
                }
            }
            continue;
        }
        switch (c) {
            case '"':
                if (!field.empty()) {
                    throw_error(Errc::schema,
                                loc(path_label, line, col) + ": quote inside unquoted field");
                }
                in_quotes = true;
                ++col;
                break;
            case '\r':
                ++col;
                break;
            case '\n':
                end_row();
                ++line;
                col = 1;
                break;
            default:
                if (c == delimiter) {
                    end_field();
                    ++col;
                } else {
                    field.push_back(c);
                    ++col;
                }
        }
    }
    if (in_quotes) {
        throw_error(Errc::schema, loc(path_label, line, col) + ": unterminated quoted field");
    }
    if (row_started || !field.empty()) end_row();

    if (table.header.empty()) {
        throw_error(Errc::schema, path_label + ": empty file, expected a header row");
    }
    (void)field_start_col;
    return table;
}

CsvTable read_csv(const std::filesystem::path& path, char delimiter) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_error(Errc::io, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), path.string(), delimiter);
}

CsvWriter::CsvWriter(std::vector<std::string> header, char delimiter)
    : delimiter_(delimiter), n_columns_(header.size()) {
    row(header);
}

void CsvWriter::row(std::span<const std::string> fields) {
    if (fields.size() != n_columns_) {
        throw_error(Errc::invalid_argument, "CsvWriter: row width mismatch");
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) out_.push_back(delimiter_);
        const std::string& f = fields[i];
        if (needs_quoting(f, delimiter_)) {
            out_.push_back('"');
            for (char c : f) {
                if (c == '"') out_.push_back('"');
                out_.push_back(c);
            }
            out_.push_back('"');
        } else {
            out_.append(f);
        }
    }
    out_.push_back('\n');
}

std::string fmt_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string fmt_i64(std::int64_t v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string_view FieldRef::value() const { return table->rows[row][col]; }

std::string FieldRef::location() const {
    // 1-based line: header occupies line 1.
    return loc(table->path, row + 2, col + 1);
}

double parse_double_field(const FieldRef& f) {
    const std::string_view v = f.value();
    double out = 0.0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
        throw_error(Errc::schema, f.location() + ": expected a number, got '" + std::string(v) + "'");
    }
    return out;
}

std::int64_t parse_i64_field(const FieldRef& f) {
    const std::string_view v = f.value();
    std::int64_t out = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
        throw_error(Errc::schema, f.location() + ": expected an integer, got '" + std::string(v) + "'");
    }
    return out;
}

void atomic_write_file(const std::filesystem::path& path, std::string_view content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw_error(Errc::io, "cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw_error(Errc::io, "short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw_error(Errc::io, "rename " + tmp.string() + " -> " + path.string() + ": " + ec.message());
}

}  // namespace segiso
