#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace segiso {

// Delimiter-separated text with a header row, UTF-8, RFC-style quoting.
// Missing values are empty fields. Parse errors carry file:line:column.
struct CsvTable {
    std::string path;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Column index by header name; throws a schema error when absent.
    std::size_t column(std::string_view name) const;
    std::optional<std::size_t> find_column(std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& path, char delimiter = ',');
CsvTable parse_csv(std::string_view text, const std::string& path_label, char delimiter = ',');

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header, char delimiter = ',');

    void row(std::span<const std::string> fields);
    const std::string& str() const { return out_; }

private:
    std::string out_;
    char delimiter_;
    std::size_t n_columns_;
};

// Shortest round-trip decimal rendering; identical bytes for identical doubles.
std::string fmt_double(double v);
std::string fmt_i64(std::int64_t v);

// Field parsers that name file/line/column on failure.
struct FieldRef {
    const CsvTable* table;
    std::size_t row;
    std::size_t col;
    std::string_view value() const;
    std::string location() const;
};

double parse_double_field(const FieldRef& f);
std::int64_t parse_i64_field(const FieldRef& f);

// Write via temp file + rename so partial output is never observed.
void atomic_write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace segiso
