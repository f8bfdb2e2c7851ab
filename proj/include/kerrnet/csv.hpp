#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace kerrnet {

/// Locale-independent scientific notation, 12 significant decimals, lowercase e.
std::string format_double(double x);

/// In-memory CSV table with a header row; rendered deterministically.
class CsvTable {
public:
    using Cell = std::variant<double, long long, std::string>;

    explicit CsvTable(std::vector<std::string> columns);

    void add_row(std::vector<Cell> row);

    const std::vector<std::string>& columns() const { return columns_; }
    std::size_t rows() const { return rows_.size(); }
    const std::vector<std::vector<Cell>>& data() const { return rows_; }

    std::string render() const;
    void write(const std::filesystem::path& path) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<Cell>> rows_;
};

/// Writes text to a file in binary mode (no newline translation).
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace kerrnet
