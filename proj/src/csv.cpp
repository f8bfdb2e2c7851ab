#include "kerrnet/csv.hpp"

#include "kerrnet/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

namespace kerrnet {

std::string format_double(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    if (x == 0.0) {
        x = 0.0;  // drop the sign of negative zero
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::scientific, 12);
    return {buf, res.ptr};
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
    if (columns_.empty()) {
        throw ContractError("CsvTable: no columns");
    }
}

void CsvTable::add_row(std::vector<Cell> row) {
    if (row.size() != columns_.size()) {
        throw ContractError("CsvTable: row width does not match the header");
    }
    rows_.push_back(std::move(row));
}

std::string CsvTable::render() const {
    std::string out;
    for (std::size_t c = 0; c < columns_.size(); ++c) {
        out += (c ? "," : "") + columns_[c];
    }
    out += '\n';
    for (const auto& row : rows_) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) {
                out += ',';
            }
            std::visit(
                [&out](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, double>) {
                        out += format_double(v);
                    } else if constexpr (std::is_same_v<T, long long>) {
                        out += std::to_string(v);
                    } else {
                        out += v;
                    }
                },
                row[c]);
        }
        out += '\n';
    }
    return out;
}

void CsvTable::write(const std::filesystem::path& path) const { write_text(path, render()); }

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    f << text;
    if (!f) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

}  // namespace kerrnet
