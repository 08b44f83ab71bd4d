#include "rsinsure/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace rsinsure {

std::string format_number(double v) {
    if (v == 0.0) v = 0.0;  // drop the sign of -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void CsvTable::add_row(std::vector<Cell> cells) {
    if (cells.size() != header_.size()) throw std::invalid_argument("CSV row width mismatch");
    std::vector<std::string> row;
    row.reserve(cells.size());
    for (auto& c : cells) row.push_back(std::move(c.text));
    rows_.push_back(std::move(row));
}

double CsvTable::number(std::size_t row, const std::string& column) const {
    auto it = std::find(header_.begin(), header_.end(), column);
    if (it == header_.end()) throw std::out_of_range("no CSV column '" + column + "'");
    return std::stod(rows_.at(row).at(static_cast<std::size_t>(it - header_.begin())));
}

std::string CsvTable::str() const {
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (k) out += ',';
            out += cells[k];
        }
        out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
}

void CsvTable::write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << str();
}

}  // namespace rsinsure
