#pragma once

#include <initializer_list>
#include <string>
#include <vector>

namespace rsinsure {

// 10 significant digits; %g switches to scientific notation below 1e-4.
std::string format_number(double v);

class CsvTable {
public:
    struct Cell {
        Cell(double v) : text(format_number(v)) {}
        Cell(int v) : text(std::to_string(v)) {}
        Cell(std::size_t v) : text(std::to_string(v)) {}
        Cell(bool v) : text(v ? "true" : "false") {}
        Cell(const char* s) : text(s) {}
        Cell(std::string s) : text(std::move(s)) {}
        std::string text;
    };

    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<Cell> cells);
    const std::vector<std::string>& header() const noexcept { return header_; }
    std::size_t rows() const noexcept { return rows_.size(); }
    const std::string& at(std::size_t row, std::size_t col) const { return rows_.at(row).at(col); }
    double number(std::size_t row, const std::string& column) const;
    std::string str() const;
    void write(const std::string& path) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace rsinsure
