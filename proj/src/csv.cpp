#include "frp/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "frp/system.hpp"

namespace frp {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

CsvTable CsvTable::read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("{}: cannot open file", path.string()));
    CsvTable table;
    table.path_ = path;
    std::string line;
    if (!std::getline(in, line)) throw DataError(fmt::format("{}: empty file", path.string()));
    strip_cr(line);
    table.header_ = split(line);
    for (std::size_t i = 0; i < table.header_.size(); ++i) table.index_[table.header_[i]] = static_cast<int>(i);
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        strip_cr(line);
        if (line.empty()) continue;
        auto cells = split(line);
        if (cells.size() != table.header_.size()) {
            throw DataError(fmt::format("{}:{}: expected {} columns, found {}", path.string(), row,
                                        table.header_.size(), cells.size()));
        }
        table.rows_.push_back(std::move(cells));
    }
    return table;
}

int CsvTable::column(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw DataError(fmt::format("{}: missing column '{}'", path_.string(), name));
    return it->second;
}

const std::string& CsvTable::text(std::size_t row, const std::string& col) const {
    return rows_.at(row)[column(col)];
}

double CsvTable::number(std::size_t row, const std::string& col) const {
    const std::string& cell = text(row, col);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw DataError(fmt::format("{}:{}: column '{}' is not a number: '{}'", path_.string(), row + 2, col, cell));
    }
    return value;
}

long long CsvTable::integer(std::size_t row, const std::string& col) const {
    const std::string& cell = text(row, col);
    long long value = 0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw DataError(
            fmt::format("{}:{}: column '{}' is not an integer: '{}'", path_.string(), row + 2, col, cell));
    }
    return value;
}

std::string exact(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("{}: cannot write file", path.string()));
    out << content;
    if (!out) throw std::runtime_error(fmt::format("{}: write failed", path.string()));
}

}  // namespace frp
