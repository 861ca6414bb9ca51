#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

namespace frp {

/// Minimal reader for the comma-separated files this project writes: one
/// header row, no quoting, no embedded commas.
class CsvTable {
public:
    static CsvTable read(const std::filesystem::path& path);

    const std::vector<std::string>& header() const { return header_; }
    std::size_t rows() const { return rows_.size(); }
    int column(const std::string& name) const;
    bool has_column(const std::string& name) const { return index_.count(name) > 0; }

    const std::string& text(std::size_t row, const std::string& col) const;
    double number(std::size_t row, const std::string& col) const;
    long long integer(std::size_t row, const std::string& col) const;

private:
    std::filesystem::path path_;
    std::vector<std::string> header_;
    std::unordered_map<std::string, int> index_;
    std::vector<std::vector<std::string>> rows_;
};

/// Shortest text that parses back to exactly the same double.
std::string exact(double value);

/// Writes `content` to `path`, creating parent directories. Throws
/// std::runtime_error if the file cannot be written.
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace frp
