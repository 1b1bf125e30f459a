#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace linrule {

// Comma-separated table with a header row. Fields containing a comma, quote
// or newline are quoted on output; lines end in LF.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Index of a header column; throws ConfigError when absent.
    [[nodiscard]] std::size_t column(std::string_view name) const;
};

// 17 significant digits, '.' decimal; "inf", "-inf", "nan" for non-finite values.
[[nodiscard]] std::string format_number(double v);
// Inverse of format_number; throws ConfigError on malformed text.
[[nodiscard]] double parse_number(std::string_view text);

[[nodiscard]] std::string to_csv(const CsvTable& table);
[[nodiscard]] CsvTable parse_csv(std::string_view text);

// Throws IoError.
void write_csv(const std::filesystem::path& path, const CsvTable& table);
[[nodiscard]] CsvTable read_csv(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace linrule
