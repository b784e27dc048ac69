#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace resokit::detail {

std::string_view trim(std::string_view s);
std::vector<std::string_view> split_whitespace(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);
std::string to_upper(std::string_view s);
/// Whole-token parse; nullopt on trailing garbage.
std::optional<double> parse_double(std::string_view token);

/// Both throw Error{IoError} naming the path.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace resokit::detail

namespace resokit::detail {

/// RFC 4180 quoting when the field contains a comma, quote or newline.
std::string csv_field(std::string_view s);

}  // namespace resokit::detail
