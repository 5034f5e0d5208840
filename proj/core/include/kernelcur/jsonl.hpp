#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace kernelcur {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

// Calls `on_line(object, line_number)` for every non-blank line of a
// line-delimited JSON file. Lines that are not JSON objects raise ParseError.
void for_each_json_line(const std::filesystem::path& path,
                        const std::function<void(Json&&, std::size_t)>& on_line);

std::vector<std::string> read_lines(const std::filesystem::path& path);

// Writes `content` to a sibling temp file and renames it over `path`, so a
// reader never observes a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Compact, key-order-preserving serialization used for every output line.
std::string dump_line(const OrderedJson& object);

// Typed field accessors that raise ParseError-friendly messages.
namespace field {

const Json& require(const Json& object, std::string_view key);
std::string string(const Json& object, std::string_view key);
std::int64_t integer(const Json& object, std::string_view key);
double real(const Json& object, std::string_view key);

}  // namespace field

}  // namespace kernelcur
