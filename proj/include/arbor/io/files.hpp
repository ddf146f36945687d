#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

namespace arbor::io {

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

nlohmann::json read_json(const std::filesystem::path& path);
/// Two-space indented, trailing newline. Byte-stable for equal documents.
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace arbor::io
