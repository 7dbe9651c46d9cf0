#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace finmb {

// Floating-point fields are serialized with 17 significant digits so a
// parse of our own output reproduces every double bit for bit.
std::string format_double(double v);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

// Two-column delimited table with a one-line header.
void write_table(const std::filesystem::path& path, const std::string& header,
                 const std::vector<std::pair<double, double>>& rows);
void write_table(const std::filesystem::path& path, const std::string& header,
                 const std::vector<std::pair<std::int64_t, double>>& rows);
void write_table(const std::filesystem::path& path, const std::string& header,
                 const std::vector<std::pair<double, std::uint64_t>>& rows);
void write_table(const std::filesystem::path& path, const std::string& header,
                 const std::vector<std::pair<std::uint64_t, std::uint64_t>>& rows);

// Reads a two-column table, skipping a non-numeric header line if present.
// Comma or tab delimited.
std::vector<std::pair<double, double>> read_two_column(const std::filesystem::path& path);

// JSON sidecar next to a table: <table path> + ".json".
std::filesystem::path sidecar_path(const std::filesystem::path& table_path);
void write_sidecar(const std::filesystem::path& table_path, const nlohmann::json& meta);
nlohmann::json read_json_file(const std::filesystem::path& path);

// FNV-1a 64-bit hash of a byte string, hex encoded; used for manifest
// config/input fingerprints.
std::string fnv1a_hex(const std::string& bytes);
std::string hash_file(const std::filesystem::path& path);

} // namespace finmb
