#include "finmb/table_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "finmb/errors.hpp"

namespace finmb {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw data_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

std::string cell(double v) { return format_double(v); }
std::string cell(std::int64_t v) { return std::to_string(v); }
std::string cell(std::uint64_t v) { return std::to_string(v); }

template <typename A, typename B>
void write_table_impl(const std::filesystem::path& path, const std::string& header,
                      const std::vector<std::pair<A, B>>& rows) {
    std::string content;
    content.reserve(rows.size() * 24 + header.size() + 2);
    content += header;
    content += '\n';
    for (const auto& [a, b] : rows) {
        content += cell(a);
        content += ',';
        content += cell(b);
        content += '\n';
    }
    write_text_file(path, content);
}

} // namespace

void write_table(const std::filesystem::path& path, const std::string& header,
                 const std::vector<std::pair<double, double>>& rows) {
    write_table_impl(path, header, rows);
}
void write_table(const std::filesystem::path& path, const std::string& header,
                 const std::vector<std::pair<std::int64_t, double>>& rows) {
    write_table_impl(path, header, rows);
}
void write_table(const std::filesystem::path& path, const std::string& header,
                 const std::vector<std::pair<double, std::uint64_t>>& rows) {
    write_table_impl(path, header, rows);
}
void write_table(const std::filesystem::path& path, const std::string& header,
                 const std::vector<std::pair<std::uint64_t, std::uint64_t>>& rows) {
    write_table_impl(path, header, rows);
}

std::vector<std::pair<double, double>> read_two_column(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open: " + path.string());
    std::vector<std::pair<double, double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        for (char& c : line)
            if (c == '\t' || c == '\r') c = c == '\t' ? ',' : ' ';
        double a, b;
        if (std::sscanf(line.c_str(), "%lf,%lf", &a, &b) == 2) {
            rows.emplace_back(a, b);
        } else if (line_no != 1) {
            throw data_error(path.string() + ":" + std::to_string(line_no) +
                             ": expected two numeric columns");
        }
        // a non-numeric first line is the header
    }
    return rows;
}

std::filesystem::path sidecar_path(const std::filesystem::path& table_path) {
    return std::filesystem::path(table_path.string() + ".json");
}

void write_sidecar(const std::filesystem::path& table_path, const nlohmann::json& meta) {
    write_text_file(sidecar_path(table_path), meta.dump(2) + "\n");
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw data_error(path.string() + ": " + e.what());
    }
    return j;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string hash_file(const std::filesystem::path& path) { return fnv1a_hex(read_text_file(path)); }

} // namespace finmb
