#pragma once

/** \file csv.hpp
 *
 *  \brief Deterministic CSV tables with a .meta.json sidecar, written atomically.
 *
 *  Numbers are printed with 17 significant digits in the C locale, so a value
 *  read back with strtod is the same double that was written.
 */

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

namespace helix::cli {

/// 17 significant digits, shortest exponent form chosen by to_chars.
inline std::string format_number(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

/// Shortest round-trip form; used in file names and for mass labels.
inline std::string format_short(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string format_bool(bool b) { return b ? "true" : "false"; }

class CsvTable
{
  public:
    explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    /// Starts a new row; cells are appended with the add_* helpers.
    CsvTable& row()
    {
        rows_.emplace_back();
        rows_.back().reserve(columns_.size());
        return *this;
    }

    CsvTable& add(double v)
    {
        rows_.back().push_back(format_number(v));
        return *this;
    }
    CsvTable& add(int v)
    {
        rows_.back().push_back(std::to_string(v));
        return *this;
    }
    CsvTable& add(std::size_t v)
    {
        rows_.back().push_back(std::to_string(v));
        return *this;
    }
    CsvTable& add(bool v)
    {
        rows_.back().push_back(format_bool(v));
        return *this;
    }
    CsvTable& add(std::string_view v)
    {
        rows_.back().emplace_back(v);
        return *this;
    }
    CsvTable& add(const char* v) { return add(std::string_view(v)); }
    CsvTable& add(std::optional<double> v)
    {
        rows_.back().push_back(v ? format_number(*v) : std::string{});
        return *this;
    }
    CsvTable& blank()
    {
        rows_.back().emplace_back();
        return *this;
    }

    [[nodiscard]] const std::vector<std::string>& columns() const { return columns_; }
    [[nodiscard]] std::size_t size() const { return rows_.size(); }

    [[nodiscard]] std::string str() const
    {
        std::string out;
        append_line(out, columns_);
        for (const auto& r : rows_) {
            if (r.size() != columns_.size()) {
                throw std::logic_error("CSV row width does not match header");
            }
            append_line(out, r);
        }
        return out;
    }

  private:
    static void append_line(std::string& out, const std::vector<std::string>& cells)
    {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) {
                out += ',';
            }
            out += cells[i];
        }
        out += '\n';
    }

    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

/// Writes through a sibling temporary file and renames it into place.
inline void write_atomic(const std::filesystem::path& path, std::string_view content)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw std::runtime_error("short write to " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

inline std::filesystem::path meta_path(const std::filesystem::path& csv)
{
    auto p = csv;
    p += ".meta.json";
    return p;
}

/// Emits `dir/file` plus its sidecar. The sidecar holds no timestamps so reruns are byte-identical.
inline void write_table(const std::filesystem::path& dir, const std::string& file,
                        const CsvTable& table, std::string_view command,
                        const nlohmann::ordered_json& config,
                        const nlohmann::ordered_json& extra = nlohmann::ordered_json::object())
{
    std::filesystem::create_directories(dir);
    const auto path = dir / file;
    nlohmann::ordered_json meta;
    meta["command"] = command;
    meta["file"] = file;
    meta["columns"] = table.columns();
    meta["rows"] = table.size();
    meta["config"] = config;
    for (auto it = extra.begin(); it != extra.end(); ++it) {
        meta[it.key()] = it.value();
    }
    write_atomic(path, table.str());
    write_atomic(meta_path(path), meta.dump(2) + "\n");
}

/// Header-indexed view of a CSV file written by CsvTable.
struct CsvData
{
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    [[nodiscard]] std::size_t column(std::string_view name) const
    {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (columns[i] == name) {
                return i;
            }
        }
        throw std::runtime_error("missing CSV column '" + std::string(name) + "'");
    }
};

inline std::vector<std::string> split_csv_line(std::string_view line)
{
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        cells.emplace_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return cells;
}

inline CsvData read_csv(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    CsvData data;
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error(path.string() + " is empty");
    }
    data.columns = split_csv_line(line);
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        auto cells = split_csv_line(line);
        if (cells.size() != data.columns.size()) {
            throw std::runtime_error("ragged row in " + path.string());
        }
        data.rows.push_back(std::move(cells));
    }
    return data;
}

/// strtod-exact parse of a cell; empty cells read as nullopt.
inline std::optional<double> parse_cell(const std::string& cell)
{
    if (cell.empty()) {
        return std::nullopt;
    }
    double v = 0.0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
        throw std::runtime_error("not a number: '" + cell + "'");
    }
    return v;
}

} // namespace helix::cli
