#include "fastcharge/csv.hpp"

#include <fstream>

#include "fastcharge/errors.hpp"
#include "fastcharge/text_util.hpp"

namespace fastcharge {

std::string format_trace_row(const TraceRow& r)
{
    return format("%.3f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6e,%.6e", r.t_s, r.current, r.voltage, r.soc, r.soh,
                  r.eta_side, r.sei_thickness, r.dead_li);
}

void write_trace(const Trace& trace, const std::filesystem::path& path)
{
    if (trace.empty()) throw EmptySeries("refusing to write an empty trace to " + path.string());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << trace_header << '\n';
    for (const auto& r : trace) out << format_trace_row(r) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

Trace read_trace(const std::filesystem::path& path)
{
    const CsvTable t = read_csv(path);
    std::string header;
    for (std::size_t k = 0; k < t.header.size(); ++k) header += (k ? "," : "") + t.header[k];
    if (header != trace_header) throw ConfigError(path.string() + ":1: unexpected trace header '" + header + "'");
    Trace trace;
    int n = 1;
    for (const auto& row : t.rows) {
        const std::string where = path.string() + ":" + std::to_string(++n);
        TraceRow r;
        r.t_s = parse_double(row[0], where);
        r.current = parse_double(row[1], where);
        r.voltage = parse_double(row[2], where);
        r.soc = parse_double(row[3], where);
        r.soh = parse_double(row[4], where);
        r.eta_side = parse_double(row[5], where);
        r.sei_thickness = parse_double(row[6], where);
        r.dead_li = parse_double(row[7], where);
        trace.push_back(r);
    }
    return trace;
}

std::size_t CsvTable::column(const std::string& name) const
{
    for (std::size_t k = 0; k < header.size(); ++k)
        if (header[k] == name) return k;
    throw ConfigError("csv: no column named '" + name + "'");
}

void write_csv(const CsvTable& table, const std::filesystem::path& path)
{
    if (table.rows.empty()) throw EmptySeries("refusing to write an empty table to " + path.string());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t k = 0; k < cells.size(); ++k) out << (k ? "," : "") << cells[k];
        out << '\n';
    };
    line(table.header);
    for (const auto& r : table.rows) {
        if (r.size() != table.header.size())
            throw ConfigError(path.string() + ": row width differs from header width");
        line(r);
    }
    if (!out) throw IoError("write failed: " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    CsvTable t;
    std::string raw;
    int n = 0;
    while (std::getline(in, raw)) {
        ++n;
        const auto line = trim(raw);
        if (line.empty()) continue;
        std::vector<std::string> cells;
        for (auto c : split(line, ',')) cells.emplace_back(trim(c));
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        if (cells.size() != t.header.size())
            throw ConfigError(format("%s:%d: expected %zu fields, found %zu", path.string().c_str(), n,
                                     t.header.size(), cells.size()));
        t.rows.push_back(std::move(cells));
    }
    if (t.header.empty()) throw ConfigError(path.string() + ": missing header");
    return t;
}

}  // namespace fastcharge
