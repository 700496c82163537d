#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fastcharge/lifecycle.hpp"

namespace fastcharge {

inline constexpr const char* trace_header = "t_s,I_A,V_V,SoC,SoH,eta_side_V,L_sei_m,c_dli";

/// One trace row in the fixed trace column order and precision.
std::string format_trace_row(const TraceRow& r);

/// Throws EmptySeries for an empty trace and IoError on write failure.
void write_trace(const Trace& trace, const std::filesystem::path& path);
Trace read_trace(const std::filesystem::path& path);

/// Plain comma-separated table; cells must not contain commas or newlines.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a named column; throws ConfigError when absent.
    std::size_t column(const std::string& name) const;
};

/// LF line endings, no quoting. Throws EmptySeries when there are no rows.
void write_csv(const CsvTable& table, const std::filesystem::path& path);
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace fastcharge
