#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace fastcharge {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct Chart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    bool reverse_x{};  // e.g. SoH decreasing to the right
};

/// Static SVG line chart with axes, ticks and a legend. Throws EmptySeries
/// when no series has a point.
std::string render_svg(const Chart& chart, int width = 720, int height = 440);
void write_svg(const Chart& chart, const std::filesystem::path& path);

/// "Nice" tick positions covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi, int target = 6);

/// Renders every recognised CSV in `dir` (map, training log, comparison
/// report files, traces) to SVG files next to it; returns the files written.
std::vector<std::filesystem::path> plot_directory(const std::filesystem::path& dir);
/// Renders one recognised CSV file; returns the files written.
std::vector<std::filesystem::path> plot_file(const std::filesystem::path& csv);

}  // namespace fastcharge
