#pragma once

#include <filesystem>
#include <utility>
#include <vector>

namespace fastcharge {

/// Charge cut-off voltage as a function of SoH. Knots are ordered by
/// strictly decreasing SoH with non-decreasing voltage.
struct VoltageSohMap {
    std::vector<std::pair<double, double>> points;  // (soh, v_cutoff)

    bool empty() const { return points.empty(); }
    bool is_valid(double v_low = 0.0, double v_high = 1e9) const;
};

/// Piecewise-linear lookup, clamped at the end knots. `clamped` reports
/// whether the SoH fell outside the knot range.
double lookup_vmax(const VoltageSohMap& map, double soh, bool* clamped = nullptr);

/// Pool-adjacent-violators fit of a non-decreasing sequence (equal weights
/// unless given).
std::vector<double> isotonic_non_decreasing(const std::vector<double>& y,
                                            const std::vector<double>& weights = {});

/// Bins (soh, v) samples into 1 % SoH knots, enforces monotonicity and clips
/// to the safe band.
VoltageSohMap regularize_map(const std::vector<std::pair<double, double>>& samples,
                             double bin_width, double v_low, double v_high);

void write_map(const VoltageSohMap& map, const std::filesystem::path& path);
VoltageSohMap read_map(const std::filesystem::path& path);

}  // namespace fastcharge
