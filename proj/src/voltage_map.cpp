#include "fastcharge/voltage_map.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "fastcharge/errors.hpp"
#include "fastcharge/text_util.hpp"

namespace fastcharge {

bool VoltageSohMap::is_valid(double v_low, double v_high) const
{
    if (points.empty()) return false;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto [soh, v] = points[i];
        if (!(v >= v_low && v <= v_high)) return false;
        if (i > 0 && !(soh < points[i - 1].first && v >= points[i - 1].second)) return false;
    }
    return true;
}

double lookup_vmax(const VoltageSohMap& map, double soh, bool* clamped)
{
    if (map.empty()) throw EmptyMap("voltage-SoH map has no knots");
    const auto& p = map.points;
    if (clamped) *clamped = soh > p.front().first || soh < p.back().first;
    if (soh >= p.front().first) return p.front().second;
    if (soh <= p.back().first) return p.back().second;
    for (std::size_t i = 1; i < p.size(); ++i) {
        if (soh >= p[i].first) {
            const auto [s0, v0] = p[i - 1];
            const auto [s1, v1] = p[i];
            return v0 + (v1 - v0) * (soh - s0) / (s1 - s0);
        }
    }
    return p.back().second;
}

std::vector<double> isotonic_non_decreasing(const std::vector<double>& y,
                                            const std::vector<double>& weights)
{
    struct Block {
        double mean, weight;
        std::size_t count;
    };
    std::vector<Block> blocks;
    for (std::size_t i = 0; i < y.size(); ++i) {
        blocks.push_back({y[i], weights.empty() ? 1.0 : weights[i], 1});
        while (blocks.size() > 1 && blocks[blocks.size() - 2].mean > blocks.back().mean) {
            const Block b = blocks.back();
            blocks.pop_back();
            Block& a = blocks.back();
            a.mean = (a.mean * a.weight + b.mean * b.weight) / (a.weight + b.weight);
            a.weight += b.weight;
            a.count += b.count;
        }
    }
    std::vector<double> out;
    out.reserve(y.size());
    for (const auto& b : blocks) out.insert(out.end(), b.count, b.mean);
    return out;
}

VoltageSohMap regularize_map(const std::vector<std::pair<double, double>>& samples,
                             double bin_width, double v_low, double v_high)
{
    if (samples.empty()) throw EmptyMap("no samples to build a voltage-SoH map from");
    // each sample goes to the nearest knot 1 - k w
    std::map<long, std::pair<double, int>> bins;
    for (const auto& [soh, v] : samples) {
        const long k = std::max(0L, std::lround((1.0 - soh) / bin_width));
        auto& b = bins[k];
        b.first += v;
        b.second += 1;
    }
    std::vector<double> soh, volts, weights;
    for (const auto& [k, b] : bins) {
        soh.push_back(1.0 - bin_width * static_cast<double>(k));
        volts.push_back(b.first / b.second);
        weights.push_back(b.second);
    }
    const auto fitted = isotonic_non_decreasing(volts, weights);
    VoltageSohMap map;
    for (std::size_t i = 0; i < soh.size(); ++i)
        map.points.emplace_back(soh[i], std::clamp(fitted[i], v_low, v_high));
    return map;
}

void write_map(const VoltageSohMap& map, const std::filesystem::path& path)
{
    if (map.empty()) throw EmptySeries("refusing to write an empty voltage-SoH map");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "soh,v_cutoff\n";
    for (const auto& [soh, v] : map.points) out << format("%.6g,%.6g\n", soh, v);
    if (!out) throw IoError("write failed for " + path.string());
}

VoltageSohMap read_map(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || trim(line) != "soh,v_cutoff")
        throw ConfigError(path.string() + ": expected header 'soh,v_cutoff'");
    VoltageSohMap map;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cols = split(line, ',');
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (cols.size() != 2) throw ConfigError(where + ": expected two columns");
        map.points.emplace_back(parse_double(cols[0], where), parse_double(cols[1], where));
    }
    if (map.empty()) throw EmptyMap(path.string() + " has no knots");
    if (!map.is_valid()) throw ConfigError(path.string() + ": knots must have decreasing soh and non-decreasing v_cutoff");
    return map;
}

}  // namespace fastcharge
