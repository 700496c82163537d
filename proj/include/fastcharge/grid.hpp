#pragma once

#include <vector>

#include "fastcharge/parameters.hpp"

namespace fastcharge {

struct GridResolution {
    int n_r_neg{20};
    int n_r_pos{20};
    int n_x_neg{10};
    int n_x_sep{5};
    int n_x_pos{10};
};

/// Uniform finite-volume partition of one spherical particle.
struct RadialGrid {
    double radius{};
    std::vector<double> centers;  // m
    std::vector<double> widths;   // m, sum to radius
    std::vector<double> faces;    // m, n+1 entries from 0 to radius
    std::vector<double> volumes;  // m^3 of each spherical shell

    int size() const { return static_cast<int>(centers.size()); }
    double dr() const { return widths.front(); }
    double particle_volume() const;
};

enum class Region { negative, separator, positive };

/// Through-thickness finite-volume grid over negative | separator | positive.
struct AxialGrid {
    std::vector<double> centers;
    std::vector<double> widths;
    std::vector<Region> region;
    std::vector<double> porosity;
    int n_neg{}, n_sep{}, n_pos{};

    int size() const { return static_cast<int>(centers.size()); }
    int first_positive() const { return n_neg + n_sep; }
};

struct SpatialGrid {
    GridResolution resolution;
    RadialGrid r_neg;
    RadialGrid r_pos;
    AxialGrid x;

    const RadialGrid& radial(Electrode e) const { return e == Electrode::negative ? r_neg : r_pos; }
};

RadialGrid build_radial_grid(double radius, int n);
SpatialGrid build_grid(const CellParameters& params, const GridResolution& resolution = {});

}  // namespace fastcharge
