#include "fastcharge/grid.hpp"

#include <numbers>
#include <string>

#include "fastcharge/errors.hpp"

namespace fastcharge {

double RadialGrid::particle_volume() const
{
    return 4.0 / 3.0 * std::numbers::pi * radius * radius * radius;
}

RadialGrid build_radial_grid(double radius, int n)
{
    if (!(radius > 0)) throw ConfigError("particle radius must be > 0");
    if (n < 3) throw ConfigError("radial node count must be >= 3, got " + std::to_string(n));
    RadialGrid g;
    g.radius = radius;
    g.faces.resize(n + 1);
    for (int i = 0; i <= n; ++i) g.faces[i] = radius * i / n;
    g.faces[n] = radius;
    for (int i = 0; i < n; ++i) {
        const double a = g.faces[i], b = g.faces[i + 1];
        g.centers.push_back(0.5 * (a + b));
        g.widths.push_back(b - a);
        g.volumes.push_back(4.0 / 3.0 * std::numbers::pi * (b * b * b - a * a * a));
    }
    return g;
}

namespace {

void append_region(AxialGrid& g, double start, double length, int n, Region r, double eps)
{
    for (int i = 0; i < n; ++i) {
        const double a = start + length * i / n;
        const double b = i + 1 == n ? start + length : start + length * (i + 1) / n;
        g.centers.push_back(0.5 * (a + b));
        g.widths.push_back(b - a);
        g.region.push_back(r);
        g.porosity.push_back(eps);
    }
}

}  // namespace

SpatialGrid build_grid(const CellParameters& p, const GridResolution& res)
{
    if (!(p.negative.thickness > 0) || !(p.separator_thickness > 0) || !(p.positive.thickness > 0))
        throw ConfigError("region thicknesses must be > 0");
    for (int n : {res.n_x_neg, res.n_x_sep, res.n_x_pos})
        if (n < 3) throw ConfigError("axial node count must be >= 3, got " + std::to_string(n));

    SpatialGrid g;
    g.resolution = res;
    g.r_neg = build_radial_grid(p.negative.particle_radius, res.n_r_neg);
    g.r_pos = build_radial_grid(p.positive.particle_radius, res.n_r_pos);
    g.x.n_neg = res.n_x_neg;
    g.x.n_sep = res.n_x_sep;
    g.x.n_pos = res.n_x_pos;
    append_region(g.x, 0.0, p.negative.thickness, res.n_x_neg, Region::negative,
                  p.negative.electrolyte_fraction);
    append_region(g.x, p.negative.thickness, p.separator_thickness, res.n_x_sep, Region::separator,
                  p.separator_fraction);
    append_region(g.x, p.negative.thickness + p.separator_thickness, p.positive.thickness,
                  res.n_x_pos, Region::positive, p.positive.electrolyte_fraction);
    return g;
}

}  // namespace fastcharge
