#pragma once

#include <span>
#include <vector>

namespace fastcharge {

/// Shape-preserving piecewise cubic Hermite interpolant (Fritsch-Carlson
/// slopes). Monotone data gives a monotone curve; evaluation outside the
/// knot range is clamped to the end values.
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> x, std::vector<double> y);

    double operator()(double x) const;

    bool empty() const { return x_.empty(); }
    std::span<const double> xs() const { return x_; }
    std::span<const double> ys() const { return y_; }
    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

    /// True when the knot values are strictly monotone (either direction).
    bool is_monotone() const;

private:
    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> slope_;
};

}  // namespace fastcharge
