#pragma once

#include <span>

namespace fastcharge {

/// Thomas algorithm. Row i reads lower[i]*x[i-1] + diag[i]*x[i] + upper[i]*x[i+1] = rhs[i];
/// lower[0] and upper[n-1] are ignored. Solution is written into rhs; diag is clobbered.
void solve_tridiagonal(std::span<const double> lower, std::span<double> diag,
                       std::span<const double> upper, std::span<double> rhs);

}  // namespace fastcharge
