#pragma once

#include <stdexcept>
#include <string>

namespace fastcharge {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define FASTCHARGE_ERROR(Name)                 \
    class Name : public Error {                \
    public:                                    \
        using Error::Error;                    \
    }

// Configuration / file schema problems, with the offending key in the message.
FASTCHARGE_ERROR(ConfigError);
FASTCHARGE_ERROR(IoError);

// numerics
FASTCHARGE_ERROR(NonConvergence);
FASTCHARGE_ERROR(PhysicalBoundViolation);

// cell model
FASTCHARGE_ERROR(BoundViolation);
FASTCHARGE_ERROR(NonPositiveExchangeCurrent);
FASTCHARGE_ERROR(ClampFloorHit);

// degradation
FASTCHARGE_ERROR(ZeroThickness);

// controllers
FASTCHARGE_ERROR(EmptyMap);

// rl
FASTCHARGE_ERROR(Underfilled);

// lifecycle / io
FASTCHARGE_ERROR(BudgetExceeded);
FASTCHARGE_ERROR(EmptySeries);

#undef FASTCHARGE_ERROR

}  // namespace fastcharge
