#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace safewb {

// Base class for all errors raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

// A value that must be finite was NaN or infinite.
struct NonFiniteValue : Error {
    using Error::Error;
};

// A constraint row (or other vector required to be nonzero) fell below the
// rank tolerance. Carries the offending row index when known.
struct DegenerateRow : Error {
    explicit DegenerateRow(std::size_t row, const std::string& what)
        : Error(what), row_index(row) {}
    std::size_t row_index;
};

struct SingularSystem : Error {
    using Error::Error;
};

struct IterationLimit : Error {
    using Error::Error;
};

struct PivotBreakdown : Error {
    using Error::Error;
};

struct TooManyConstraints : Error {
    using Error::Error;
};

struct PointOffLink : Error {
    using Error::Error;
};

// Obstacle center lies on the link segment; the contact normal is undefined.
struct DegenerateNormal : Error {
    using Error::Error;
};

struct SingularJacobian : Error {
    using Error::Error;
};

// Scene/config file problem. Carries a line number (0 = not line specific)
// and the offending field name for diagnostics.
struct ConfigError : Error {
    ConfigError(const std::string& what, std::size_t line = 0,
                std::string field = {})
        : Error(what), line_number(line), field_name(std::move(field)) {}
    std::size_t line_number;
    std::string field_name;
};

}  // namespace safewb
