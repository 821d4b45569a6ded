#pragma once

#include <stdexcept>
#include <string>

namespace normreg {

/// Shape of an argument does not match what the operation expects.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A numeric parameter is outside its admissible range.
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A structural precondition on the data is violated (e.g. not upper triangular).
struct ContractError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// The input is too large for an exhaustive routine.
struct CapacityError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// I/O or format failure when reading/writing matrices, masks, or reports.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace normreg
