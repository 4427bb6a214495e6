#pragma once

#include <stdexcept>
#include <string>

namespace squidsim {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numeric input was NaN or infinite.
class NonFinite : public Error {
public:
    using Error::Error;
};

// -- current-phase relation solvers ------------------------------------------

class NoSolutionOnBranch : public Error {
public:
    using Error::Error;
};
class SeedFailure : public Error {
public:
    using Error::Error;
};
class EmptyValidRange : public Error {
public:
    using Error::Error;
};
class OutOfRange : public Error {
public:
    using Error::Error;
};

// -- SQUID response -----------------------------------------------------------

class SingularInductance : public Error {
public:
    using Error::Error;
};
class BranchTerminated : public Error {
public:
    using Error::Error;
};
class NonPhysical : public Error {
public:
    using Error::Error;
};
class NoStableBranch : public Error {
public:
    using Error::Error;
};

// -- anharmonicity and pumped response ----------------------------------------

class DegenerateSlope : public Error {
public:
    using Error::Error;
};
class ConstraintFailure : public Error {
public:
    using Error::Error;
};
class CapExceeded : public Error {
public:
    using Error::Error;
};
class ComplexRoot : public Error {
public:
    using Error::Error;
};
class NegativeResult : public Error {
public:
    using Error::Error;
};

// -- transmission traces and fitting -------------------------------------------

class GridMismatch : public Error {
public:
    using Error::Error;
};
class ZeroBackground : public Error {
public:
    using Error::Error;
};
class NoResonanceFound : public Error {
public:
    using Error::Error;
};
class NonConvergence : public Error {
public:
    using Error::Error;
};

// -- estimation pipeline --------------------------------------------------------

class AmbiguousJumps : public Error {
public:
    using Error::Error;
};
class InsufficientArcs : public Error {
public:
    using Error::Error;
};
class TableRangeExceeded : public Error {
public:
    using Error::Error;
};
class FitDivergence : public Error {
public:
    using Error::Error;
};

// -- input/output ----------------------------------------------------------------

class IoError : public Error {
public:
    using Error::Error;
};
class ValidationError : public Error {
public:
    using Error::Error;
};

} // namespace squidsim
