#pragma once

#include <stdexcept>
#include <string>

namespace flexbelt {

// Base class of every error raised by the library. The kind() string is the
// stable machine-readable name used in reports and CLI diagnostics.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define FLEXBELT_ERROR(Name)                                                  \
    class Name : public Error {                                               \
    public:                                                                   \
        explicit Name(const std::string& what) : Error(#Name, what) {}        \
    };

FLEXBELT_ERROR(InvalidInput)
FLEXBELT_ERROR(DegenerateEdge)
FLEXBELT_ERROR(DegenerateVertex)
FLEXBELT_ERROR(DegenerateIsogram)
FLEXBELT_ERROR(NoAdmissibleSolution)
FLEXBELT_ERROR(NoRealClosure)
FLEXBELT_ERROR(NormalizationFailed)
FLEXBELT_ERROR(NoConvergence)
FLEXBELT_ERROR(PoleNotRepresentable)
FLEXBELT_ERROR(DegenerateDenominator)
FLEXBELT_ERROR(NonRealSolution)
FLEXBELT_ERROR(ClosureViolation)
FLEXBELT_ERROR(InconsistentTemplate)
FLEXBELT_ERROR(NoNontrivialSolution)
FLEXBELT_ERROR(SchemaError)

#undef FLEXBELT_ERROR

// Raised when a requested driving sample lies outside the real motion range.
class RangeExceeded : public Error {
public:
    RangeExceeded(const std::string& what, double lo, double hi)
        : Error("RangeExceeded", what), lo_(lo), hi_(hi) {}

    double lower() const noexcept { return lo_; }
    double upper() const noexcept { return hi_; }

private:
    double lo_;
    double hi_;
};

// Raised when the parallelism nullspace is larger than translations + scaling.
class AmbiguousSolution : public Error {
public:
    AmbiguousSolution(const std::string& what, int dimension)
        : Error("AmbiguousSolution", what), dimension_(dimension) {}

    int dimension() const noexcept { return dimension_; }

private:
    int dimension_;
};

} // namespace flexbelt
