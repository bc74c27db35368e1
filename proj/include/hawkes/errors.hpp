#pragma once

#include <stdexcept>
#include <string>

namespace hawkes {

// A kernel with total mass >= 1; the branching population would not die out.
struct NotSubcriticalError : std::domain_error {
    explicit NotSubcriticalError(double l1)
        : std::domain_error("kernel l1 norm " + std::to_string(l1) + " is not < 1") {}
};

// Delay sampling from a kernel with no mass.
struct ZeroKernelError : std::domain_error {
    ZeroKernelError() : std::domain_error("cannot sample a delay from a zero kernel") {}
};

// Argument outside the region where the requested quantity is defined/finite.
struct OutOfDomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Series evaluation requested exactly at a pole.
struct PoleError : std::domain_error {
    explicit PoleError(double where)
        : std::domain_error("evaluation at a pole (s/theta = " + std::to_string(where) + ")"),
          location(where) {}
    double location;
};

struct UnsortedInputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A regeneration report paired with a path it was not computed from.
struct MismatchedReportError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Window length must exceed the pair-kernel support.
struct SupportViolationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Averaging interval extends beyond the simulated horizon.
struct HorizonExceededError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InsufficientCyclesError : std::runtime_error {
    explicit InsufficientCyclesError(std::size_t n)
        : std::runtime_error("need at least 2 complete cycles, got " + std::to_string(n)) {}
};

// Shift relations evaluated where a denominator vanishes (s = 0).
struct DegenerateDenominatorError : std::domain_error {
    using std::domain_error::domain_error;
};

struct AlphaOutOfRangeError : std::domain_error {
    using std::domain_error::domain_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace hawkes
