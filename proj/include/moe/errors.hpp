#pragma once

#include <stdexcept>
#include <string>

namespace moe {

/// Caller broke a documented precondition (bad dimensions, invalid sizes, ...).
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A function was evaluated outside its domain, e.g. log|x| at x = 0.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A derived quantity left its admissible range (negative mass, nonpositive denominator).
class RangeError : public std::range_error {
public:
    using std::range_error::range_error;
};

/// A numerical check could not reach a verdict.
class InconclusiveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define MOE_REQUIRE(cond, msg)                                  \
    do {                                                        \
        if (!(cond)) throw ::moe::ContractViolation(msg);       \
    } while (0)

} // namespace moe
