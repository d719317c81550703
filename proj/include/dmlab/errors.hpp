#pragma once

#include <stdexcept>
#include <string>

namespace dmlab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DivisionByZero : Error {
    using Error::Error;
};

// Three or more coincident points handed to the cross ratio.
struct UnstableConfiguration : Error {
    using Error::Error;
};

// 0 * inf in a cocycle product.
struct Indeterminate : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

struct InvalidArgument : Error {
    using Error::Error;
};

// Point outside a chart domain; the message names the offending locus.
struct ChartDomainError : Error {
    using Error::Error;
};

}  // namespace dmlab
