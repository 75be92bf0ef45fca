#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace eicsr {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed formula text; `offset` is the byte position of the problem.
struct SyntaxError : Error {
    std::size_t offset;
    SyntaxError(const std::string& msg, std::size_t off)
        : Error(msg + " (at offset " + std::to_string(off) + ")"), offset(off) {}
};

struct UnknownSymbol : Error {
    std::size_t offset;
    UnknownSymbol(const std::string& name, std::size_t off)
        : Error("unknown symbol '" + name + "' (at offset " + std::to_string(off) + ")"),
          offset(off) {}
};

struct ArityError : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

struct InsufficientData : Error {
    using Error::Error;
};

struct BudgetZero : Error {
    using Error::Error;
};

struct FilterExhausted : Error {
    using Error::Error;
};

struct EmptyCorpus : Error {
    using Error::Error;
};

struct BinMismatch : Error {
    using Error::Error;
};

} // namespace eicsr
