#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "eicsr/expr.hpp"

namespace eicsr {

/// Parses the infix formula grammar:
///   identifiers x1..xd (1-based) or names from `columns`, decimal/scientific
///   literals, + - * / ^, calls sin cos tan exp log sqrt abs neg inv,
///   parentheses. Precedence ^ > unary-minus > * / > + -, ^ right-assoc.
/// A unary minus directly before a numeric literal folds into a negative
/// constant, so printed negative constants round-trip structurally.
/// Throws SyntaxError / UnknownSymbol.
Expr parse(std::string_view text, const std::vector<std::string>& columns = {});

/// Prints with minimal parentheses; parse(to_string(e)) is structurally
/// equal to e. Variables always print canonically as x1..xd.
std::string to_string(const Expr& e);

} // namespace eicsr
