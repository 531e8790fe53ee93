#pragma once

#include <stdexcept>
#include <string>

#include "momentcert/pop.hpp"

namespace momentcert {

struct ParseError : std::runtime_error {
  int line = 0, column = 0;
  ParseError(int l, int c, const std::string& msg)
      : std::runtime_error("parse error at " + std::to_string(l) + ":" + std::to_string(c) + ": " + msg),
        line(l),
        column(c) {}
};

/// Parses the `.pop` text format:
///   vars <ident>+
///   min <expr>
///   h: <expr> == 0        (zero or more)
///   g: <expr> >= 0        (zero or more)
/// Expressions support + - * / ^, parentheses, and integer / rational /
/// decimal literals; all literals become exact rationals (0.5 -> 1/2).
/// '#' starts a comment through end of line.
POPInstance parse_pop(const std::string& text, const std::string& name = "");

/// Deterministic inverse of parse_pop up to whitespace: terms print in
/// descending grevlex order with exact rational coefficients.
std::string print_pop(const POPInstance& pop);

POPInstance load_pop_file(const std::string& path);

}  // namespace momentcert
