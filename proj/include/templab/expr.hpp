#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "templab/errors.hpp"

namespace templab {

// Small arithmetic expression language for declaring custom systems.
//
// Grammar (whitespace insensitive):
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := ('+' | '-') factor | power
//   power  := atom ('^' factor)?            right associative
//   atom   := number | 'u'<digits> | 'exp' '(' expr ')' | '(' expr ')'
//
// State components are u1..un (1-based). Numbers are ordinary C++ doubles.
class Expr {
public:
    virtual ~Expr() = default;
    virtual double eval(const Eigen::VectorXd& u) const = 0;
};

using ExprPtr = std::shared_ptr<const Expr>;

// Parses `text` into an expression over n state components.
// Throws ParseError with a message carrying 1-based column (and the
// offending token) on malformed input; `where` prefixes the message so
// config loaders can report the field path.
ExprPtr parse_expr(const std::string& text, int n, const std::string& where = "");

} // namespace templab
