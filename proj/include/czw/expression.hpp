#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "czw/common.hpp"
#include "czw/grid.hpp"

namespace czw {

// Syntax or name error in an expression; column is 1-based.
class ParseError : public ConfigError {
public:
    ParseError(const std::string& msg, int column);
    int column() const { return column_; }

private:
    int column_;
};

// Grammar (whitespace ignored):
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := ('-' | '+') factor | atom ('^' ['-'] number)?
//   atom   := number | 'x' | 'y' | 'pi' | func '(' expr (',' expr)* ')' | '(' expr ')'
// Functions: exp log sqrt sin cos tan tanh abs bump (one argument), min max (two).
// bump(x) = exp(1/(x^2 - 1/4)) for |x| < 1/2 and 0 otherwise.
class Expression {
public:
    struct Node;

    double operator()(double x, double y = 0.0) const;
    ScalarField field() const;
    const std::string& text() const { return text_; }

private:
    friend Expression parse_expression(std::string_view text, int dims);
    std::shared_ptr<const Node> root_;
    std::string text_;
};

// dims = 1 allows only x; dims = 2 allows x and y.
Expression parse_expression(std::string_view text, int dims = 1);

double bump_profile(double x);

}  // namespace czw
