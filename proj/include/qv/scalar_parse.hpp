#pragma once

#include "qv/ratfunc.hpp"

namespace qv {

/* Literal grammar for field elements:
 *   expr   := term (('+'|'-') term)*
 *   term   := unary (('*'|'/') unary)*
 *   unary  := '-' unary | power
 *   power  := atom ('^' uint)?
 *   atom   := uint | 'i' | 'z' | 't' | '(' expr ')'
 * 'z' is the primitive m-th root of unity, 'i' requires 4 | m. */

struct ParseError : std::runtime_error {
  size_t pos;
  ParseError(const std::string& msg, size_t pos_)
      : std::runtime_error(msg + " at position " + std::to_string(pos_)), pos(pos_) {}
};

RatFunc parse_scalar(const std::string& text, int conductor);

}  // namespace qv
