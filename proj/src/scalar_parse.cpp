#include "qv/scalar_parse.hpp"

#include <cctype>

namespace qv {

namespace {

class Parser {
 public:
  Parser(const std::string& text, int m) : s_(text), m_(m) {}

  RatFunc run() {
    RatFunc v = expr();
    skip_ws();
    if (pos_ < s_.size()) throw ParseError("unexpected trailing input", pos_);
    return v;
  }

 private:
  const std::string& s_;
  int m_;
  size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  RatFunc expr() {
    RatFunc v = term();
    while (true) {
      if (eat('+'))
        v = v + term();
      else if (eat('-'))
        v = v - term();
      else
        return v;
    }
  }

  RatFunc term() {
    RatFunc v = unary();
    while (true) {
      if (eat('*')) {
        v = v * unary();
      } else if (eat('/')) {
        size_t at = pos_;
        RatFunc d = unary();
        if (d.is_zero()) throw ParseError("division by zero", at);
        v = v / d;
      } else {
        return v;
      }
    }
  }

  RatFunc unary() {
    if (eat('-')) return -unary();
    return power();
  }

  RatFunc power() {
    RatFunc base = atom();
    if (!eat('^')) return base;
    skip_ws();
    size_t at = pos_;
    if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
      throw ParseError("expected a nonnegative integer exponent", at);
    unsigned long e = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      e = e * 10 + static_cast<unsigned long>(s_[pos_] - '0');
      if (e > 100000) throw ParseError("exponent too large", at);
      ++pos_;
    }
    RatFunc v(1);
    for (unsigned long k = 0; k < e; ++k) v = v * base;
    return v;
  }

  RatFunc atom() {
    skip_ws();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      mpz_class n(s_.substr(start, pos_ - start));
      return RatFunc(mpq_class(n));
    }
    if (c == 'i') {
      ++pos_;
      if (m_ % 4 != 0)
        throw ParseError("'i' needs a conductor divisible by 4", pos_ - 1);
      return RatFunc(CycRat::imag_unit(m_));
    }
    if (c == 'z') {
      ++pos_;
      return RatFunc(CycRat::zeta(m_));
    }
    if (c == 't') {
      ++pos_;
      return RatFunc::t();
    }
    if (c == '(') {
      ++pos_;
      RatFunc v = expr();
      if (!eat(')')) throw ParseError("expected ')'", pos_);
      return v;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }
};

}  // namespace

RatFunc parse_scalar(const std::string& text, int conductor) {
  Parser p(text, conductor);
  return p.run();
}

}  // namespace qv
