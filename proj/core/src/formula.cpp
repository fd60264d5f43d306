#include "plkit/formula.hpp"

#include <cctype>
#include <cstdlib>

#include "json.hpp"

namespace plkit {

namespace {

struct Rational {
  Polynomial n;
  Polynomial d = Polynomial::constant(1.0);
};

Rational add(const Rational& a, const Rational& b, double sign) {
  if (a.d == b.d) return {a.n + b.n * CPoint(sign), a.d};
  return {a.n * b.d + b.n * a.d * CPoint(sign), a.d * b.d};
}

Rational mul(const Rational& a, const Rational& b) { return {a.n * b.n, a.d * b.d}; }

Rational divide(const Rational& a, const Rational& b) {
  if (b.n.is_zero()) throw Error(ErrorCode::ParseError, "division by zero");
  return {a.n * b.d, a.d * b.n};
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  Rational parse() {
    Rational r = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return r;
  }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::ParseError, msg + " at position " + std::to_string(pos_));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  char peek() {
    skip();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  bool starts_atom() {
    const char c = peek();
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == 'z' || c == 'i' || c == '(';
  }

  Rational expr() {
    Rational r = term();
    while (true) {
      const char c = peek();
      if (c != '+' && c != '-') return r;
      ++pos_;
      r = add(r, term(), c == '+' ? 1.0 : -1.0);
    }
  }

  Rational term() {
    Rational r = unary();
    while (true) {
      const char c = peek();
      if (c == '*') {
        ++pos_;
        r = mul(r, unary());
      } else if (c == '/') {
        ++pos_;
        r = divide(r, unary());
      } else if (starts_atom()) {
        r = mul(r, power());
      } else {
        return r;
      }
    }
  }

  Rational unary() {
    const char c = peek();
    if (c == '-') {
      ++pos_;
      Rational r = unary();
      return {r.n * CPoint(-1.0), r.d};
    }
    if (c == '+') {
      ++pos_;
      return unary();
    }
    return power();
  }

  Rational power() {
    Rational base = atom();
    if (peek() != '^') return base;
    ++pos_;
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("exponent must be a non-negative integer");
    const long e = std::strtol(s_.substr(start, pos_ - start).c_str(), nullptr, 10);
    if (e > 64) fail("exponent too large");
    Rational r{Polynomial::constant(1.0), Polynomial::constant(1.0)};
    for (long k = 0; k < e; ++k) r = mul(r, base);
    return r;
  }

  Rational atom() {
    const char c = peek();
    if (c == 'z') {
      ++pos_;
      return {Polynomial::monomial(1)};
    }
    if (c == 'i') {
      ++pos_;
      return {Polynomial::constant(CPoint(0.0, 1.0))};
    }
    if (c == '(') {
      ++pos_;
      Rational r = expr();
      if (peek() != ')') fail("missing ')'");
      ++pos_;
      return r;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      return {Polynomial::constant(v)};
    }
    if (c == '\0') fail("unexpected end of formula");
    fail("unexpected '" + std::string(1, c) + "'");
  }
};

Polynomial coeffs_from_json(const nlohmann::json& a) {
  std::vector<CPoint> c;
  for (const auto& v : a) {
    if (v.is_number()) {
      c.emplace_back(v.get<double>(), 0.0);
    } else if (v.is_array() && v.size() == 2) {
      c.emplace_back(v[0].get<double>(), v[1].get<double>());
    } else {
      throw Error(ErrorCode::ParseError, "coefficient must be a number or [re, im]");
    }
  }
  if (c.empty()) throw Error(ErrorCode::ParseError, "empty coefficient list");
  return Polynomial(std::move(c));
}

}  // namespace

MapSpec parse_map(const std::string& text) {
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw Error(ErrorCode::ParseError, "empty formula");
  Polynomial n, d;
  if (text[first] == '{') {
    try {
      const auto j = nlohmann::json::parse(text);
      n = coeffs_from_json(j.at("numerator"));
      d = j.contains("denominator") ? coeffs_from_json(j.at("denominator")) : Polynomial::constant(1.0);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, e.what());
    }
  } else {
    Parser p(text);
    Rational r = p.parse();
    n = r.n;
    d = r.d;
  }
  try {
    return MapSpec(n, d);
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

}  // namespace plkit
