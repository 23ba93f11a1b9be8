#include "asymlab/common.hpp"

#include <cctype>

namespace asym {

std::string to_string(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

namespace {

// [sign] digits [. digits] [e [sign] digits], converted exactly.
Rational parse_decimal(const std::string& s, const std::string& text) {
  std::size_t i = 0;
  bool negative = false;
  if (i < s.size() && (s[i] == '-' || s[i] == '+')) negative = s[i++] == '-';
  std::string digits;
  std::int64_t scale = 0;
  bool any = false;
  for (; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])); ++i, any = true) digits.push_back(s[i]);
  if (i < s.size() && s[i] == '.') {
    for (++i; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])); ++i, any = true) {
      digits.push_back(s[i]);
      --scale;
    }
  }
  if (!any) throw ParseError("bad rational: " + text);
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    bool exp_negative = false;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) exp_negative = s[i++] == '-';
    if (i == s.size()) throw ParseError("bad rational: " + text);
    std::int64_t e = 0;
    for (; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])); ++i) {
      e = e * 10 + (s[i] - '0');
      if (e > 4096) throw ParseError("exponent out of range: " + text);
    }
    scale += exp_negative ? -e : e;
  }
  if (i != s.size()) throw ParseError("bad rational: " + text);
  Rational r{BigInt(digits)};
  const BigInt ten_pow = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(scale < 0 ? -scale : scale));
  r = scale < 0 ? r / Rational(ten_pow) : r * Rational(ten_pow);
  return negative ? Rational(-r) : r;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  }
  if (s.empty()) throw ParseError("empty rational");
  const auto slash = s.find('/');
  auto parse_int = [&](const std::string& part) {
    if (part.empty()) throw ParseError("bad rational: " + text);
    std::size_t i = (part[0] == '-' || part[0] == '+') ? 1 : 0;
    if (i == part.size()) throw ParseError("bad rational: " + text);
    for (; i < part.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(part[i]))) throw ParseError("bad rational: " + text);
    }
    return BigInt(part[0] == '+' ? part.substr(1) : part);
  };
  if (slash == std::string::npos && s.find_first_of(".eE") != std::string::npos) return parse_decimal(s, text);
  if (slash == std::string::npos) return Rational(parse_int(s));
  const BigInt den = parse_int(s.substr(slash + 1));
  if (den == 0) throw ParseError("zero denominator: " + text);
  return Rational(parse_int(s.substr(0, slash)), den);
}

}  // namespace asym
