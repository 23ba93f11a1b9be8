#include "asymlab/literals.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

namespace asym {

namespace {

class Cursor {
 public:
  explicit Cursor(const std::string& text) {
    for (char c : text) {
      if (!std::isspace(static_cast<unsigned char>(c))) s_.push_back(c);
    }
  }

  bool done() const { return pos_ == s_.size(); }
  bool peek(char c) const { return pos_ < s_.size() && s_[pos_] == c; }
  bool accept(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  bool accept_word(const std::string& w) {
    if (s_.compare(pos_, w.size(), w) != 0) return false;
    pos_ += w.size();
    return true;
  }
  std::int64_t integer() {
    std::size_t end = pos_;
    if (end < s_.size() && (s_[end] == '-' || s_[end] == '+')) ++end;
    while (end < s_.size() && std::isdigit(static_cast<unsigned char>(s_[end]))) ++end;
    std::int64_t v = 0;
    const char* first = s_.data() + pos_ + (peek('+') ? 1 : 0);
    auto [ptr, ec] = std::from_chars(first, s_.data() + end, v);
    if (ec != std::errc() || ptr != s_.data() + end || end == pos_) fail("expected integer");
    pos_ = end;
    return v;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what + " at offset " + std::to_string(pos_) + " in \"" + s_ + "\"");
  }

 private:
  std::string s_;
  std::size_t pos_ = 0;
};

std::pair<std::int64_t, std::int64_t> pair_literal(Cursor& c) {
  c.expect('(');
  const auto a = c.integer();
  c.expect(',');
  const auto b = c.integer();
  c.expect(')');
  return {a, b};
}

LaurentPoly2 support_list(Cursor& c) {
  c.expect('[');
  std::vector<Exponent> terms;
  if (!c.accept(']')) {
    do {
      const auto [t, s] = pair_literal(c);
      terms.push_back({t, s});
    } while (c.accept(','));
    c.expect(']');
  }
  std::vector<Exponent> sorted = terms;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) c.fail("duplicate exponent pair");
  return LaurentPoly2::from_terms(std::move(terms));
}

}  // namespace

LaurentPoly2 parse_support_literal(const std::string& text) {
  Cursor c(text);
  auto p = support_list(c);
  if (!c.done()) c.fail("trailing characters");
  return p;
}

std::string format_support_literal(const LaurentPoly2& p) {
  std::string s = "[";
  for (std::size_t i = 0; i < p.support().size(); ++i) {
    if (i) s += ",";
    s += "(" + std::to_string(p.support()[i].t) + "," + std::to_string(p.support()[i].s) + ")";
  }
  return s + "]";
}

SetSpec parse_set_spec(const std::string& text) {
  Cursor c(text);
  if (c.accept_word("character:")) {
    auto p = support_list(c);
    if (!c.done()) c.fail("trailing characters");
    return CharacterSet{Character{std::move(p)}};
  }
  if (c.accept_word("cylinder:")) {
    Cylinder cyl;
    std::set<std::pair<Cell, bool>> seen;
    c.expect('[');
    if (!c.accept(']')) {
      do {
        c.expect('(');
        const auto [z1, z2] = pair_literal(c);
        c.expect(',');
        const auto bit = c.integer();
        c.expect(')');
        if (bit != 0 && bit != 1) c.fail("cylinder value must be 0 or 1");
        if (z2 < 0) c.fail("cylinder cell must have z2 >= 0");
        cyl.constraints.push_back({{z1, z2}, bit == 1});
      } while (c.accept(','));
      c.expect(']');
    }
    if (!c.done()) c.fail("trailing characters");
    return cyl;
  }
  c.fail("expected 'character:' or 'cylinder:'");
}

Exponent parse_shift(const std::string& text) {
  Cursor c(text);
  const auto [t, s] = pair_literal(c);
  if (!c.done()) c.fail("trailing characters");
  return {t, s};
}

std::string format_set_spec(const SetSpec& spec) {
  if (const auto* cs = std::get_if<CharacterSet>(&spec)) return "character: " + format_support_literal(cs->chi.poly);
  const auto& cyl = std::get<Cylinder>(spec);
  std::string s = "cylinder: [";
  for (std::size_t i = 0; i < cyl.constraints.size(); ++i) {
    const auto& k = cyl.constraints[i];
    if (i) s += ",";
    s += "((" + std::to_string(k.cell.z1) + "," + std::to_string(k.cell.z2) + ")," + (k.value ? "1" : "0") + ")";
  }
  return s + "]";
}

}  // namespace asym
