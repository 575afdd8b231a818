#include "instab/rational.hpp"

#include <cctype>
#include <limits>

#include "instab/errors.hpp"

namespace instab {

std::vector<double> to_double(const std::vector<Rational>& q) {
  std::vector<double> out;
  out.reserve(q.size());
  for (const auto& x : q) out.push_back(to_double(x));
  return out;
}

namespace {
BigInt parse_integer(std::string_view text, std::size_t offset) {
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
    negative = text[i] == '-';
    ++i;
  }
  if (i == text.size()) throw ParseError("expected digits", offset + i);
  BigInt value = 0;
  for (; i < text.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i])))
      throw ParseError("unexpected character in rational", offset + i);
    value = value * 10 + (text[i] - '0');
  }
  return negative ? BigInt(-value) : value;
}

std::string_view trim(std::string_view s, std::size_t& offset) {
  offset = 0;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
    ++offset;
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}
}  // namespace

Rational parse_rational(std::string_view text) {
  std::size_t offset = 0;
  text = trim(text, offset);
  if (text.empty()) throw ParseError("empty rational", offset);
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_integer(text, offset));
  const BigInt num = parse_integer(text.substr(0, slash), offset);
  const BigInt den = parse_integer(text.substr(slash + 1), offset + slash + 1);
  if (den == 0) throw ParseError("zero denominator", offset + slash + 1);
  return Rational(num, den);
}

std::string to_string(const Rational& q) {
  if (boost::multiprecision::denominator(q) == 1)
    return boost::multiprecision::numerator(q).str();
  return boost::multiprecision::numerator(q).str() + "/" +
         boost::multiprecision::denominator(q).str();
}

std::int64_t to_int64(const Rational& q) {
  if (boost::multiprecision::denominator(q) != 1)
    throw DomainError("expected an integer, got " + to_string(q));
  const BigInt& num = boost::multiprecision::numerator(q);
  if (num > std::numeric_limits<std::int64_t>::max() ||
      num < std::numeric_limits<std::int64_t>::min())
    throw DomainError("integer out of 64-bit range");
  return num.convert_to<std::int64_t>();
}

}  // namespace instab
