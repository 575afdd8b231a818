#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace instab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

std::vector<double> to_double(const std::vector<Rational>& q);

/// Parses "p", "-p" or "p/q" with integer p, q. Throws ParseError otherwise
/// (decimals are rejected so they can't leak into exact computations).
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& q);

/// Exact integer value; throws DomainError if q is not an integer or does not
/// fit into 64 bits.
std::int64_t to_int64(const Rational& q);

}  // namespace instab
