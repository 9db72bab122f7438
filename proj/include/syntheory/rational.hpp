#pragma once

// Exact arbitrary-precision integers and rationals used for all symbolic
// arithmetic. Floating point appears only on the data-generation side.

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace syntheory {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt num(const Rational& q) { return boost::multiprecision::numerator(q); }
inline BigInt den(const Rational& q) { return boost::multiprecision::denominator(q); }

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline std::string to_string(const Rational& q) { return q.str(); }
inline std::string to_string(const BigInt& n) { return n.str(); }

/// Parses "p" or "p/q" with optional leading sign.
inline Rational parse_rational(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty rational literal");
    try {
        return Rational(text);
    } catch (const std::exception&) {
        throw std::invalid_argument("bad rational literal: " + text);
    }
}

inline BigInt gcd(const BigInt& a, const BigInt& b) { return boost::multiprecision::gcd(a, b); }
inline BigInt lcm(const BigInt& a, const BigInt& b) { return boost::multiprecision::lcm(a, b); }

}  // namespace syntheory
