#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "ergoscope/error.hpp"

namespace ergoscope {

  /// Exact arbitrary-precision rational number.
  using Rational = boost::multiprecision::cpp_rational;
  using Integer  = boost::multiprecision::cpp_int;

  inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
    if (den == 0) {
      throw InvalidInput("rational with zero denominator");
    }
    return Rational(Integer(num), Integer(den));
  }

  /// Always "p/q", including integers ("3/1") and zero ("0/1").
  inline std::string to_fraction_string(Rational const& r) {
    return boost::multiprecision::numerator(r).str() + "/"
           + boost::multiprecision::denominator(r).str();
  }

  namespace detail {

    // Decimal digits with an optional sign. Leading zeros are dropped since
    // the Integer string constructor reads them as an octal prefix.
    inline Integer parse_integer(std::string s, std::string const& literal) {
      bool negative = false;
      if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.erase(0, 1);
      }
      if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
        throw InvalidInput("malformed rational literal: " + literal);
      }
      s.erase(0, std::min(s.find_first_not_of('0'), s.size() - 1));
      Integer v(s);
      return negative ? Integer(-v) : v;
    }

  }  // namespace detail

  /// Accepts "p/q", "p", or a plain decimal such as "0.25" or "1e-9".
  inline Rational parse_rational(std::string_view text) {
    std::string const s(text);
    if (s.empty()) {
      throw InvalidInput("empty rational literal");
    }
    auto slash = s.find('/');
    if (slash != std::string::npos) {
      Integer num = detail::parse_integer(s.substr(0, slash), s);
      Integer den = detail::parse_integer(s.substr(slash + 1), s);
      if (den == 0) {
        throw InvalidInput("rational literal with zero denominator: " + s);
      }
      return Rational(num, den);
    }
    auto        exp_pos  = s.find_first_of("eE");
    std::string mantissa = s.substr(0, exp_pos);
    long        exponent = 0;
    if (exp_pos != std::string::npos) {
      Integer e = detail::parse_integer(s.substr(exp_pos + 1), s);
      if (e > 4096 || e < -4096) {
        throw InvalidInput("exponent out of range in rational literal: " + s);
      }
      exponent = static_cast<long>(e);
    }
    auto dot = mantissa.find('.');
    if (dot != std::string::npos) {
      exponent -= static_cast<long>(mantissa.size() - dot - 1);
      mantissa.erase(dot, 1);
    }
    Rational value{detail::parse_integer(mantissa, s)};
    Integer  scale = boost::multiprecision::pow(
        Integer(10), static_cast<unsigned>(exponent < 0 ? -exponent : exponent));
    return exponent < 0 ? value / Rational(scale) : value * Rational(scale);
  }

  inline double to_double(Rational const& r) {
    return r.convert_to<double>();
  }

  inline Rational abs(Rational const& r) {
    return r < 0 ? Rational(-r) : r;
  }

  inline Rational pow(Rational const& base, unsigned exponent) {
    Rational result = 1;
    Rational b      = base;
    while (exponent != 0) {
      if (exponent & 1U) {
        result *= b;
      }
      b *= b;
      exponent >>= 1U;
    }
    return result;
  }

}  // namespace ergoscope
