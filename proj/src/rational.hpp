#pragma once
#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace spliteq {

using Q = mpq_class;

struct InputError : std::runtime_error {
  int line = 0, column = 0;
  InputError(const std::string& msg, int l = 0, int c = 0)
      : std::runtime_error(l > 0 ? std::to_string(l) + ":" + std::to_string(c) + ": " + msg : msg),
        line(l), column(c) {}
};

// Accepts "p/q", integers and finite decimals with optional exponent ("1.5e-6").
Q parse_rational(const std::string& text);
bool try_parse_rational(const std::string& text, Q& out);

// Canonical "p/q" or "p".
std::string to_string(const Q& q);
// Fixed-point rendering with the given number of fractional digits, rounded half away from zero.
std::string to_decimal(const Q& q, int digits);

}  // namespace spliteq
