#pragma once
#include <gmpxx.h>

#include <cmath>

#include "rational.hpp"

namespace spliteq {

enum class Mode { Exact = 0, Float = 1, Wide = 2 };

// Bits of mantissa for the wide binary float mode.
constexpr unsigned kWideBits = 256;

template <class T>
struct Num;

template <>
struct Num<mpq_class> {
  static constexpr bool exact = true;
  static constexpr Mode mode = Mode::Exact;
  static mpq_class from_q(const Q& q) { return q; }
  static Q to_q(const mpq_class& x) { return x; }
  static double to_d(const mpq_class& x) { return x.get_d(); }
  static mpq_class abs(const mpq_class& x) { return ::abs(x); }
  static int sgn(const mpq_class& x) { return ::sgn(x); }
  static mpq_class default_tol() { return 0; }
};

template <>
struct Num<double> {
  static constexpr bool exact = false;
  static constexpr Mode mode = Mode::Float;
  static double from_q(const Q& q) { return q.get_d(); }
  static Q to_q(double x) { return Q(x); }
  static double to_d(double x) { return x; }
  static double abs(double x) { return std::fabs(x); }
  static int sgn(double x) { return (x > 0) - (x < 0); }
  static double default_tol() { return 1e-9; }
};

template <>
struct Num<mpf_class> {
  static constexpr bool exact = false;
  static constexpr Mode mode = Mode::Wide;
  static mpf_class from_q(const Q& q) { return mpf_class(q, kWideBits); }
  static Q to_q(const mpf_class& x) { return Q(x); }
  static double to_d(const mpf_class& x) { return x.get_d(); }
  static mpf_class abs(const mpf_class& x) { return mpf_class(::abs(x), kWideBits); }
  static int sgn(const mpf_class& x) { return ::sgn(x); }
  static mpf_class default_tol() { return mpf_class("1e-40", kWideBits); }
};

// Zero test against a magnitude scale; exact types ignore the tolerance.
template <class T>
bool near_zero(const T& x, const T& scale, const T& tol) {
  if constexpr (Num<T>::exact) {
    (void)scale;
    (void)tol;
    return x == 0;
  } else {
    T lim = tol * (scale + 1);
    return Num<T>::abs(x) <= lim;
  }
}

template <class T>
int sign_tol(const T& x, const T& scale, const T& tol) {
  return near_zero(x, scale, tol) ? 0 : Num<T>::sgn(x);
}

void ensure_wide_precision();

}  // namespace spliteq
