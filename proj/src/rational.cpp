#include "rational.hpp"

#include <cctype>

namespace spliteq {

namespace {

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

bool parse_integer(const std::string& s, mpz_class& out) {
  size_t p = 0;
  bool neg = false;
  if (p < s.size() && (s[p] == '+' || s[p] == '-')) neg = s[p++] == '-';
  std::string digits = s.substr(p);
  if (!all_digits(digits)) return false;
  out.set_str(digits, 10);
  if (neg) out = -out;
  return true;
}

}  // namespace

bool try_parse_rational(const std::string& text, Q& out) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) return false;

  auto slash = s.find('/');
  if (slash != std::string::npos) {
    mpz_class num, den;
    if (!parse_integer(s.substr(0, slash), num)) return false;
    std::string d = s.substr(slash + 1);
    if (!all_digits(d)) return false;
    den.set_str(d, 10);
    if (den == 0) return false;
    out = Q(num, den);
    out.canonicalize();
    return true;
  }

  size_t p = 0;
  bool neg = false;
  if (s[p] == '+' || s[p] == '-') neg = s[p++] == '-';
  std::string mant, exp;
  auto epos = s.find_first_of("eE", p);
  mant = s.substr(p, epos == std::string::npos ? std::string::npos : epos - p);
  if (epos != std::string::npos) exp = s.substr(epos + 1);

  std::string ip = mant, fp;
  auto dot = mant.find('.');
  if (dot != std::string::npos) {
    ip = mant.substr(0, dot);
    fp = mant.substr(dot + 1);
  }
  if (ip.empty() && fp.empty()) return false;
  if (!ip.empty() && !all_digits(ip)) return false;
  if (!fp.empty() && !all_digits(fp)) return false;

  mpz_class num;
  std::string digits = ip + fp;
  num.set_str(digits.empty() ? "0" : digits, 10);
  long e10 = -static_cast<long>(fp.size());
  if (!exp.empty()) {
    mpz_class ev;
    if (!parse_integer(exp, ev) || !ev.fits_slong_p()) return false;
    if (abs(ev) > 100000) return false;
    e10 += ev.get_si();
  }
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(e10 < 0 ? -e10 : e10));
  Q r = e10 < 0 ? Q(num, scale) : Q(num * scale);
  r.canonicalize();
  out = neg ? Q(-r) : r;
  return true;
}

Q parse_rational(const std::string& text) {
  Q q;
  if (!try_parse_rational(text, q)) throw InputError("not a rational number: '" + text + "'");
  return q;
}

std::string to_string(const Q& q) { return q.get_str(10); }

std::string to_decimal(const Q& q, int digits) {
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  Q scaled = abs(q) * scale;
  mpz_class num = scaled.get_num(), den = scaled.get_den();
  mpz_class quo = (2 * num + den) / (2 * den);
  std::string s = quo.get_str(10);
  if (digits > 0) {
    if (static_cast<int>(s.size()) <= digits) s = std::string(digits + 1 - s.size(), '0') + s;
    s.insert(s.size() - digits, ".");
  }
  if (q < 0 && quo != 0) s = "-" + s;
  return s;
}

}  // namespace spliteq
