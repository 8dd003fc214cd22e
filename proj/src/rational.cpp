#include "hypshadow/rational.hpp"

#include "hypshadow/error.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace hypshadow {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse: return "parse";
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::domain: return "domain";
    case ErrorKind::hypothesis: return "hypothesis";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::usage: return "usage";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = trim(text);
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  const auto slash = s.find('/');
  std::string_view num = s.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : s.substr(slash + 1);
  if (s.find('.') != std::string_view::npos)
    throw ParseError("decimal literals are not accepted, use p/q", s.find('.'));
  if (!all_digits(num)) throw ParseError("malformed rational '" + std::string(text) + "'", 0);
  if (!all_digits(den)) throw ParseError("malformed denominator in '" + std::string(text) + "'", slash + 1);
  mpz_class n(std::string(num), 10);
  mpz_class d(std::string(den), 10);
  if (d == 0) throw ParseError("zero denominator", slash + 1);
  Rational r(n, d);
  r.canonicalize();
  if (negative) r = -r;
  return r;
}

std::string to_string(const Rational& r) { return r.get_str(10); }

Rational from_double(double x) {
  if (!std::isfinite(x)) throw NumericError("non-finite value cannot be converted to a rational");
  return Rational(x);
}

Rational round_dyadic(double x, int bits) {
  if (!std::isfinite(x)) throw NumericError("non-finite value cannot be rounded");
  const double scaled = std::nearbyint(std::ldexp(x, bits));
  mpz_class den = 1;
  mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), static_cast<mp_bitcnt_t>(bits));
  Rational r(mpz_class(scaled), den);
  r.canonicalize();
  return r;
}

RVector parse_point(std::string_view text) {
  RVector out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    std::string_view piece = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
    try {
      out.push_back(parse_rational(piece));
    } catch (const ParseError& e) {
      throw ParseError("bad coordinate '" + std::string(trim(piece)) + "' in point", start);
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string format_point(std::span<const Rational> p) {
  std::ostringstream os;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) os << ',';
    os << to_string(p[i]);
  }
  return os.str();
}

std::vector<double> to_doubles(std::span<const Rational> v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(x.get_d());
  return out;
}

RVector round_dyadic(std::span<const double> v, int bits) {
  RVector out;
  out.reserve(v.size());
  for (double x : v) out.push_back(round_dyadic(x, bits));
  return out;
}

Rational dot(std::span<const Rational> a, std::span<const Rational> b) {
  require_dims(b.size(), a.size(), "dot");
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

RVector axpy(const Rational& alpha, std::span<const Rational> x, std::span<const Rational> y) {
  require_dims(y.size(), x.size(), "axpy");
  RVector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = alpha * x[i] + y[i];
  return out;
}

RVector sub(std::span<const Rational> a, std::span<const Rational> b) {
  require_dims(b.size(), a.size(), "sub");
  RVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

bool is_zero(std::span<const Rational> v) {
  for (const auto& x : v)
    if (x != 0) return false;
  return true;
}

}  // namespace hypshadow
