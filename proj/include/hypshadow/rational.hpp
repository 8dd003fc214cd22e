#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hypshadow {

using Rational = mpq_class;
using RVector = std::vector<Rational>;

/// Parses "p", "-p" or "p/q" (no decimals). Throws ParseError on failure.
Rational parse_rational(std::string_view text);

/// Canonical "p" or "p/q" text.
std::string to_string(const Rational& r);

inline double to_double(const Rational& r) { return r.get_d(); }

/// Exact conversion of a finite double.
Rational from_double(double x);

/// Nearest multiple of 2^-bits. Keeps denominators small for sampled points.
Rational round_dyadic(double x, int bits = 24);

/// Comma separated rationals, e.g. "1/2,0,3".
RVector parse_point(std::string_view text);
std::string format_point(std::span<const Rational> p);

std::vector<double> to_doubles(std::span<const Rational> v);
RVector round_dyadic(std::span<const double> v, int bits = 24);

Rational dot(std::span<const Rational> a, std::span<const Rational> b);
RVector axpy(const Rational& alpha, std::span<const Rational> x, std::span<const Rational> y);  // alpha*x + y
RVector sub(std::span<const Rational> a, std::span<const Rational> b);
bool is_zero(std::span<const Rational> v);

}  // namespace hypshadow
