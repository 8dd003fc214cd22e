#pragma once

#include "hypshadow/rational.hpp"

#include <string>
#include <utility>
#include <vector>

namespace hypshadow {

/// Dense univariate polynomial over Q, coefficients in ascending degree.
/// The zero polynomial has no coefficients; otherwise the last one is nonzero.
class UniPoly {
 public:
  UniPoly() = default;
  explicit UniPoly(std::vector<Rational> coeffs);
  UniPoly(std::initializer_list<Rational> coeffs) : UniPoly(std::vector<Rational>(coeffs)) {}

  static UniPoly constant(const Rational& c) { return UniPoly({c}); }
  /// (t - r)
  static UniPoly linear_root(const Rational& r) { return UniPoly({-r, Rational(1)}); }

  const std::vector<Rational>& coeffs() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
  const Rational& leading() const { return c_.back(); }
  Rational coeff(std::size_t i) const { return i < c_.size() ? c_[i] : Rational(0); }

  Rational eval(const Rational& t) const;
  double eval(double t) const;
  int sign_at(const Rational& t) const { return sgn(eval(t)); }

  UniPoly derivative() const;
  UniPoly operator+(const UniPoly& o) const;
  UniPoly operator-(const UniPoly& o) const;
  UniPoly operator-() const;
  UniPoly operator*(const UniPoly& o) const;
  UniPoly operator*(const Rational& s) const;
  bool operator==(const UniPoly& o) const = default;

  /// Euclidean division over Q; throws on zero divisor.
  std::pair<UniPoly, UniPoly> divmod(const UniPoly& divisor) const;
  UniPoly monic() const;
  /// Positive rational multiple with coprime integer coefficients.
  UniPoly primitive() const;
  /// p(t) -> p(t + shift)
  UniPoly shifted(const Rational& shift) const;

  std::string to_string(const std::string& var = "t") const;

 private:
  void trim();
  std::vector<Rational> c_;
};

UniPoly gcd(const UniPoly& a, const UniPoly& b);

}  // namespace hypshadow
