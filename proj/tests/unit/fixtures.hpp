#pragma once

// Shared polynomial fixtures and small random generators for the test suites.

#include "hypshadow/polynomial.hpp"

#include <random>
#include <string>
#include <vector>

namespace fixtures {

using hypshadow::Polynomial;
using hypshadow::Rational;
using hypshadow::RVector;

inline const std::vector<std::string> xyz{"x", "y", "z"};
inline const std::vector<std::string> wxyz{"w", "x", "y", "z"};

inline Polynomial poly(const std::string& text, const std::vector<std::string>& vars = xyz) {
  return hypshadow::parse_polynomial(text, vars);
}

inline Polynomial samosa() { return poly("1 + 2*x*y*z - x^2 - y^2 - z^2"); }
inline Polynomial taco() { return poly("z - x^2"); }
inline Polynomial lorentz() { return poly("x^2 - y^2 - z^2"); }
inline Polynomial orthant() { return poly("x*y*z"); }
inline Polynomial samosa_hom() { return hypshadow::homogenize(samosa(), 3); }

inline RVector pt(std::initializer_list<long> xs) {
  RVector out;
  for (long x : xs) out.emplace_back(x);
  return out;
}

inline RVector pt(const std::string& text) { return hypshadow::parse_point(text); }

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng_); }

  Rational rational(long range = 5, long max_den = 6) {
    const long den = integer(1, max_den);
    Rational r(integer(-range * den, range * den), den);
    r.canonicalize();
    return r;
  }

  RVector point(std::size_t n, long range = 5, long max_den = 6) {
    RVector p;
    for (std::size_t i = 0; i < n; ++i) p.push_back(rational(range, max_den));
    return p;
  }

  Polynomial polynomial(std::size_t nvars, int max_deg, int terms) {
    Polynomial p(nvars);
    for (int k = 0; k < terms; ++k) {
      hypshadow::Exponent e(nvars, 0);
      int budget = static_cast<int>(integer(0, max_deg));
      for (std::size_t i = 0; i < nvars && budget > 0; ++i) {
        const int take = static_cast<int>(integer(0, budget));
        e[i] = take;
        budget -= take;
      }
      p.add_term(e, rational(4, 3));
    }
    return p;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace fixtures
