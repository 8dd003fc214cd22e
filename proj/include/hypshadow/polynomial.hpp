#pragma once

// Exact sparse multivariate polynomials over Q, and the restriction /
// homogenization calculus the rest of the library is built on.

#include "hypshadow/exact_linalg.hpp"
#include "hypshadow/rational.hpp"
#include "hypshadow/unipoly.hpp"

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hypshadow {

using Exponent = std::vector<int>;

int total_degree(const Exponent& e);

/// Graded order: lower total degree first, ties broken lexicographically.
struct GradedLess {
  bool operator()(const Exponent& a, const Exponent& b) const;
};

inline constexpr std::size_t kDefaultMaxVariables = 16;

class Polynomial {
 public:
  using TermMap = std::map<Exponent, Rational, GradedLess>;

  explicit Polynomial(std::size_t nvars = 0);

  static Polynomial constant(std::size_t nvars, const Rational& c);
  static Polynomial variable(std::size_t nvars, std::size_t index);
  /// sum_i coeffs[i] * x_i + c0
  static Polynomial linear(std::span<const Rational> coeffs, const Rational& c0 = 0);

  std::size_t nvars() const { return nvars_; }
  /// Max total degree of stored terms, -1 for the zero polynomial.
  int degree() const;
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return degree() <= 0; }
  bool is_homogeneous() const;
  const TermMap& terms() const { return terms_; }
  Rational coeff(const Exponent& e) const;

  /// Adds c * x^e, dropping the term if the coefficient cancels.
  void add_term(const Exponent& e, const Rational& c);

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator-() const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(const Rational& s) const;
  Polynomial& operator+=(const Polynomial& o);
  Polynomial pow(unsigned k) const;
  bool operator==(const Polynomial& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }

  Rational evaluate(std::span<const Rational> a) const;
  double evaluate(std::span<const double> a) const;

  Polynomial partial(std::size_t index) const;
  std::vector<double> gradient(std::span<const double> a) const;

  /// Homogeneous component of the given degree.
  Polynomial homogeneous_component(int deg) const;

 private:
  std::size_t nvars_;
  TermMap terms_;
};

/// Composition p(q_1(y), ..., q_n(y)); all q_i share one variable count.
Polynomial compose(const Polynomial& p, const std::vector<Polynomial>& images);

/// x0^d * p(x / x0); the new variable x0 is placed first.
Polynomial homogenize(const Polynomial& p, int d);

/// Restricts h to {c . x = level} by solving for x_eliminated; the result
/// lives in the remaining nvars-1 variables (original order).
Polynomial restrict_hyperplane(const Polynomial& h, std::span<const Rational> normal, const Rational& level,
                               std::size_t eliminated);

/// Coefficients of t -> h(a + t v).
UniPoly line_restriction(const Polynomial& h, std::span<const Rational> a, std::span<const Rational> v);

struct HomogeneousParts {
  std::vector<Polynomial> parts;  // parts[i] homogeneous of degree i; g(x + a) = sum parts
  /// Smallest i with parts[i] != 0; -1 for the zero polynomial.
  int multiplicity() const;
};

HomogeneousParts homogeneous_parts(const Polynomial& g, std::span<const Rational> a);

struct Derivatives {
  RVector gradient;
  RMatrix hessian;
};

Derivatives derivatives(const Polynomial& g, std::span<const Rational> a);

/// sum_i e_i * dh/dx_i
Polynomial directional_derivative(const Polynomial& h, std::span<const Rational> e);

/// Exact det(M0 + x_1 M1 + ... + x_n Mn) for symmetric k x k matrices, k <= cap.
Polynomial det_pencil_poly(const std::vector<RMatrix>& mats, std::size_t cap = 8);

struct ParseOptions {
  std::size_t max_variables = kDefaultMaxVariables;
};

/// Grammar: sums of products of integers, variables, parenthesised
/// expressions and integer powers. Division only by nonzero constants;
/// decimal literals are rejected.
Polynomial parse_polynomial(std::string_view text, const std::vector<std::string>& vars, ParseOptions opts = {});

std::string format(const Polynomial& p, const std::vector<std::string>& vars);

/// Default names x,y,z for up to three variables, x1..xn otherwise.
std::vector<std::string> default_var_names(std::size_t n);

/// Contents of a .poly file: "vars: x y z" header, optional "factor:" lines,
/// the polynomial itself on the remaining lines. '#' starts a comment.
struct PolyFile {
  std::vector<std::string> vars;
  Polynomial poly;
  std::vector<Polynomial> factors;
};

PolyFile parse_poly_file(std::string_view text, ParseOptions opts = {});

}  // namespace hypshadow
