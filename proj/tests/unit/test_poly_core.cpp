#include "fixtures.hpp"
#include "hypshadow/error.hpp"
#include "hypshadow/polynomial.hpp"

#include <doctest.h>

using namespace hypshadow;
using namespace fixtures;

TEST_CASE("parse: named fixtures and the zero polynomial") {
  const Polynomial s = samosa();
  CHECK(s.degree() == 3);
  CHECK(s.terms().size() == 5);
  CHECK(s.coeff({1, 1, 1}) == 2);
  CHECK(s.coeff({0, 0, 0}) == 1);
  CHECK(s.coeff({2, 0, 0}) == -1);

  const Polynomial t = taco();
  CHECK(t.degree() == 2);
  CHECK(t.coeff({0, 0, 1}) == 1);
  CHECK(t.coeff({2, 0, 0}) == -1);

  const Polynomial z = poly("0");
  CHECK(z.is_zero());
  CHECK(z.degree() == -1);
}

TEST_CASE("parse: rationals, parentheses, powers") {
  CHECK(poly("(x+y+z)/3") == poly("1/3*x + 1/3*y + 1/3*z"));
  CHECK(poly("(x - y)^2") == poly("x^2 - 2*x*y + y^2"));
  CHECK(poly("-x^2") == poly("0 - x*x"));
  CHECK(poly("3/6*x").coeff({1, 0, 0}) == Rational(1, 2));
}

TEST_CASE("parse: errors carry byte offsets") {
  try {
    poly("1 + 0.5*x");
    FAIL("decimal accepted");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 5);
  }
  try {
    poly("x + w");
    FAIL("unknown variable accepted");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 4);
    CHECK(std::string(e.what()).find("unknown variable 'w'") != std::string::npos);
  }
  CHECK_THROWS_AS(poly("x +"), ParseError);
  CHECK_THROWS_AS(poly("2x"), ParseError);
  CHECK_THROWS_AS(poly("x / y"), ParseError);
  CHECK_THROWS_AS(poly("(x + y"), ParseError);
}

TEST_CASE("parse: variable cap") {
  std::vector<std::string> many;
  for (int i = 0; i < 17; ++i) many.push_back("v" + std::to_string(i));
  CHECK_THROWS_AS(parse_polynomial("v0", many), DomainError);
  CHECK_NOTHROW(parse_polynomial("v0", many, ParseOptions{32}));
}

TEST_CASE("format round-trips through parse") {
  Gen g(7);
  for (int i = 0; i < 100; ++i) {
    const Polynomial p = g.polynomial(3, 4, 6);
    CHECK(poly(format(p, xyz)) == p);
  }
  CHECK(format(samosa(), xyz) == "2*x*y*z - x^2 - y^2 - z^2 + 1");
  CHECK(format(poly("0"), xyz) == "0");
}

TEST_CASE("poly file with header and factors") {
  const PolyFile f = parse_poly_file("# cube\nvars: a b\nfactor: a\nfactor: b\n a*b\n");
  CHECK(f.vars == std::vector<std::string>{"a", "b"});
  CHECK(f.poly == parse_polynomial("a*b", f.vars));
  CHECK(f.factors.size() == 2);
  CHECK_THROWS_AS(parse_poly_file("x*y"), ParseError);
}

TEST_CASE("evaluate") {
  CHECK(samosa().evaluate(pt({0, 0, 0})) == 1);
  CHECK(samosa().evaluate(pt({1, 1, 1})) == 0);
  CHECK(taco().evaluate(pt({2, 0, 4})) == 0);
  CHECK_THROWS_AS(taco().evaluate(pt({1, 2})), DimensionError);
  const std::vector<double> a{0.5, -0.25, 2.0};
  CHECK(samosa().evaluate(std::span<const double>(a)) == doctest::Approx(samosa().evaluate(pt("1/2,-1/4,2")).get_d()));
}

TEST_CASE("homogenize") {
  const std::vector<std::string> w{"w", "x", "y", "z"};
  CHECK(homogenize(taco(), 2) == poly("w*z - x^2", w));
  CHECK(homogenize(samosa(), 3) == poly("w^3 + 2*x*y*z - w*(x^2 + y^2 + z^2)", w));
  CHECK(homogenize(Polynomial::constant(3, 1), 0) == Polynomial::constant(4, 1));
  CHECK(homogenize(samosa(), 3).is_homogeneous());
  CHECK_THROWS_AS(homogenize(samosa(), 2), DomainError);
}

TEST_CASE("restrict_hyperplane") {
  const RVector x0 = pt({1, 0, 0, 0});
  CHECK(restrict_hyperplane(homogenize(taco(), 2), x0, 1, 0) == taco());
  const Polynomial r = restrict_hyperplane(orthant(), pt({1, 1, 1}), 1, 2);
  CHECK(r == poly("x*y*(1 - x - y)", {"x", "y"}));
  // linear h on its own zero hyperplane
  CHECK(restrict_hyperplane(poly("x + 2*y - z"), pt({1, 2, -1}), 0, 0).is_zero());
  CHECK_THROWS_AS(restrict_hyperplane(orthant(), pt({0, 1, 1}), 1, 0), DomainError);
}

TEST_CASE("homogenize then dehomogenize is the identity (property)") {
  Gen g(11);
  for (int i = 0; i < 50; ++i) {
    const Polynomial p = g.polynomial(3, 4, 5);
    const int d = std::max(p.degree(), 0) + static_cast<int>(g.integer(0, 2));
    CHECK(restrict_hyperplane(homogenize(p, d), pt({1, 0, 0, 0}), 1, 0) == p);
  }
}

TEST_CASE("line_restriction") {
  CHECK(line_restriction(orthant(), pt({1, 2, 3}), pt({-1, -1, -1})) == UniPoly({6, -11, 6, -1}));
  const RVector e = pt({0, 0, 1});
  const RVector a = pt({2, 0, 4});
  CHECK(line_restriction(taco(), e, sub(a, e)) == UniPoly({1, 3, -4}));
  CHECK(line_restriction(samosa(), pt("1/2,1/3,1"), pt({0, 0, 0})) == UniPoly::constant(samosa().evaluate(pt("1/2,1/3,1"))));
}

TEST_CASE("line_restriction agrees with evaluation (property)") {
  Gen g(13);
  for (int i = 0; i < 50; ++i) {
    const Polynomial h = g.polynomial(3, 4, 6);
    const RVector a = g.point(3), v = g.point(3);
    const Rational t = g.rational();
    CHECK(line_restriction(h, a, v).eval(t) == h.evaluate(axpy(t, v, a)));
  }
}

TEST_CASE("homogeneous_parts") {
  const HomogeneousParts s = homogeneous_parts(samosa(), pt({1, 1, 1}));
  REQUIRE(s.parts.size() == 4);
  CHECK(s.parts[0].is_zero());
  CHECK(s.parts[1].is_zero());
  CHECK(s.parts[2] == poly("2*(x*y + y*z + z*x) - (x^2 + y^2 + z^2)"));
  CHECK(s.parts[3] == poly("2*x*y*z"));
  CHECK(s.multiplicity() == 2);

  const HomogeneousParts o = homogeneous_parts(samosa(), pt({0, 0, 0}));
  CHECK(o.parts[0] == Polynomial::constant(3, 1));
  CHECK(o.multiplicity() == 0);

  const HomogeneousParts t = homogeneous_parts(taco(), pt({1, 0, 1}));
  CHECK(t.parts[0].is_zero());
  CHECK(t.parts[1] == poly("z - 2*x"));
  CHECK(t.parts[2] == poly("-x^2"));
}

TEST_CASE("homogeneous parts reproduce g(b) (property)") {
  Gen g(17);
  for (int i = 0; i < 50; ++i) {
    const Polynomial p = g.polynomial(3, 4, 6);
    const RVector a = g.point(3), b = g.point(3);
    const HomogeneousParts hp = homogeneous_parts(p, a);
    Rational sum = 0;
    for (const auto& part : hp.parts) sum += part.evaluate(sub(b, a));
    CHECK(sum == p.evaluate(b));
    for (std::size_t k = 0; k < hp.parts.size(); ++k) {
      CHECK(hp.parts[k].is_homogeneous());
      CHECK((hp.parts[k].is_zero() || hp.parts[k].degree() == static_cast<int>(k)));
    }
  }
}

TEST_CASE("derivatives") {
  const Derivatives t = derivatives(taco(), pt({0, 0, 1}));
  CHECK(t.gradient == pt({0, 0, 1}));
  RMatrix h(3, 3);
  h(0, 0) = -2;
  CHECK(t.hessian == h);

  const Derivatives s = derivatives(samosa(), pt({0, 0, 0}));
  CHECK(is_zero(s.gradient));
  CHECK(s.hessian == RMatrix::identity(3) * Rational(-2));

  CHECK(directional_derivative(orthant(), pt({1, 1, 1})) == poly("x*y + y*z + z*x"));
}

TEST_CASE("derivatives agree with symbolic partials (property)") {
  Gen g(19);
  for (int i = 0; i < 30; ++i) {
    const Polynomial p = g.polynomial(3, 4, 6);
    const RVector a = g.point(3);
    const Derivatives d = derivatives(p, a);
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(d.gradient[j] == p.partial(j).evaluate(a));
      for (std::size_t k = 0; k < 3; ++k) CHECK(d.hessian(j, k) == p.partial(j).partial(k).evaluate(a));
    }
  }
}

TEST_CASE("det_pencil_poly") {
  RMatrix m0 = RMatrix::identity(2), m1(2, 2), m2(2, 2);
  m1(0, 0) = 1;
  m1(1, 1) = -1;
  m2(0, 1) = m2(1, 0) = 1;
  CHECK(det_pencil_poly({m0, m1, m2}) == poly("1 - x^2 - y^2", {"x", "y"}));

  // diag(x1, ..., x4)
  std::vector<RMatrix> diag{RMatrix(4, 4)};
  for (std::size_t i = 0; i < 4; ++i) {
    RMatrix m(4, 4);
    m(i, i) = 1;
    diag.push_back(m);
  }
  CHECK(det_pencil_poly(diag) == parse_polynomial("x1*x2*x3*x4", default_var_names(4)));

  // Cayley cubic pencil: ones on the diagonal, x, y, z off the diagonal
  RMatrix c0 = RMatrix::identity(3), cx(3, 3), cy(3, 3), cz(3, 3);
  cx(0, 1) = cx(1, 0) = 1;
  cy(0, 2) = cy(2, 0) = 1;
  cz(1, 2) = cz(2, 1) = 1;
  CHECK(det_pencil_poly({c0, cx, cy, cz}) == samosa());

  CHECK_THROWS_AS(det_pencil_poly({RMatrix::identity(9)}), DomainError);
  CHECK_THROWS_AS(det_pencil_poly({RMatrix::identity(2), RMatrix::identity(3)}), DimensionError);
}

TEST_CASE("det_pencil_poly of a constant PD pencil evaluates to det(M0)") {
  Gen g(23);
  for (int i = 0; i < 10; ++i) {
    const std::size_t k = static_cast<std::size_t>(g.integer(1, 5));
    RMatrix b(k, k);
    for (std::size_t r = 0; r < k; ++r)
      for (std::size_t c = 0; c < k; ++c) b(r, c) = g.rational(2, 3);
    RMatrix m0 = b * b.transpose() + RMatrix::identity(k);
    RMatrix m1(k, k);
    m1(0, 0) = 1;
    const Polynomial p = det_pencil_poly({m0, m1});
    CHECK(p.evaluate(pt({0})) == determinant(m0));
    CHECK(determinant(m0) > 0);
  }
}
