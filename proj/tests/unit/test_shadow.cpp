#include "fixtures.hpp"
#include "hypshadow/error.hpp"
#include "hypshadow/shadow.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace hypshadow;
using namespace fixtures;

namespace {

const std::vector<std::string> xy{"x", "y"};

ShadowRep disk_relaxation() { return moment_relaxation({poly("1 - x^2 - y^2", xy)}, 1); }

ShadowVerdict verdict(const ShadowRep& s, std::vector<double> x) { return shadow_membership(s, x).verdict; }

// Lorentz cone {x >= |(y, z)|} as the cone over the unit disk in {x = 1}.
ShadowRep lorentz_lift() {
  RMatrix embed(3, 2);
  embed(1, 0) = 1;
  embed(2, 1) = 1;
  const ShadowRep slice = affine_image(disk_relaxation(), embed, pt({1, 0, 0}));
  return conical_hull(slice, pt({1, 0, 0}), 1);
}

ShadowRep singleton(std::vector<long> p) {
  ShadowRep s;
  s.ambient = p.size();
  for (std::size_t i = 0; i < p.size(); ++i) s.equalities.push_back({{{i, 1}}, p[i]});
  return s;
}

double lorentz_min_eig(const std::vector<double>& p) { return p[0] - std::hypot(p[1], p[2]); }

}  // namespace

TEST_CASE("graded-lex monomials") {
  const auto m = graded_lex_monomials(2, 2);
  const std::vector<Exponent> want{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  CHECK(m == want);
  CHECK(graded_lex_monomials(3, 4).size() == 35);
}

TEST_CASE("moment relaxation of the disk") {
  const ShadowRep s = disk_relaxation();
  CHECK(s.ambient == 2);
  CHECK(s.lifted == 3);
  REQUIRE(s.pencils.size() == 2);
  CHECK(s.pencils[0].size == 3);
  CHECK(s.pencils[1].size == 1);
  // localizing scalar 1 - y20 - y02
  CHECK(s.pencils[1].f0(0, 0) == 1);
  CHECK(s.pencils[1].terms.size() == 2);

  const MembershipResult in = shadow_membership(s, std::vector<double>{0.6, 0.6});
  CHECK(in.verdict == ShadowVerdict::member);
  CHECK(in.slack <= 1e-7);
  const MembershipResult out = shadow_membership(s, std::vector<double>{0.8, 0.8});
  CHECK(out.verdict == ShadowVerdict::non_member);
  CHECK(out.slack >= 0.05);

  CHECK_THROWS_AS(moment_relaxation({poly("1 - x^4 - y^4", xy)}, 1), DomainError);
  CHECK_THROWS_AS(moment_relaxation({}, 1), DomainError);
}

TEST_CASE("moment relaxation of an interval and of an empty set") {
  const ShadowRep s = moment_relaxation({poly("x", {"x"}), poly("1 - x", {"x"})}, 1);
  CHECK(verdict(s, {0.5}) == ShadowVerdict::member);
  CHECK(verdict(s, {1.0}) == ShadowVerdict::member);
  CHECK(verdict(s, {0.0}) == ShadowVerdict::member);
  CHECK(verdict(s, {1.1}) == ShadowVerdict::non_member);
  CHECK(verdict(s, {-0.1}) == ShadowVerdict::non_member);

  const ShadowRep empty = moment_relaxation({poly("-1 - x^2", {"x"})}, 1);
  for (double x : {-2.0, 0.0, 0.5, 3.0}) CHECK(verdict(empty, {x}) == ShadowVerdict::non_member);
}

TEST_CASE("outer containment of moment relaxations (property)") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  const std::vector<std::vector<Polynomial>> sets{
      {poly("1 - x^2 - y^2", xy), poly("x + y", xy)},
      {poly("1 - x^4 - y^4", xy)},
      {poly("1 - x^2 - 2*y^2", xy), poly("1/2 - x", xy)},
  };
  for (const auto& g : sets) {
    int max_deg = 0;
    for (const auto& p : g) max_deg = std::max(max_deg, p.degree());
    const PreparedShadow s(moment_relaxation(g, (max_deg + 1) / 2));
    int hits = 0;
    while (hits < 100) {
      const RVector q = round_dyadic(std::vector<double>{u(rng), u(rng)}, 10);
      bool in = true;
      for (const auto& p : g) in = in && p.evaluate(q) >= 0;
      if (!in) continue;
      ++hits;
      CHECK(s.membership(to_doubles(q)).verdict == ShadowVerdict::member);
    }
  }
}

TEST_CASE("monotonicity in the relaxation order (property)") {
  const std::vector<Polynomial> g{poly("1 - x^4 - y^4 - x*y", xy), poly("x - y^2 + 1/2", xy)};
  const PreparedShadow k2(moment_relaxation(g, 2));
  const PreparedShadow k3(moment_relaxation(g, 3));
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.3, 1.3);
  for (int i = 0; i < 60; ++i) {
    const std::vector<double> x{u(rng), u(rng)};
    const auto a = k2.membership(x).verdict;
    const auto b = k3.membership(x).verdict;
    if (a == ShadowVerdict::non_member) CHECK(b != ShadowVerdict::member);
  }
}

TEST_CASE("local patches") {
  const RZInstance ball(poly("1 - x^2 - y^2 - z^2"), pt({0, 0, 0}));
  const Patch p = local_patch(ball, pt({1, 0, 0}), 1);
  CHECK(p.active == std::vector<std::size_t>{0});
  CHECK(p.exact_center);
  CHECK(p.radius > 0);
  CHECK(p.radius <= 1);

  const RZInstance samosa_rz(samosa(), pt({0, 0, 0}));
  try {
    local_patch(samosa_rz, pt({1, 0, 0}), Rational(1, 4));
    FAIL("expected a quasi-concavity violation");
  } catch (const HypothesisViolation& v) {
    CHECK(v.stage() == "quasi-concavity");
    CHECK(v.witness()["line_vanishes"] == true);
    CHECK(v.witness()["witness"] == "0,1,1");
  }
  try {
    local_patch(samosa_rz, pt({1, 1, 1}), Rational(1, 4));
    FAIL("expected a smoothness violation");
  } catch (const HypothesisViolation& v) {
    CHECK(v.stage() == "smoothness");
    CHECK(v.witness()["multiplicity"] == 2);
  }
  CHECK_THROWS_AS(local_patch(ball, pt({0, 0, 0}), 1), DomainError);
}

TEST_CASE("local patch radius shrinks away from a second component") {
  // {p >= 0} = [-1, 1] u {|x| >= 2} while S = [-1, 1]; the closed ball of
  // radius 1 still touches x = 2, so the first clean radius is 1/2
  const RZInstance single(poly("(1 - x^2)*(4 - x^2)", {"x"}), pt({0}));
  const Patch p = local_patch(single, pt({1}), 4);
  CHECK(p.active == std::vector<std::size_t>{0});
  CHECK(p.radius == Rational(1, 2));
  CHECK(p.halvings == 3);

  // as separate factors only 1 - x^2 is active and already pins the patch inside S
  const RZInstance split(poly("(1 - x^2)*(4 - x^2)", {"x"}), pt({0}), {poly("1 - x^2", {"x"}), poly("4 - x^2", {"x"})});
  const Patch q = local_patch(split, pt({1}), 4);
  CHECK(q.active == std::vector<std::size_t>{0});
  CHECK(q.halvings == 0);
}

TEST_CASE("boundary cover") {
  const RZInstance ball(poly("1 - x^2 - y^2 - z^2"), pt({0, 0, 0}));
  CoverOptions opts;
  opts.directions = 64;
  const BoundaryCover c = boundary_cover(ball, opts);
  CHECK(c.verified);
  CHECK(c.patches.size() >= 64);
  CHECK(c.verification_points == 640);
  CHECK(c.max_boundary_norm == doctest::Approx(1));

  try {
    boundary_cover(RZInstance(samosa(), pt({0, 0, 0})), {});
    FAIL("expected singular points");
  } catch (const HypothesisViolation& v) {
    CHECK(v.stage() == "smoothness");
    REQUIRE(v.witness()["points"].size() == 4);
    for (const auto& p : v.witness()["points"]) {
      const RVector x = parse_point(p["point"].get<std::string>());
      CHECK(x[0] * x[1] * x[2] == 1);
      CHECK(p["multiplicity"] == 2);
    }
  }
}

TEST_CASE("boundary cover of the smoothed samosa") {
  const HyperbolicInstance h(samosa_hom(), pt({1, 0, 0, 0}));
  const Polynomial ell = poly("w", wxyz);
  NuijOptions no;
  no.samples = 200;
  const NuijResult s = nuij_smooth(h, ell, {}, no);
  const Polynomial slice = restrict_hyperplane(s.h, pt({1, 0, 0, 0}), 1, 0);
  const RZInstance rz(slice, pt({0, 0, 0}));
  CoverOptions opts;
  opts.directions = 48;
  const BoundaryCover c = boundary_cover(rz, opts);
  CHECK(c.verified);
}

TEST_CASE("convex hull: stadium") {
  const std::vector<ShadowRep> disks{moment_relaxation({poly("1 - (x - 1)^2 - y^2", xy)}, 1),
                                     moment_relaxation({poly("1 - (x + 1)^2 - y^2", xy)}, 1)};
  const ShadowRep hull = convex_hull_shadows(disks, 3);
  const PreparedShadow s(hull);
  CHECK(s.membership(std::vector<double>{0, 0.99}).verdict == ShadowVerdict::member);
  CHECK(s.membership(std::vector<double>{0, 1.01}).verdict == ShadowVerdict::non_member);
  CHECK(s.membership(std::vector<double>{2.01, 0}).verdict == ShadowVerdict::non_member);
  CHECK(s.membership(std::vector<double>{-1.5, 0.5}).verdict == ShadowVerdict::member);
  CHECK_THROWS_AS(convex_hull_shadows(disks, 0), DomainError);
  CHECK_THROWS_AS(convex_hull_shadows({}, 3), DomainError);

  // analytic oracle on random probes away from the boundary
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ux(-2.6, 2.6), uy(-1.4, 1.4);
  int probes = 0;
  while (probes < 60) {
    const double x = ux(rng), y = uy(rng);
    const double d = std::hypot(std::max(std::abs(x) - 1, 0.0), y) - 1;
    if (std::abs(d) < 0.01) continue;
    ++probes;
    CHECK(s.membership(std::vector<double>{x, y}).verdict == (d < 0 ? ShadowVerdict::member : ShadowVerdict::non_member));
  }
}

TEST_CASE("convex hull of one shadow and of singletons") {
  const ShadowRep disk = disk_relaxation();
  const PreparedShadow a(disk), b(convex_hull_shadows({disk}, 2));
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.3, 1.3);
  for (int i = 0; i < 50; ++i) {
    const std::vector<double> x{u(rng), u(rng)};
    if (std::abs(std::hypot(x[0], x[1]) - 1) < 0.01) continue;
    CHECK(a.membership(x).verdict == b.membership(x).verdict);
  }
  const ShadowRep zero = convex_hull_shadows({singleton({0}), singleton({0})}, 1);
  CHECK(verdict(zero, {0.0}) == ShadowVerdict::member);
  CHECK(verdict(zero, {0.5}) == ShadowVerdict::non_member);
}

TEST_CASE("conical hull over the disk is the Lorentz cone") {
  const ShadowRep cone = lorentz_lift();
  CHECK(cone.ambient == 3);
  const PreparedShadow s(cone);
  CHECK(s.membership(std::vector<double>{2, 1, 1}).verdict == ShadowVerdict::member);
  CHECK(s.membership(std::vector<double>{1, 1, 0}).verdict == ShadowVerdict::member);
  CHECK(s.membership(std::vector<double>{1, 2, 0}).verdict == ShadowVerdict::non_member);
  CHECK(s.membership(std::vector<double>{1, 1, 1}).verdict == ShadowVerdict::non_member);
  CHECK(s.membership(std::vector<double>{0, 0, 0}).verdict == ShadowVerdict::member);

  // member(x) iff member(2x)
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 40; ++i) {
    const std::vector<double> x{u(rng) + 0.5, u(rng), u(rng)};
    if (std::abs(lorentz_min_eig(x)) < 0.01) continue;
    const std::vector<double> x2{2 * x[0], 2 * x[1], 2 * x[2]};
    const auto v = s.membership(x).verdict;
    CHECK(v == s.membership(x2).verdict);
    CHECK(v == (lorentz_min_eig(x) > 0 ? ShadowVerdict::member : ShadowVerdict::non_member));
  }
}

TEST_CASE("conical hull over a point is a ray") {
  const ShadowRep ray = conical_hull(singleton({1, 0}), pt({1, 0}), 1);
  CHECK(verdict(ray, {3, 0}) == ShadowVerdict::member);
  CHECK(verdict(ray, {0, 0}) == ShadowVerdict::member);
  CHECK(verdict(ray, {1, 1}) == ShadowVerdict::non_member);
  CHECK(verdict(ray, {-1, 0}) == ShadowVerdict::non_member);
  CHECK_THROWS_AS(conical_hull(disk_relaxation(), pt({1, 0}), 1), DomainError);
  CHECK_THROWS_AS(conical_hull(singleton({1, 0}), pt({1, 0}), 0), DomainError);
}

TEST_CASE("affine image and Minkowski sum with a subspace") {
  RMatrix m(2, 2);
  m(0, 0) = 2;
  m(1, 1) = 1;
  const ShadowRep ellipse = affine_image(disk_relaxation(), m, pt({1, 0}));
  CHECK(verdict(ellipse, {2.9, 0}) == ShadowVerdict::member);
  CHECK(verdict(ellipse, {-0.9, 0}) == ShadowVerdict::member);
  CHECK(verdict(ellipse, {1, 1.1}) == ShadowVerdict::non_member);
  const ShadowRep strip = minkowski_subspace(disk_relaxation(), {pt({0, 1})});
  CHECK(verdict(strip, {0.5, 40}) == ShadowVerdict::member);
  CHECK(verdict(strip, {1.2, 0}) == ShadowVerdict::non_member);
}

TEST_CASE("build_cone_shadow on the Lorentz form") {
  const HyperbolicInstance h(lorentz(), pt({1, 0, 0}));
  const ConeShadow cs = build_cone_shadow(h);
  CHECK(cs.report["lineality"]["dimension"] == 0);
  CHECK(cs.report["cover"]["verified"] == true);
  CHECK(cs.report["relaxation"]["inexact_patches"] == 0);
  const PreparedShadow s(cs.shadow);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1, 1);
  int probes = 0;
  while (probes < 40) {
    const std::vector<double> x{u(rng), u(rng), u(rng)};
    const double nx = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    const double depth = lorentz_min_eig(x) / nx;
    if (depth < 0 && depth > -0.05) continue;
    ++probes;
    CHECK(s.membership(x).verdict == (depth >= 0 ? ShadowVerdict::member : ShadowVerdict::non_member));
  }
}

TEST_CASE("build_cone_shadow splits off the lineality space") {
  const HyperbolicInstance h(poly("x^2 - y^2"), pt({1, 0, 0}));
  const ConeShadow cs = build_cone_shadow(h);
  CHECK(cs.report["lineality"]["dimension"] == 1);
  const PreparedShadow s(cs.shadow);
  CHECK(s.membership(std::vector<double>{1, 0.5, 7}).verdict == ShadowVerdict::member);
  CHECK(s.membership(std::vector<double>{1, -0.5, -3}).verdict == ShadowVerdict::member);
  CHECK(s.membership(std::vector<double>{1, 2, 0}).verdict == ShadowVerdict::non_member);
  CHECK(s.membership(std::vector<double>{-1, 0, 1}).verdict == ShadowVerdict::non_member);
}

TEST_CASE("build_cone_shadow rejects non-smooth cones") {
  try {
    build_cone_shadow(HyperbolicInstance(orthant(), pt({1, 1, 1})));
    FAIL("expected a smoothness violation");
  } catch (const HypothesisViolation& v) {
    CHECK(v.stage() == "smoothness");
    CHECK(v.witness().contains("points"));
  }
  try {
    build_cone_shadow(HyperbolicInstance(samosa_hom(), pt({1, 0, 0, 0})));
    FAIL("expected a smoothness violation");
  } catch (const HypothesisViolation& v) {
    CHECK(v.stage() == "smoothness");
    REQUIRE(v.witness().contains("cone_points"));
    CHECK(v.witness()["cone_points"].size() == 4);
  }
}

TEST_CASE("shadow JSON round trip") {
  const ShadowRep cone = lorentz_lift();
  const nlohmann::json j = to_json(cone);
  CHECK(j["schema"] == 1);
  const ShadowRep back = shadow_from_json(nlohmann::json::parse(j.dump()));
  CHECK(to_json(back) == j);
  CHECK(verdict(back, {2, 1, 1}) == ShadowVerdict::member);
  nlohmann::json bad = j;
  bad["projection"] = {1, 0, 2};
  CHECK_THROWS_AS(shadow_from_json(bad), DomainError);
  bad = j;
  bad.erase("blocks");
  CHECK_THROWS_AS(shadow_from_json(bad), DomainError);
}
