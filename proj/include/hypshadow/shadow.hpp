#pragma once

// Spectrahedral shadows: exact LMI pencils over [ambient | lifted] variables,
// their constructions (moment relaxations, local patches, convex and conical
// hulls, linear images) and a float membership oracle.

#include "hypshadow/exact_linalg.hpp"
#include "hypshadow/hyperbolicity.hpp"
#include "hypshadow/rz_geometry.hpp"
#include "hypshadow/sdp.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace hypshadow {

/// F0 + sum_i v_i F_i with sparse terms; every matrix size x size symmetric.
struct LMIPencil {
  std::size_t size = 0;
  RMatrix f0;
  std::vector<std::pair<std::size_t, RMatrix>> terms;

  RMatrix evaluate(std::span<const Rational> v) const;
};

struct LinearEquality {
  std::vector<std::pair<std::size_t, Rational>> coeffs;
  Rational rhs;
};

/// {x : exists u with every pencil PSD at (x, u) and all equalities}. The
/// ambient coordinates are the first `ambient` variables.
struct ShadowRep {
  std::size_t ambient = 0;
  std::size_t lifted = 0;
  std::vector<LMIPencil> pencils;
  std::vector<LinearEquality> equalities;
  nlohmann::json provenance = nlohmann::json::array();

  std::size_t nvars() const { return ambient + lifted; }
  void validate() const;
};

/// Monomials of degree <= d in graded-lex order (x1 > x2 > ...).
std::vector<Exponent> graded_lex_monomials(std::size_t nvars, int d);

/// Order-k moment/localizing relaxation of {g_i >= 0}. Variables are the
/// moments y_a, 0 < |a| <= 2k, with the degree-1 moments first.
ShadowRep moment_relaxation(const std::vector<Polynomial>& constraints, int order);

struct Patch {
  RVector center;  // rational; on the boundary when `exact_center`
  bool exact_center = false;
  RVector direction;  // ray from e that produced the center
  Rational radius;
  std::vector<std::size_t> active;  // factors vanishing at the boundary point
  int halvings = 0;
  std::size_t qc_checks = 0;
  std::size_t local_checks = 0;

  /// Active factors (signed positive at e) and the ball eps^2 - |b - a|^2.
  std::vector<Polynomial> constraints(const RZInstance& inst) const;
};

/// Order-k relaxation of the patch, computed in the coordinates
/// z = (x - center) / radius that put it in the unit ball, then mapped back.
ShadowRep patch_relaxation(const RZInstance& inst, const Patch& patch, int order);

struct PatchOptions {
  std::size_t qc_samples = 16;
  std::size_t local_samples = 64;
  int max_halvings = 24;
  std::uint64_t seed = 0;
};

/// Patch at the boundary point where the ray e + t v leaves S.
Patch local_patch(const RZInstance& inst, const BoundaryPoint& b, const Rational& eps0, const PatchOptions& opts = {});
/// Patch at an exact boundary point a.
Patch local_patch(const RZInstance& inst, std::span<const Rational> a, const Rational& eps0,
                  const PatchOptions& opts = {});

struct CoverOptions {
  std::size_t directions = 32;
  std::uint64_t seed = 0;
  Rational eps0 = 0;  // 0: chosen from the sample spacing
  std::size_t density = 10;
  int refinements = 3;
  PatchOptions patch;
};

struct BoundaryCover {
  std::vector<Patch> patches;
  bool verified = false;
  std::size_t verification_points = 0;
  std::vector<std::vector<double>> uncovered;
  double max_boundary_norm = 0;
};

/// Patches centered at sampled boundary points; a singular boundary point
/// or a rejected patch throws HypothesisViolation.
BoundaryCover boundary_cover(const RZInstance& inst, const CoverOptions& opts = {});

/// Perspective lift of the union; `radius` bounds every shadow.
ShadowRep convex_hull_shadows(const std::vector<ShadowRep>& shadows, const Rational& radius);

/// Closure of the cone over a shadow contained in {<c, x> = level}, level > 0.
ShadowRep conical_hull(const ShadowRep& shadow, std::span<const Rational> c, const Rational& level);

/// {M x + t : x in shadow}.
ShadowRep affine_image(const ShadowRep& shadow, const RMatrix& m, std::span<const Rational> t);

/// shadow + span(basis).
ShadowRep minkowski_subspace(const ShadowRep& shadow, const std::vector<RVector>& basis);

/// {y : (y with value inserted at `index`) in shadow}.
ShadowRep fix_coordinate(const ShadowRep& shadow, std::size_t index, const Rational& value);

/// True iff the equalities of `shadow` imply <c, x> = level exactly.
bool certifies_slice(const ShadowRep& shadow, std::span<const Rational> c, const Rational& level);

enum class ShadowVerdict { member, non_member, inconclusive };

const char* to_string(ShadowVerdict v);

struct MembershipResult {
  ShadowVerdict verdict = ShadowVerdict::inconclusive;
  double slack = 0;
  SDPStatus status = SDPStatus::numerical_error;
  int iterations = 0;
  std::string diagnostics;
};

/// Float form of a shadow, converted once and queried many times.
class PreparedShadow {
 public:
  explicit PreparedShadow(const ShadowRep& shadow);

  std::size_t ambient() const { return ambient_; }
  const SDPProblem& problem() const { return problem_; }
  /// member iff min{t : pencils + t I >= 0} <= tol, non-member iff >= 10 tol.
  /// Members are certified by a primal point, non-members by the dual bound.
  MembershipResult membership(std::span<const double> x, double tol = 1e-5, const SDPOptions& opts = {}) const;
  /// max_j -lambda_min(pencil_j(y)) for a full variable vector y; +inf if y
  /// misses the equalities.
  double primal_slack(const Eigen::VectorXd& y) const;

 private:
  std::size_t ambient_;
  SDPProblem problem_;
};

MembershipResult shadow_membership(const ShadowRep& shadow, std::span<const double> x, double tol = 1e-5);

struct ConeShadowOptions {
  int order = 0;  // 0: ceil(deg / 2)
  int max_order = 4;
  std::size_t directions = 0;  // 0: 24 in a plane, 48 otherwise
  std::uint64_t seed = 0;
  std::size_t hyperbolicity_samples = 500;
  std::size_t boundary_samples = 200;
  std::size_t exactness_probes = 8;  // outward points per patch that must be rejected
};

struct ConeShadow {
  ShadowRep shadow;
  nlohmann::json report;
};

/// Lineality split, compactifying slice, boundary cover, per-patch moment
/// relaxations, convex hull, cone and linear image back. Hypothesis failures
/// throw HypothesisViolation naming the stage.
ConeShadow build_cone_shadow(const HyperbolicInstance& inst, const ConeShadowOptions& opts = {});

nlohmann::json to_json(const ShadowRep& shadow);
ShadowRep shadow_from_json(const nlohmann::json& j);

}  // namespace hypshadow
