#pragma once

// Hyperbolic polynomials: cone membership, multiplicity, lineality, Nuij
// smoothing and the compactifying slice of a pointed cone.

#include "hypshadow/polynomial.hpp"
#include "hypshadow/real_roots.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hypshadow {

class HyperbolicInstance {
 public:
  /// Requires h homogeneous of degree >= 1 and h(e) != 0.
  HyperbolicInstance(Polynomial h, RVector e);

  const Polynomial& h() const { return h_; }
  const RVector& e() const { return e_; }
  int degree() const { return degree_; }
  std::size_t dim() const { return h_.nvars(); }

 private:
  Polynomial h_;
  RVector e_;
  int degree_;
};

enum class MembershipStatus { interior, boundary, outside, not_real_rooted };

const char* to_string(MembershipStatus s);

struct MembershipVerdict {
  MembershipStatus status = MembershipStatus::outside;
  int multiplicity = 0;  // boundary only
  UniPoly restricted;    // the univariate polynomial the verdict was read from
  RootCountCertificate roots;
};

struct SampledReport {
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<RVector> failures;  // exact counterexamples
  bool passed() const { return failures.empty(); }
};

/// Exact real-rootedness of h(a - t e) on `samples` sphere points a.
SampledReport is_hyperbolic_sampled(const HyperbolicInstance& inst, std::size_t samples, std::uint64_t seed);

/// Verdict from the roots of h(a - t e).
MembershipVerdict cone_membership(const HyperbolicInstance& inst, std::span<const Rational> a);

/// Vanishing order of h(a - t f) at t = 0; f must be interior.
int multiplicity(const HyperbolicInstance& inst, std::span<const Rational> a, std::span<const Rational> f);

struct LinealityResult {
  std::vector<RVector> basis;       // spans L
  std::vector<RVector> complement;  // spans the orthogonal complement of L
  std::size_t probes = 0;
  std::size_t full_multiplicity_probes = 0;  // probes with multiplicity d (all must lie in L)
};

LinealityResult lineality_space(const HyperbolicInstance& inst, std::size_t probes, std::uint64_t seed);

/// h restricted to the orthogonal complement of L, in the coordinates of
/// `lineality.complement`, with e projected accordingly.
HyperbolicInstance pointed_part(const HyperbolicInstance& inst, const LinealityResult& lineality);

struct ConeBoundaryPoint {
  RVector direction;  // the ray e + s * direction
  RealRoot root;      // s
  int multiplicity;
  std::vector<double> point;
};

struct ConeBoundarySample {
  std::vector<ConeBoundaryPoint> points;
  std::vector<RVector> recession;  // directions whose ray never leaves the cone
};

/// Boundary points of the cone along rays from e.
ConeBoundarySample cone_boundary_sample(const HyperbolicInstance& inst, std::size_t directions, std::uint64_t seed);

struct NuijOptions {
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  int first_exponent = 1;  // eps = 2^-k / |l(e)| for k in [first, last]
  int last_exponent = 20;
};

struct NuijWatch {
  RVector point;
  bool on_hypersurface = false;  // h(a) == 0
  bool ell_vanishes = false;     // l(a) == 0
  int before = 0;
  int after = 0;
  bool drop_ok = false;  // after == before - 1 when expected, unchanged otherwise
};

struct NuijResult {
  Polynomial h;
  Rational eps;
  int exponent = 0;
  std::size_t samples = 0;
  std::vector<NuijWatch> watch;
};

/// h + eps * l * d_e h with the largest grid eps that passes sampling.
NuijResult nuij_smooth(const HyperbolicInstance& inst, const Polynomial& ell, const std::vector<RVector>& watch,
                       const NuijOptions& opts = {});

struct NuijIteration {
  Polynomial h;
  std::vector<NuijResult> steps;
  int max_sampled_multiplicity = 0;  // over watch points and sampled boundary points
};

/// Smooths repeatedly until every watch point and every sampled boundary
/// point has multiplicity <= 1.
NuijIteration nuij_iterate(const HyperbolicInstance& inst, const Polynomial& ell, const std::vector<RVector>& watch,
                           const NuijOptions& opts = {}, int max_iterations = 4, std::size_t boundary_samples = 200);

struct CompactifyingFunctional {
  RVector c;
  Rational level;  // <c, e>
  std::size_t eliminated = 0;
  double delta = 0;
  std::size_t probes = 0;
  std::string candidate;
};

CompactifyingFunctional compactifying_functional(const HyperbolicInstance& inst, std::uint64_t seed,
                                                 std::size_t directions = 0);

}  // namespace hypshadow
