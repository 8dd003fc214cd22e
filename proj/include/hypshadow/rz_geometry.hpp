#pragma once

// Real-zero polynomials and their rigidly convex sets S_e(p).

#include "hypshadow/hyperbolicity.hpp"
#include "hypshadow/polynomial.hpp"
#include "hypshadow/real_roots.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace hypshadow {

class RZInstance {
 public:
  /// factors default to {p}; their product must equal p up to a nonzero
  /// rational constant, and p(e) != 0.
  RZInstance(Polynomial p, RVector e, std::vector<Polynomial> factors = {});

  const Polynomial& p() const { return p_; }
  const RVector& e() const { return e_; }
  const std::vector<Polynomial>& factors() const { return factors_; }
  std::size_t dim() const { return p_.nvars(); }

 private:
  Polynomial p_;
  RVector e_;
  std::vector<Polynomial> factors_;
};

/// Exact real-rootedness of p(e + t a) on sampled sphere points a.
SampledReport is_real_zero_sampled(const RZInstance& inst, std::size_t samples, std::uint64_t seed);

/// Member iff p(e + t(a - e)) has no root in [0, 1); boundary members report
/// the vanishing order at t = 1 as multiplicity.
MembershipVerdict rz_membership(const RZInstance& inst, std::span<const Rational> a);
MembershipVerdict rz_membership(const Polynomial& p, std::span<const Rational> e, std::span<const Rational> a);

enum class QCStatus { strict, degenerate, indefinite };

const char* to_string(QCStatus s);

struct QCVerdict {
  QCStatus status = QCStatus::strict;
  RVector gradient;
  RMatrix hessian;
  std::vector<RVector> complement;  // rational basis of the gradient's orthogonal complement
  RMatrix restricted;               // complement^T H complement
  std::vector<double> projected_spectrum;
  bool float_strict = true;  // verdict of the floating screen alone
  RVector witness;           // empty when strict
  Rational witness_value;    // witness^T H witness (0 degenerate, > 0 indefinite)
};

/// Negative definiteness of H(g; a) on the orthogonal complement of the
/// gradient (all of R^n if the gradient vanishes), certified exactly.
QCVerdict strict_quasiconcavity(const Polynomial& g, std::span<const Rational> a, double tol = 1e-9);

/// True iff p vanishes on the whole line a + t v.
bool line_vanishing_check(const Polynomial& p, std::span<const Rational> a, std::span<const Rational> v);

struct BoundaryPoint {
  RVector direction;
  RealRoot root;  // p(e + root * direction) = 0, smallest positive root
  int multiplicity = 1;
  std::vector<double> point;
  std::optional<RVector> exact;  // when the root is rational
};

/// Boundary point along a single ray; throws HypothesisViolation
/// ("compactness") if the ray never leaves S.
BoundaryPoint boundary_point(const RZInstance& inst, std::span<const Rational> direction);

std::vector<BoundaryPoint> boundary_sample(const RZInstance& inst, std::size_t directions, std::uint64_t seed);

struct PointednessReport {
  bool pointed = true;
  std::vector<RVector> invariant_directions;  // p(x + t v) = p(x) for all x, t
  std::vector<RVector> unbounded_lines;       // sampled u with both e +- t u unbounded
  std::size_t probes = 0;
};

PointednessReport pointedness_check(const RZInstance& inst, std::size_t probes = 64, std::uint64_t seed = 0);

struct SingularPoint {
  std::vector<double> point;
  std::optional<RVector> exact;
  int multiplicity = 2;  // exact from the ray restriction when `exact`, a lower bound otherwise
};

/// Boundary points where p and its gradient vanish, found by Gauss-Newton
/// from sampled boundary points and snapped to small-denominator rationals.
std::vector<SingularPoint> singular_boundary_scan(const RZInstance& inst, std::size_t directions, std::uint64_t seed);

}  // namespace hypshadow
