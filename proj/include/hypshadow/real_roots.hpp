#pragma once

// Exact univariate real-root certification: Sturm counting on squarefree
// parts, Yun decomposition for multiplicities, bisection isolation.

#include "hypshadow/rational.hpp"
#include "hypshadow/unipoly.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

namespace hypshadow {

struct SquarefreeDecomposition {
  UniPoly squarefree;            // q / gcd(q, q'), monic
  std::vector<UniPoly> factors;  // factors[i]: monic squarefree, roots of multiplicity exactly i+1
  /// multiplicity -> number of complex roots (with that multiplicity), e.g.
  /// (t-1)^2 (t+2) gives {1:1, 2:1}.
  std::map<int, int> structure() const;
};

SquarefreeDecomposition squarefree(const UniPoly& q);

class SturmSequence {
 public:
  /// p should be squarefree for the counts to be root counts.
  explicit SturmSequence(const UniPoly& p);

  int variations(const Rational& x) const;
  int variations_at_neg_inf() const;
  int variations_at_pos_inf() const;
  /// Distinct roots in (lo, hi]; nullopt bounds are -inf / +inf.
  int count_open_closed(const std::optional<Rational>& lo, const std::optional<Rational>& hi) const;

  const UniPoly& base() const { return seq_.front(); }
  std::size_t length() const { return seq_.size(); }

 private:
  std::vector<UniPoly> seq_;
};

/// Root count on the half-open interval [lo, hi); nullopt lo means -inf,
/// nullopt hi means +inf. Throws DomainError on the zero polynomial.
std::size_t count_roots_in(const UniPoly& q, const std::optional<Rational>& lo, const std::optional<Rational>& hi,
                           bool with_multiplicity = false);

inline std::size_t count_roots_in(const UniPoly& q, const Rational& lo, const Rational& hi,
                                  bool with_multiplicity = false) {
  return count_roots_in(q, std::optional<Rational>(lo), std::optional<Rational>(hi), with_multiplicity);
}

bool is_real_rooted(const UniPoly& q);

/// Largest m with (t - t0)^m | q.
int vanishing_order(const UniPoly& q, const Rational& t0);

enum class NonnegativeStatus { all_positive, with_zero, negative_root, not_real_rooted };

const char* to_string(NonnegativeStatus s);

struct NonnegativeRoots {
  NonnegativeStatus status;
  int zero_order = 0;  // vanishing order at t = 0
};

NonnegativeRoots all_roots_nonnegative(const UniPoly& q);

/// A real root isolated in (lo, hi] of its squarefree factor; lo == hi means
/// the root is known exactly.
struct RealRoot {
  Rational lo, hi;
  int multiplicity = 1;
  UniPoly factor;

  bool exact() const { return lo == hi; }
  double approx() const;
  /// Shrinks the interval below `width` (no-op once exact).
  void refine(const Rational& width);
  /// Narrows so the interval lies on one side of x; returns sign of (root - x).
  int compare(const Rational& x);
  /// Pins the root exactly when it is rational.
  bool snap_rational();
};

/// All distinct real roots, ascending, with multiplicities.
std::vector<RealRoot> isolate_real_roots(const UniPoly& q);

/// Smallest root strictly greater than t0, if any.
std::optional<RealRoot> smallest_root_above(const UniPoly& q, const Rational& t0);

struct NumericRoot {
  double value;
  int multiplicity;
};

std::vector<NumericRoot> numeric_roots(const UniPoly& q, double tol);

struct IntervalCount {
  std::optional<Rational> lo, hi;  // half-open [lo, hi)
  std::size_t count;
};

struct RootCountCertificate {
  UniPoly polynomial;
  UniPoly squarefree_part;
  std::size_t distinct_real_roots = 0;
  std::size_t total_degree = 0;
  std::vector<IntervalCount> interval_counts;
};

/// Certificate with counts on (-inf,0), [0,1), [1,inf) plus the global count.
RootCountCertificate certify_roots(const UniPoly& q);

}  // namespace hypshadow
