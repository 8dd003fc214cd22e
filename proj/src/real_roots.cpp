#include "hypshadow/real_roots.hpp"

#include "hypshadow/error.hpp"

#include <algorithm>

namespace hypshadow {

namespace {

void require_nonzero(const UniPoly& q, const char* what) {
  if (q.is_zero()) throw DomainError(std::string(what) + ": zero polynomial");
}

int sign_of(const Rational& x) { return sgn(x); }

// Cauchy bound: every root has |t| < bound.
Rational cauchy_bound(const UniPoly& p) {
  Rational m = 0;
  for (int i = 0; i < p.degree(); ++i) m = std::max(m, Rational(abs(p.coeff(static_cast<std::size_t>(i)) / p.leading())));
  return m + 1;
}

}  // namespace

std::map<int, int> SquarefreeDecomposition::structure() const {
  std::map<int, int> s;
  for (std::size_t i = 0; i < factors.size(); ++i)
    if (factors[i].degree() > 0) s[static_cast<int>(i + 1)] = factors[i].degree();
  return s;
}

SquarefreeDecomposition squarefree(const UniPoly& q) {
  require_nonzero(q, "squarefree");
  SquarefreeDecomposition out;
  const UniPoly f = q.monic();
  if (f.degree() == 0) {
    out.squarefree = UniPoly::constant(1);
    return out;
  }
  // Yun's algorithm.
  const UniPoly df = f.derivative();
  const UniPoly a0 = gcd(f, df);
  UniPoly b = f.divmod(a0).first;
  UniPoly c = df.divmod(a0).first;
  UniPoly d = c - b.derivative();
  out.squarefree = b.monic();
  while (b.degree() > 0) {
    const UniPoly a = gcd(b, d);
    out.factors.push_back(a.monic());
    b = b.divmod(a).first;
    c = d.divmod(a).first;
    d = c - b.derivative();
  }
  while (!out.factors.empty() && out.factors.back().degree() == 0) out.factors.pop_back();
  return out;
}

SturmSequence::SturmSequence(const UniPoly& p) {
  require_nonzero(p, "SturmSequence");
  seq_.push_back(p.primitive());
  if (p.degree() <= 0) return;
  seq_.push_back(p.derivative().primitive());
  while (seq_.back().degree() > 0) {
    const UniPoly r = seq_[seq_.size() - 2].divmod(seq_.back()).second;
    if (r.is_zero()) break;
    seq_.push_back((-r).primitive());
  }
}

int SturmSequence::variations(const Rational& x) const {
  int changes = 0;
  int last = 0;
  for (const auto& p : seq_) {
    const int s = p.sign_at(x);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

int SturmSequence::variations_at_neg_inf() const {
  int changes = 0, last = 0;
  for (const auto& p : seq_) {
    int s = sign_of(p.leading());
    if (p.degree() % 2 == 1) s = -s;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

int SturmSequence::variations_at_pos_inf() const {
  int changes = 0, last = 0;
  for (const auto& p : seq_) {
    const int s = sign_of(p.leading());
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

int SturmSequence::count_open_closed(const std::optional<Rational>& lo, const std::optional<Rational>& hi) const {
  const int vlo = lo ? variations(*lo) : variations_at_neg_inf();
  const int vhi = hi ? variations(*hi) : variations_at_pos_inf();
  return vlo - vhi;
}

namespace {

std::size_t count_distinct_half_open(const UniPoly& sq, const std::optional<Rational>& lo,
                                     const std::optional<Rational>& hi) {
  if (sq.degree() <= 0) return 0;
  const SturmSequence s(sq);
  int n = s.count_open_closed(lo, hi);
  if (lo && sq.eval(*lo) == 0) ++n;
  if (hi && sq.eval(*hi) == 0) --n;
  return static_cast<std::size_t>(n);
}

}  // namespace

std::size_t count_roots_in(const UniPoly& q, const std::optional<Rational>& lo, const std::optional<Rational>& hi,
                           bool with_multiplicity) {
  require_nonzero(q, "count_roots_in");
  if (lo && hi && !(*lo < *hi)) throw DomainError("count_roots_in: need lo < hi");
  const SquarefreeDecomposition sf = squarefree(q);
  if (!with_multiplicity) return count_distinct_half_open(sf.squarefree, lo, hi);
  std::size_t total = 0;
  for (std::size_t i = 0; i < sf.factors.size(); ++i)
    total += (i + 1) * count_distinct_half_open(sf.factors[i], lo, hi);
  return total;
}

bool is_real_rooted(const UniPoly& q) {
  require_nonzero(q, "is_real_rooted");
  const SquarefreeDecomposition sf = squarefree(q);
  if (sf.squarefree.degree() <= 0) return true;
  const SturmSequence s(sf.squarefree);
  return s.count_open_closed(std::nullopt, std::nullopt) == sf.squarefree.degree();
}

int vanishing_order(const UniPoly& q, const Rational& t0) {
  require_nonzero(q, "vanishing_order");
  int m = 0;
  UniPoly cur = q;
  const UniPoly lin = UniPoly::linear_root(t0);
  while (cur.degree() >= 1 && cur.eval(t0) == 0) {
    cur = cur.divmod(lin).first;
    ++m;
  }
  return m;
}

const char* to_string(NonnegativeStatus s) {
  switch (s) {
    case NonnegativeStatus::all_positive: return "yes_all_positive";
    case NonnegativeStatus::with_zero: return "yes_with_zero";
    case NonnegativeStatus::negative_root: return "no";
    case NonnegativeStatus::not_real_rooted: return "not_real_rooted";
  }
  return "unknown";
}

NonnegativeRoots all_roots_nonnegative(const UniPoly& q) {
  require_nonzero(q, "all_roots_nonnegative");
  if (!is_real_rooted(q)) return {NonnegativeStatus::not_real_rooted, 0};
  const int z = vanishing_order(q, 0);
  if (count_roots_in(q, std::nullopt, Rational(0)) > 0) return {NonnegativeStatus::negative_root, z};
  return {z > 0 ? NonnegativeStatus::with_zero : NonnegativeStatus::all_positive, z};
}

// ---------------------------------------------------------------------------

double RealRoot::approx() const {
  if (exact()) return lo.get_d();
  return Rational((lo + hi) / 2).get_d();
}

void RealRoot::refine(const Rational& width) {
  while (!exact() && hi - lo >= width) {
    if (factor.eval(hi) == 0) {
      lo = hi;
      return;
    }
    const Rational mid = (lo + hi) / 2;
    const int sm = factor.sign_at(mid);
    if (sm == 0) {  // the only root of factor in (lo, hi]
      lo = hi = mid;
      return;
    }
    const int sl = factor.sign_at(lo);
    if (sl != 0) {
      if (sm == sl) {
        lo = mid;
      } else {
        hi = mid;
      }
    } else if (SturmSequence(factor).count_open_closed(lo, mid) == 1) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
}

bool RealRoot::snap_rational() {
  if (exact()) return true;
  // a rational root m/k of the primitive factor has k | lead, so lead * root is an integer
  const mpz_class lead = abs(factor.primitive().leading().get_num());
  refine(Rational(mpz_class(1), 2 * lead));
  if (exact()) return true;
  mpz_class m;
  const Rational scaled_hi = hi * lead;
  mpz_fdiv_q(m.get_mpz_t(), scaled_hi.get_num_mpz_t(), scaled_hi.get_den_mpz_t());
  Rational cand(m, lead);
  cand.canonicalize();
  if (cand <= lo || factor.eval(cand) != 0) return false;
  lo = hi = cand;
  return true;
}

int RealRoot::compare(const Rational& x) {
  while (true) {
    if (exact()) return sgn(lo - x);
    if (x <= lo) return 1;
    if (x >= hi) {
      if (x == hi) {
        // root in (lo, hi], equals hi only if factor(hi) == 0
        if (factor.eval(hi) == 0) {
          lo = hi;
          return 0;
        }
        return -1;
      }
      return -1;
    }
    // lo < x < hi
    if (factor.eval(x) == 0) {
      lo = hi = x;
      return 0;
    }
    const SturmSequence s(factor);
    if (s.count_open_closed(lo, x) == 1) {
      hi = x;
      return -1;
    }
    lo = x;
    return 1;
  }
}

namespace {

void isolate_factor(const UniPoly& f, int multiplicity, std::vector<RealRoot>& out) {
  if (f.degree() <= 0) return;
  const SturmSequence s(f);
  const Rational bound = cauchy_bound(f);
  struct Pending {
    Rational lo, hi;
    int count;
  };
  std::vector<Pending> stack{{-bound, bound, s.count_open_closed(-bound, bound)}};
  while (!stack.empty()) {
    Pending p = stack.back();
    stack.pop_back();
    if (p.count == 0) continue;
    if (p.count == 1) {
      RealRoot r{p.lo, p.hi, multiplicity, f};
      if (f.eval(p.hi) == 0) r.lo = p.hi;
      out.push_back(std::move(r));
      continue;
    }
    const Rational mid = (p.lo + p.hi) / 2;
    const int left = s.count_open_closed(p.lo, mid);
    stack.push_back({mid, p.hi, p.count - left});
    stack.push_back({p.lo, mid, left});
  }
}

}  // namespace

std::vector<RealRoot> isolate_real_roots(const UniPoly& q) {
  require_nonzero(q, "isolate_real_roots");
  const SquarefreeDecomposition sf = squarefree(q);
  std::vector<RealRoot> roots;
  for (std::size_t i = 0; i < sf.factors.size(); ++i) isolate_factor(sf.factors[i], static_cast<int>(i + 1), roots);
  // Roots of different factors are distinct; refine until intervals are disjoint.
  auto overlaps = [](const RealRoot& a, const RealRoot& b) {
    if (a.exact() && b.exact()) return false;
    const Rational& alo = a.lo;
    const Rational& ahi = a.hi;
    const Rational& blo = b.lo;
    const Rational& bhi = b.hi;
    if (a.exact()) return blo < alo && alo <= bhi;
    if (b.exact()) return alo < blo && blo <= ahi;
    return alo < bhi && blo < ahi;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < roots.size(); ++i)
      for (std::size_t j = i + 1; j < roots.size(); ++j)
        if (roots[i].factor != roots[j].factor && overlaps(roots[i], roots[j])) {
          const Rational wi = roots[i].hi - roots[i].lo;
          const Rational wj = roots[j].hi - roots[j].lo;
          roots[i].refine(wi / 2);
          roots[j].refine(wj / 2);
          changed = true;
        }
  }
  std::sort(roots.begin(), roots.end(), [](const RealRoot& a, const RealRoot& b) { return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo); });
  return roots;
}

std::optional<RealRoot> smallest_root_above(const UniPoly& q, const Rational& t0) {
  // isolate_real_roots returns pairwise disjoint intervals in ascending order.
  for (auto& r : isolate_real_roots(q))
    if (r.compare(t0) > 0) return r;
  return std::nullopt;
}

std::vector<NumericRoot> numeric_roots(const UniPoly& q, double tol) {
  require_nonzero(q, "numeric_roots");
  if (!(tol > 0)) throw DomainError("numeric_roots: tolerance must be positive");
  auto roots = isolate_real_roots(q);
  std::vector<NumericRoot> out;
  const Rational width = from_double(tol);
  for (auto& r : roots) {
    r.refine(width);
    out.push_back({r.approx(), r.multiplicity});
  }
  std::sort(out.begin(), out.end(), [](const NumericRoot& a, const NumericRoot& b) { return a.value < b.value; });
  return out;
}

RootCountCertificate certify_roots(const UniPoly& q) {
  require_nonzero(q, "certify_roots");
  RootCountCertificate c;
  c.polynomial = q;
  const SquarefreeDecomposition sf = squarefree(q);
  c.squarefree_part = sf.squarefree;
  c.total_degree = static_cast<std::size_t>(std::max(q.degree(), 0));
  c.distinct_real_roots = count_distinct_half_open(sf.squarefree, std::nullopt, std::nullopt);
  const std::optional<Rational> zero = Rational(0), one = Rational(1);
  c.interval_counts.push_back({std::nullopt, zero, count_roots_in(q, std::nullopt, zero, true)});
  c.interval_counts.push_back({zero, one, count_roots_in(q, zero, one, true)});
  c.interval_counts.push_back({one, std::nullopt, count_roots_in(q, one, std::nullopt, true)});
  return c;
}

}  // namespace hypshadow
