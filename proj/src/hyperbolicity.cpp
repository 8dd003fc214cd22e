#include "hypshadow/hyperbolicity.hpp"

#include "hypshadow/error.hpp"
#include "hypshadow/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace hypshadow {

namespace {

RVector negated(std::span<const Rational> v) {
  RVector out(v.begin(), v.end());
  for (auto& x : out) x = -x;
  return out;
}

int order_at_zero_along(const Polynomial& h, std::span<const Rational> a, std::span<const Rational> f) {
  const UniPoly q = line_restriction(h, a, negated(f));
  if (q.is_zero()) return std::numeric_limits<int>::max();
  return vanishing_order(q, 0);
}

double norm2(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

HyperbolicInstance::HyperbolicInstance(Polynomial h, RVector e) : h_(std::move(h)), e_(std::move(e)) {
  require_dims(e_.size(), h_.nvars(), "HyperbolicInstance: direction");
  if (h_.is_zero() || h_.degree() < 1 || !h_.is_homogeneous())
    throw DomainError("HyperbolicInstance: h must be homogeneous of positive degree");
  if (h_.evaluate(e_) == 0) throw DomainError("HyperbolicInstance: h(e) = 0");
  degree_ = h_.degree();
}

const char* to_string(MembershipStatus s) {
  switch (s) {
    case MembershipStatus::interior: return "interior";
    case MembershipStatus::boundary: return "boundary";
    case MembershipStatus::outside: return "outside";
    case MembershipStatus::not_real_rooted: return "not_real_rooted";
  }
  return "unknown";
}

SampledReport is_hyperbolic_sampled(const HyperbolicInstance& inst, std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw DomainError("is_hyperbolic_sampled: need at least one sample");
  SampledReport r{samples, seed, {}};
  const RVector minus_e = negated(inst.e());
  for (std::size_t i = 0; i < samples; ++i) {
    const RVector a = rational_direction(gaussian_direction(inst.dim(), seed, i));
    if (!is_real_rooted(line_restriction(inst.h(), a, minus_e))) r.failures.push_back(a);
  }
  return r;
}

MembershipVerdict cone_membership(const HyperbolicInstance& inst, std::span<const Rational> a) {
  require_dims(a.size(), inst.dim(), "cone_membership: point");
  MembershipVerdict v;
  v.restricted = line_restriction(inst.h(), a, negated(inst.e()));
  v.roots = certify_roots(v.restricted);
  const NonnegativeRoots nn = all_roots_nonnegative(v.restricted);
  switch (nn.status) {
    case NonnegativeStatus::not_real_rooted: v.status = MembershipStatus::not_real_rooted; break;
    case NonnegativeStatus::negative_root: v.status = MembershipStatus::outside; break;
    case NonnegativeStatus::with_zero:
      v.status = MembershipStatus::boundary;
      v.multiplicity = nn.zero_order;
      break;
    case NonnegativeStatus::all_positive: v.status = MembershipStatus::interior; break;
  }
  return v;
}

int multiplicity(const HyperbolicInstance& inst, std::span<const Rational> a, std::span<const Rational> f) {
  require_dims(a.size(), inst.dim(), "multiplicity: point");
  require_dims(f.size(), inst.dim(), "multiplicity: direction");
  if (cone_membership(inst, f).status != MembershipStatus::interior)
    throw DomainError("multiplicity: f is not an interior point of the cone");
  return order_at_zero_along(inst.h(), a, f);
}

LinealityResult lineality_space(const HyperbolicInstance& inst, std::size_t probes, std::uint64_t seed) {
  const std::size_t n = inst.dim();
  // v is in L iff the derivative of h along v vanishes identically.
  std::vector<Polynomial> partials;
  std::set<Exponent, GradedLess> monomials;
  for (std::size_t i = 0; i < n; ++i) {
    partials.push_back(inst.h().partial(i));
    for (const auto& [e, c] : partials.back().terms()) monomials.insert(e);
  }
  RMatrix system(std::max<std::size_t>(monomials.size(), 1), n);
  std::size_t row = 0;
  for (const auto& m : monomials) {
    for (std::size_t i = 0; i < n; ++i) system(row, i) = partials[i].coeff(m);
    ++row;
  }
  LinealityResult out;
  out.basis = kernel(system);
  for (const auto& v : out.basis)
    if (order_at_zero_along(inst.h(), v, inst.e()) != inst.degree())
      throw NumericError("lineality_space: kernel vector without full multiplicity");
  out.complement = orthogonal_complement(out.basis, n);

  out.probes = probes;
  std::vector<RVector> span = out.basis;
  for (std::size_t i = 0; i < probes; ++i) {
    const RVector v = rational_direction(gaussian_direction(n, seed, i));
    if (order_at_zero_along(inst.h(), v, inst.e()) != inst.degree()) continue;
    ++out.full_multiplicity_probes;
    span.push_back(v);
    if (rank(RMatrix::from_rows(span)) != out.basis.size())
      throw NumericError("lineality_space: probe of full multiplicity outside the derivative kernel");
    span.pop_back();
  }
  return out;
}

HyperbolicInstance pointed_part(const HyperbolicInstance& inst, const LinealityResult& lineality) {
  const std::size_t n = inst.dim();
  const std::size_t m = lineality.complement.size();
  if (m == 0) throw DomainError("pointed_part: the cone is a subspace");
  std::vector<Polynomial> images;
  for (std::size_t i = 0; i < n; ++i) {
    RVector coeffs(m);
    for (std::size_t k = 0; k < m; ++k) coeffs[k] = lineality.complement[k][i];
    images.push_back(Polynomial::linear(coeffs));
  }
  const RMatrix b = RMatrix::from_rows(lineality.complement);  // m x n
  const RMatrix gram = b * b.transpose();
  const auto w = solve_any(gram, b * std::span<const Rational>(inst.e()));
  if (!w) throw NumericError("pointed_part: singular complement basis");
  return HyperbolicInstance(compose(inst.h(), images), *w);
}

ConeBoundarySample cone_boundary_sample(const HyperbolicInstance& inst, std::size_t directions, std::uint64_t seed) {
  ConeBoundarySample out;
  const auto dirs = sample_directions(inst.dim(), directions, seed);
  const std::vector<double> e = to_doubles(inst.e());
  for (const auto& d : dirs) {
    const RVector u = rational_direction(d);
    auto root = smallest_root_above(line_restriction(inst.h(), inst.e(), u), 0);
    if (!root) {
      out.recession.push_back(u);
      continue;
    }
    root->refine(Rational(mpz_class(1), mpz_class(1) << 40));
    const double s = root->approx();
    std::vector<double> p(e.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = e[i] + s * u[i].get_d();
    out.points.push_back({u, *root, root->multiplicity, std::move(p)});
  }
  return out;
}

NuijResult nuij_smooth(const HyperbolicInstance& inst, const Polynomial& ell, const std::vector<RVector>& watch,
                       const NuijOptions& opts) {
  require_dims(ell.nvars(), inst.dim(), "nuij_smooth: l");
  if (ell.degree() != 1 || !ell.is_homogeneous()) throw DomainError("nuij_smooth: l must be a linear form");
  const Rational ell_e = ell.evaluate(inst.e());
  if (ell_e == 0) throw DomainError("nuij_smooth: l(e) = 0");
  for (const auto& a : watch) require_dims(a.size(), inst.dim(), "nuij_smooth: watch point");
  const Polynomial correction = ell * directional_derivative(inst.h(), inst.e());
  const Rational scale = 1 / abs(ell_e);

  for (int k = opts.first_exponent; k <= opts.last_exponent; ++k) {
    const Rational eps = scale / Rational(mpz_class(1) << static_cast<unsigned>(k));
    Polynomial ht = inst.h() + correction * eps;
    if (ht.evaluate(inst.e()) == 0) continue;
    const HyperbolicInstance smoothed(ht, inst.e());
    if (!is_hyperbolic_sampled(smoothed, opts.samples, opts.seed).passed()) continue;

    NuijResult r{std::move(ht), eps, k, opts.samples, {}};
    for (const auto& a : watch) {
      NuijWatch w;
      w.point = a;
      w.on_hypersurface = inst.h().evaluate(a) == 0;
      w.ell_vanishes = ell.evaluate(a) == 0;
      w.before = order_at_zero_along(inst.h(), a, inst.e());
      w.after = order_at_zero_along(r.h, a, inst.e());
      w.drop_ok = (w.on_hypersurface && !w.ell_vanishes) ? w.after == w.before - 1 : w.after == w.before;
      r.watch.push_back(std::move(w));
    }
    return r;
  }
  throw DomainError("nuij_smooth: no eps on the grid passes sampled hyperbolicity");
}

NuijIteration nuij_iterate(const HyperbolicInstance& inst, const Polynomial& ell, const std::vector<RVector>& watch,
                           const NuijOptions& opts, int max_iterations, std::size_t boundary_samples) {
  NuijIteration out{inst.h(), {}, 0};
  auto worst = [&](const Polynomial& h) {
    const HyperbolicInstance cur(h, inst.e());
    int m = 0;
    for (const auto& a : watch)
      if (h.evaluate(a) == 0) m = std::max(m, order_at_zero_along(h, a, inst.e()));
    for (const auto& p : cone_boundary_sample(cur, boundary_samples, opts.seed).points) m = std::max(m, p.multiplicity);
    return m;
  };
  out.max_sampled_multiplicity = worst(out.h);
  for (int it = 0; it < max_iterations && out.max_sampled_multiplicity > 1; ++it) {
    NuijResult step = nuij_smooth(HyperbolicInstance(out.h, inst.e()), ell, watch, opts);
    out.h = step.h;
    out.steps.push_back(std::move(step));
    out.max_sampled_multiplicity = worst(out.h);
  }
  return out;
}

CompactifyingFunctional compactifying_functional(const HyperbolicInstance& inst, std::uint64_t seed,
                                                 std::size_t directions) {
  if (!lineality_space(inst, 0, seed).basis.empty())
    throw DomainError("compactifying_functional: pointedness not established (nonzero lineality space)");
  if (directions == 0) directions = 64 * inst.dim();
  const ConeBoundarySample sample = cone_boundary_sample(inst, directions, seed);
  std::vector<std::vector<double>> rays;
  for (const auto& p : sample.points) rays.push_back(p.point);
  for (const auto& u : sample.recession) rays.push_back(to_doubles(u));
  for (auto& r : rays) {
    const double nr = norm2(r);
    for (auto& x : r) x /= nr;
  }

  std::vector<std::pair<std::string, RVector>> candidates{{"e", inst.e()}};
  std::vector<double> mean(inst.dim(), 0.0);
  for (const auto& r : rays)
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += r[i];
  if (norm2(mean) > 0) candidates.emplace_back("ray_mean", rational_direction(mean, 16));

  for (const auto& [name, c] : candidates) {
    const std::vector<double> cd = to_doubles(c);
    const double nc = norm2(cd);
    double delta = 1;
    for (const auto& r : rays) {
      double ip = 0;
      for (std::size_t i = 0; i < r.size(); ++i) ip += cd[i] * r[i];
      delta = std::min(delta, ip / nc);
    }
    const Rational level = dot(c, inst.e());
    if (!(delta > 1e-9) || level <= 0) continue;
    CompactifyingFunctional out;
    out.c = c;
    out.level = level;
    out.delta = delta;
    out.probes = rays.size();
    out.candidate = name;
    for (std::size_t i = 1; i < c.size(); ++i)
      if (abs(c[i]) > abs(c[out.eliminated])) out.eliminated = i;
    return out;
  }
  throw DomainError("compactifying_functional: no candidate functional is positive on all probed rays");
}

}  // namespace hypshadow
