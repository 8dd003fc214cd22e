#include "hypshadow/shadow.hpp"

#include "hypshadow/error.hpp"
#include "hypshadow/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace hypshadow {

using nlohmann::json;

namespace {

RMatrix zeros(std::size_t k) { return RMatrix(k, k); }

Rational dyadic_ceil(double x, int bits) {
  const double scale = std::ldexp(1.0, bits);
  Rational r(mpz_class(std::ceil(x * scale)), mpz_class(1) << bits);
  r.canonicalize();
  return r;
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

json point_json(std::span<const Rational> p) { return format_point(p); }

json point_json(std::span<const double> p) { return std::vector<double>(p.begin(), p.end()); }

// Accumulates sparse pencil terms keyed by variable.
class PencilBuilder {
 public:
  explicit PencilBuilder(std::size_t size) : size_(size), f0_(zeros(size)) {}

  // var < 0 is the constant term
  void add(long var, std::size_t r, std::size_t c, const Rational& v) {
    if (v == 0) return;
    RMatrix& m = var < 0 ? f0_ : slot(static_cast<std::size_t>(var));
    m(r, c) += v;
    if (r != c) m(c, r) += v;
  }

  void add_matrix(long var, const RMatrix& m) {
    RMatrix& s = var < 0 ? f0_ : slot(static_cast<std::size_t>(var));
    s = s + m;
  }

  LMIPencil build() {
    LMIPencil p{size_, std::move(f0_), {}};
    for (auto& [v, m] : terms_)
      if (!m.is_zero()) p.terms.emplace_back(v, std::move(m));
    return p;
  }

 private:
  RMatrix& slot(std::size_t var) {
    auto it = terms_.find(var);
    if (it == terms_.end()) it = terms_.emplace(var, zeros(size_)).first;
    return it->second;
  }

  std::size_t size_;
  RMatrix f0_;
  std::map<std::size_t, RMatrix> terms_;
};

Exponent add_exp(const Exponent& a, const Exponent& b) {
  Exponent r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

void enumerate_degree(std::size_t n, int d, std::size_t i, Exponent& cur, std::vector<Exponent>& out) {
  if (i + 1 == n) {
    cur[i] = d;
    out.push_back(cur);
    return;
  }
  for (int k = d; k >= 0; --k) {
    cur[i] = k;
    enumerate_degree(n, d - k, i + 1, cur, out);
  }
}

// Variables of `s` renumbered through `map` (old index -> new index).
LMIPencil remap(const LMIPencil& p, const std::vector<std::size_t>& map) {
  LMIPencil q{p.size, p.f0, {}};
  for (const auto& [v, m] : p.terms) q.terms.emplace_back(map[v], m);
  return q;
}

LinearEquality remap(const LinearEquality& e, const std::vector<std::size_t>& map) {
  LinearEquality q{{}, e.rhs};
  for (const auto& [v, c] : e.coeffs) q.coeffs.emplace_back(map[v], c);
  return q;
}

// Homogenizes pencils and equalities of `s` with the variable `lambda`.
void add_perspective(ShadowRep& out, const ShadowRep& s, const std::vector<std::size_t>& map, std::size_t lambda) {
  for (const auto& p : s.pencils) {
    LMIPencil q{p.size, zeros(p.size), {}};
    if (!p.f0.is_zero()) q.terms.emplace_back(lambda, p.f0);
    for (const auto& [v, m] : p.terms) q.terms.emplace_back(map[v], m);
    out.pencils.push_back(std::move(q));
  }
  for (const auto& e : s.equalities) {
    LinearEquality q = remap(e, map);
    if (e.rhs != 0) q.coeffs.emplace_back(lambda, -e.rhs);
    q.rhs = 0;
    out.equalities.push_back(std::move(q));
  }
}

LMIPencil nonnegative(std::size_t var) {
  RMatrix one(1, 1);
  one(0, 0) = 1;
  return LMIPencil{1, zeros(1), {{var, one}}};
}

std::vector<std::size_t> identity_map(std::size_t n, std::size_t offset) {
  std::vector<std::size_t> m(n);
  for (std::size_t i = 0; i < n; ++i) m[i] = offset + i;
  return m;
}

Polynomial signed_factor(const RZInstance& inst, std::size_t i) {
  const Polynomial& f = inst.factors()[i];
  return f.evaluate(inst.e()) < 0 ? -f : f;
}

std::vector<double> ball_point(std::size_t n, const std::vector<double>& center, double radius, std::uint64_t seed,
                               std::uint64_t index) {
  const std::vector<double> u = gaussian_direction(n, seed, 2 * index);
  const double r = radius * std::pow(uniform01(seed, 2 * index + 1), 1.0 / static_cast<double>(n));
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = center[i] + r * u[i];
  return p;
}

}  // namespace

RMatrix LMIPencil::evaluate(std::span<const Rational> v) const {
  RMatrix m = f0;
  for (const auto& [i, f] : terms) m = m + f * v[i];
  return m;
}

void ShadowRep::validate() const {
  const std::size_t n = nvars();
  for (const auto& p : pencils) {
    if (p.f0.rows() != p.size || p.f0.cols() != p.size || !p.f0.is_symmetric())
      throw DimensionError("ShadowRep: pencil constant has the wrong shape or is not symmetric");
    for (const auto& [v, m] : p.terms) {
      if (v >= n) throw DimensionError("ShadowRep: pencil references an unknown variable");
      if (m.rows() != p.size || m.cols() != p.size || !m.is_symmetric())
        throw DimensionError("ShadowRep: pencil term has the wrong shape or is not symmetric");
    }
  }
  for (const auto& e : equalities)
    for (const auto& [v, c] : e.coeffs)
      if (v >= n) throw DimensionError("ShadowRep: equality references an unknown variable");
}

std::vector<Exponent> graded_lex_monomials(std::size_t nvars, int d) {
  std::vector<Exponent> out;
  Exponent cur(nvars, 0);
  if (nvars == 0) {
    out.push_back(cur);
    return out;
  }
  for (int k = 0; k <= d; ++k) enumerate_degree(nvars, k, 0, cur, out);
  return out;
}

ShadowRep moment_relaxation(const std::vector<Polynomial>& constraints, int order) {
  if (constraints.empty()) throw DomainError("moment_relaxation: no constraints");
  const std::size_t n = constraints.front().nvars();
  int max_deg = 0;
  for (const auto& g : constraints) {
    require_dims(g.nvars(), n, "moment_relaxation: constraint");
    max_deg = std::max(max_deg, g.degree());
  }
  if (order < 1 || 2 * order < max_deg)
    throw DomainError("moment_relaxation: order " + std::to_string(order) + " too small for degree " +
                      std::to_string(max_deg));

  const std::vector<Exponent> moments = graded_lex_monomials(n, 2 * order);
  std::map<Exponent, long> index;
  std::size_t next = n;
  for (const auto& a : moments) {
    const int deg = total_degree(a);
    if (deg == 0) {
      index[a] = -1;
    } else if (deg == 1) {
      index[a] = static_cast<long>(std::find(a.begin(), a.end(), 1) - a.begin());
    } else {
      index[a] = static_cast<long>(next++);
    }
  }

  ShadowRep out;
  out.ambient = n;
  out.lifted = next - n;
  auto localizing = [&](const Polynomial* g, int k) {
    const std::vector<Exponent> basis = graded_lex_monomials(n, k);
    PencilBuilder b(basis.size());
    for (std::size_t r = 0; r < basis.size(); ++r)
      for (std::size_t c = r; c < basis.size(); ++c) {
        const Exponent ab = add_exp(basis[r], basis[c]);
        if (!g) {
          b.add(index.at(ab), r, c, 1);
          continue;
        }
        for (const auto& [gamma, coeff] : g->terms()) b.add(index.at(add_exp(ab, gamma)), r, c, coeff);
      }
    return b.build();
  };
  out.pencils.push_back(localizing(nullptr, order));
  json cons = json::array();
  for (const auto& g : constraints) {
    out.pencils.push_back(localizing(&g, order - (g.degree() + 1) / 2));
    cons.push_back(format(g, default_var_names(n)));
  }
  out.provenance = json::array({{{"stage", "moment_relaxation"}, {"order", order}, {"constraints", cons}}});
  return out;
}

std::vector<Polynomial> Patch::constraints(const RZInstance& inst) const {
  const std::size_t n = inst.dim();
  std::vector<Polynomial> out;
  for (std::size_t i : active) out.push_back(signed_factor(inst, i));
  Polynomial ball = Polynomial::constant(n, radius * radius);
  for (std::size_t i = 0; i < n; ++i) {
    const Polynomial d = Polynomial::variable(n, i) - Polynomial::constant(n, center[i]);
    ball = ball - d * d;
  }
  out.push_back(std::move(ball));
  return out;
}

ShadowRep patch_relaxation(const RZInstance& inst, const Patch& patch, int order) {
  const std::size_t n = inst.dim();
  // x = center + radius * z
  std::vector<Polynomial> images;
  for (std::size_t i = 0; i < n; ++i)
    images.push_back(Polynomial::variable(n, i) * patch.radius + Polynomial::constant(n, patch.center[i]));
  std::vector<Polynomial> local;
  for (const auto& g : patch.constraints(inst)) {
    Polynomial h = compose(g, images);
    Rational big = 0;
    for (const auto& [e, c] : h.terms()) big = std::max(big, Rational(abs(c)));
    if (big > 0) h = h * (1 / big);
    local.push_back(std::move(h));
  }
  ShadowRep rel = moment_relaxation(local, order);
  RMatrix scale(n, n);
  for (std::size_t i = 0; i < n; ++i) scale(i, i) = patch.radius;
  ShadowRep out = affine_image(rel, scale, patch.center);
  out.provenance = json::array({{{"stage", "patch_relaxation"},
                                 {"center", point_json(patch.center)},
                                 {"radius", to_string(patch.radius)},
                                 {"parts", out.provenance}}});
  return out;
}

Patch local_patch(const RZInstance& inst, const BoundaryPoint& b, const Rational& eps0, const PatchOptions& opts) {
  const std::size_t n = inst.dim();
  require_dims(b.direction.size(), n, "local_patch: direction");
  if (eps0 <= 0) throw DomainError("local_patch: eps0 must be positive");
  if (b.multiplicity >= 2) {
    throw HypothesisViolation("smoothness", "boundary point of multiplicity " + std::to_string(b.multiplicity),
                              {{"point", b.exact ? point_json(*b.exact) : point_json(b.point)},
                               {"multiplicity", b.multiplicity}});
  }

  Patch patch;
  patch.direction = b.direction;
  patch.exact_center = b.exact.has_value();
  patch.center = b.exact ? *b.exact : round_dyadic(b.point, 40);
  RealRoot root = b.root;
  if (!root.exact()) root.refine(Rational(mpz_class(1), mpz_class(1) << 60));
  std::vector<Polynomial> signed_factors;
  for (std::size_t i = 0; i < inst.factors().size(); ++i) {
    const Polynomial f = signed_factor(inst, i);
    bool active;
    if (b.exact) {
      active = f.evaluate(*b.exact) == 0;
    } else {
      const UniPoly q = line_restriction(f, inst.e(), b.direction);
      active = q.eval(root.hi) == 0 || count_roots_in(q, root.lo, root.hi) > 0;
    }
    if (active) {
      patch.active.push_back(i);
      signed_factors.push_back(f);
    }
  }
  if (patch.active.empty()) throw NumericError("local_patch: no factor vanishes at the boundary point");

  for (std::size_t k = 0; k < signed_factors.size(); ++k) {
    const QCVerdict v = strict_quasiconcavity(signed_factors[k], patch.center);
    if (v.status == QCStatus::strict) continue;
    const bool line = line_vanishing_check(signed_factors[k], patch.center, v.witness);
    throw HypothesisViolation(
        "quasi-concavity",
        line ? "the polynomial vanishes on a line through the boundary point"
             : "not strictly quasi-concave at a smooth boundary point",
        {{"point", point_json(patch.center)},
         {"factor", patch.active[k]},
         {"status", to_string(v.status)},
         {"witness", point_json(v.witness)},
         {"witness_value", to_string(v.witness_value)},
         {"line_vanishes", line}});
  }

  const std::vector<double> center = to_doubles(patch.center);
  const std::vector<double> e = to_doubles(inst.e());
  Rational eps = eps0;
  for (patch.halvings = 0; patch.halvings <= opts.max_halvings; ++patch.halvings, eps /= 2) {
    const double r = eps.get_d();
    bool ok = true;
    for (std::size_t s = 0; ok && s < opts.qc_samples; ++s) {
      const std::vector<double> target = ball_point(n, center, r, mix_seed(opts.seed, 1), s);
      std::vector<double> dir(n);
      for (std::size_t i = 0; i < n; ++i) dir[i] = target[i] - e[i];
      const RVector d = rational_direction(dir, 30);
      for (const auto& f : signed_factors) {
        auto root_f = smallest_root_above(line_restriction(f, inst.e(), d), 0);
        if (!root_f) continue;
        root_f->refine(Rational(mpz_class(1), mpz_class(1) << 50));
        const double t = root_f->approx();
        std::vector<double> bp(n);
        for (std::size_t i = 0; i < n; ++i) bp[i] = e[i] + t * d[i].get_d();
        if (distance(bp, center) > r) continue;
        ++patch.qc_checks;
        if (strict_quasiconcavity(f, round_dyadic(bp, 40)).status != QCStatus::strict) {
          ok = false;
          break;
        }
      }
    }
    // uniform points, then shells near the sphere where a foreign branch enters the ball
    for (std::size_t s = 0; ok && s < 2 * opts.local_samples; ++s) {
      std::vector<double> pt;
      if (s < opts.local_samples) {
        pt = ball_point(n, center, r, mix_seed(opts.seed, 2), s);
      } else {
        const std::vector<double> u = gaussian_direction(n, mix_seed(opts.seed, 3), s);
        const double shell = r * (1.0 - static_cast<double>(s % 4) / 8.0);
        pt = center;
        for (std::size_t i = 0; i < n; ++i) pt[i] += shell * u[i];
      }
      const RVector q = round_dyadic(pt, 30);
      bool inside = true;
      for (const auto& f : signed_factors) inside = inside && f.evaluate(q) >= 0;
      if (!inside) continue;
      ++patch.local_checks;
      const MembershipStatus st = rz_membership(inst, q).status;
      ok = st == MembershipStatus::interior || st == MembershipStatus::boundary;
    }
    // chords: every piece of a chord where all active factors are positive must lie in S,
    // so a thin foreign branch crossing the ball is found even between sample points
    for (std::size_t c = 0; ok && c < opts.local_samples; ++c) {
      const RVector base = round_dyadic(ball_point(n, center, r / 2, mix_seed(opts.seed, 4), c), 30);
      const RVector u = rational_direction(gaussian_direction(n, mix_seed(opts.seed, 5), c), 30);
      // clip base + t u to the ball
      double bu = 0, uu = 0, bb = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = base[i].get_d() - center[i], ui = u[i].get_d();
        bu += d * ui;
        uu += ui * ui;
        bb += d * d;
      }
      const double disc = std::sqrt(std::max(0.0, bu * bu - uu * (bb - r * r)));
      const Rational tl = round_dyadic(std::vector<double>{(-bu - disc) / uu * 0.999}, 30)[0];
      const Rational th = round_dyadic(std::vector<double>{(-bu + disc) / uu * 0.999}, 30)[0];
      std::vector<std::pair<Rational, Rational>> cuts;
      for (const auto& f : signed_factors) {
        for (auto& root : isolate_real_roots(line_restriction(f, base, u))) {
          root.refine(Rational(mpz_class(1), mpz_class(1) << 40));
          if (root.hi > tl && root.lo < th) cuts.emplace_back(root.lo, root.hi);
        }
      }
      std::sort(cuts.begin(), cuts.end());
      std::vector<Rational> mids;
      Rational prev = tl;
      for (const auto& [lo, hi] : cuts) {
        if (lo > prev) mids.push_back((prev + lo) / 2);
        prev = std::max(prev, hi);
      }
      if (th > prev) mids.push_back((prev + th) / 2);
      for (const Rational& t : mids) {
        RVector q(n);
        for (std::size_t i = 0; i < n; ++i) q[i] = base[i] + t * u[i];
        bool inside = true;
        for (const auto& f : signed_factors) inside = inside && f.evaluate(q) > 0;
        if (!inside) continue;
        ++patch.local_checks;
        const MembershipStatus st = rz_membership(inst, q).status;
        if (st != MembershipStatus::interior && st != MembershipStatus::boundary) {
          ok = false;
          break;
        }
      }
    }
    if (ok) {
      patch.radius = eps;
      return patch;
    }
  }
  throw NumericError("local_patch: radius underflow after " + std::to_string(opts.max_halvings) + " halvings");
}

Patch local_patch(const RZInstance& inst, std::span<const Rational> a, const Rational& eps0, const PatchOptions& opts) {
  require_dims(a.size(), inst.dim(), "local_patch: point");
  const MembershipVerdict v = rz_membership(inst, a);
  if (v.status != MembershipStatus::boundary) throw DomainError("local_patch: point is not on the boundary of S");
  BoundaryPoint b;
  b.direction = sub(a, inst.e());
  b.root.lo = b.root.hi = 1;
  b.root.factor = UniPoly({-1, 1});
  b.root.multiplicity = v.multiplicity;
  b.multiplicity = v.multiplicity;
  b.point = to_doubles(a);
  b.exact = RVector(a.begin(), a.end());
  return local_patch(inst, b, eps0, opts);
}

BoundaryCover boundary_cover(const RZInstance& inst, const CoverOptions& opts) {
  const auto singular = singular_boundary_scan(inst, opts.directions, opts.seed);
  if (!singular.empty()) {
    json pts = json::array();
    for (const auto& s : singular)
      pts.push_back({{"point", s.exact ? point_json(*s.exact) : point_json(s.point)}, {"multiplicity", s.multiplicity}});
    throw HypothesisViolation("smoothness", std::to_string(singular.size()) + " singular boundary point(s)",
                              {{"points", pts}});
  }
  const std::vector<BoundaryPoint> samples = boundary_sample(inst, opts.directions, opts.seed);
  BoundaryCover cover;
  for (const auto& s : samples) {
    double nr = 0;
    for (double x : s.point) nr += x * x;
    cover.max_boundary_norm = std::max(cover.max_boundary_norm, std::sqrt(nr));
  }
  Rational eps0 = opts.eps0;
  if (eps0 <= 0) {
    double spacing = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      double nearest = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < samples.size(); ++j)
        if (i != j) nearest = std::min(nearest, distance(samples[i].point, samples[j].point));
      if (std::isfinite(nearest)) spacing = std::max(spacing, nearest);
    }
    if (spacing == 0) spacing = cover.max_boundary_norm;
    eps0 = dyadic_ceil(1.5 * spacing, 8);
  }

  std::uint64_t index = 0;
  auto add_patch = [&](const BoundaryPoint& b) {
    PatchOptions po = opts.patch;
    po.seed = mix_seed(opts.patch.seed, index++);
    cover.patches.push_back(local_patch(inst, b, eps0, po));
  };
  for (const auto& s : samples) add_patch(s);

  const std::vector<BoundaryPoint> check =
      boundary_sample(inst, opts.directions * opts.density, mix_seed(opts.seed, 0x636f766572));
  cover.verification_points = check.size();
  auto covered = [&](const BoundaryPoint& b) {
    for (const auto& p : cover.patches)
      if (distance(b.point, to_doubles(p.center)) <= p.radius.get_d()) return true;
    return false;
  };
  for (int round = 0;; ++round) {
    cover.uncovered.clear();
    std::vector<const BoundaryPoint*> gaps;
    for (const auto& b : check)
      if (!covered(b)) gaps.push_back(&b);
    if (gaps.empty()) {
      cover.verified = true;
      break;
    }
    if (round == opts.refinements) {
      for (const auto* g : gaps) cover.uncovered.push_back(g->point);
      break;
    }
    for (const auto* g : gaps)
      if (!covered(*g)) add_patch(*g);
  }
  return cover;
}

ShadowRep convex_hull_shadows(const std::vector<ShadowRep>& shadows, const Rational& radius) {
  if (shadows.empty()) throw DomainError("convex_hull_shadows: no shadows");
  if (radius <= 0) throw DomainError("convex_hull_shadows: missing radius bound");
  const std::size_t n = shadows.front().ambient;
  ShadowRep out;
  out.ambient = n;
  std::size_t next = n;
  LinearEquality sum_lambda{{}, 1};
  std::vector<LinearEquality> sum_x(n);
  json parts = json::array();
  for (std::size_t i = 0; i < n; ++i) sum_x[i].coeffs.emplace_back(i, 1);
  for (const auto& s : shadows) {
    require_dims(s.ambient, n, "convex_hull_shadows: ambient dimension");
    s.validate();
    const std::size_t lambda = next++;
    const std::vector<std::size_t> map = identity_map(s.nvars(), next);
    next += s.nvars();
    add_perspective(out, s, map, lambda);
    out.pencils.push_back(nonnegative(lambda));

    // |x_hat| <= lambda R as an arrow matrix
    PencilBuilder guard(n + 1);
    for (std::size_t i = 0; i <= n; ++i) guard.add(static_cast<long>(lambda), i, i, radius);
    for (std::size_t i = 0; i < n; ++i) guard.add(static_cast<long>(map[i]), 0, i + 1, 1);
    out.pencils.push_back(guard.build());

    sum_lambda.coeffs.emplace_back(lambda, 1);
    for (std::size_t i = 0; i < n; ++i) sum_x[i].coeffs.emplace_back(map[i], -1);
    parts.push_back(s.provenance);
  }
  out.lifted = next - n;
  out.equalities.push_back(std::move(sum_lambda));
  for (auto& e : sum_x) out.equalities.push_back(std::move(e));
  out.provenance = json::array(
      {{{"stage", "convex_hull"}, {"count", shadows.size()}, {"radius", to_string(radius)}, {"parts", parts}}});
  return out;
}

bool certifies_slice(const ShadowRep& shadow, std::span<const Rational> c, const Rational& level) {
  require_dims(c.size(), shadow.ambient, "certifies_slice: normal");
  // restrict to the variables the equalities touch, plus the ambient ones
  std::map<std::size_t, std::size_t> cols;
  for (std::size_t i = 0; i < shadow.ambient; ++i) cols.emplace(i, cols.size());
  for (const auto& e : shadow.equalities)
    for (const auto& [v, x] : e.coeffs) cols.emplace(v, cols.size());
  const std::size_t w = cols.size() + 1;
  RMatrix a(shadow.equalities.size(), w);
  for (std::size_t r = 0; r < shadow.equalities.size(); ++r) {
    for (const auto& [v, x] : shadow.equalities[r].coeffs) a(r, cols.at(v)) += x;
    a(r, w - 1) = shadow.equalities[r].rhs;
  }
  RMatrix b(shadow.equalities.size() + 1, w);
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t j = 0; j < w; ++j) b(r, j) = a(r, j);
  for (std::size_t i = 0; i < shadow.ambient; ++i) b(a.rows(), i) = c[i];
  b(a.rows(), w - 1) = level;
  return rank(a) == rank(b);
}

ShadowRep conical_hull(const ShadowRep& shadow, std::span<const Rational> c, const Rational& level) {
  require_dims(c.size(), shadow.ambient, "conical_hull: normal");
  if (level <= 0) throw DomainError("conical_hull: level must be positive");
  if (!certifies_slice(shadow, c, level))
    throw DomainError("conical_hull: shadow not certified inside the slice <c, x> = level");
  shadow.validate();
  const std::size_t n = shadow.ambient;
  const std::size_t lambda = n;
  std::vector<std::size_t> map(shadow.nvars());
  for (std::size_t i = 0; i < map.size(); ++i) map[i] = i < n ? i : i + 1;
  ShadowRep out;
  out.ambient = n;
  out.lifted = shadow.lifted + 1;
  add_perspective(out, shadow, map, lambda);
  out.pencils.push_back(nonnegative(lambda));
  LinearEquality slice{{}, 0};
  for (std::size_t i = 0; i < n; ++i)
    if (c[i] != 0) slice.coeffs.emplace_back(i, c[i]);
  slice.coeffs.emplace_back(lambda, -level);
  out.equalities.push_back(std::move(slice));
  out.provenance = json::array({{{"stage", "conical_hull"},
                                 {"c", point_json(c)},
                                 {"level", to_string(level)},
                                 {"parts", shadow.provenance}}});
  return out;
}

ShadowRep affine_image(const ShadowRep& shadow, const RMatrix& m, std::span<const Rational> t) {
  if (m.cols() != shadow.ambient) throw DimensionError("affine_image: map does not match the ambient dimension");
  require_dims(t.size(), m.rows(), "affine_image: offset");
  const std::size_t k = m.rows();
  const std::vector<std::size_t> map = identity_map(shadow.nvars(), k);
  ShadowRep out;
  out.ambient = k;
  out.lifted = shadow.nvars();
  for (const auto& p : shadow.pencils) out.pencils.push_back(remap(p, map));
  for (const auto& e : shadow.equalities) out.equalities.push_back(remap(e, map));
  for (std::size_t i = 0; i < k; ++i) {
    LinearEquality e{{{i, 1}}, t[i]};
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0) e.coeffs.emplace_back(map[j], -m(i, j));
    out.equalities.push_back(std::move(e));
  }
  out.provenance = json::array({{{"stage", "affine_image"}, {"rows", k}, {"parts", shadow.provenance}}});
  return out;
}

ShadowRep minkowski_subspace(const ShadowRep& shadow, const std::vector<RVector>& basis) {
  const std::size_t n = shadow.ambient;
  for (const auto& b : basis) require_dims(b.size(), n, "minkowski_subspace: basis vector");
  const std::vector<std::size_t> map = identity_map(shadow.nvars(), n);
  const std::size_t s0 = n + shadow.nvars();
  ShadowRep out;
  out.ambient = n;
  out.lifted = shadow.nvars() + basis.size();
  for (const auto& p : shadow.pencils) out.pencils.push_back(remap(p, map));
  for (const auto& e : shadow.equalities) out.equalities.push_back(remap(e, map));
  for (std::size_t i = 0; i < n; ++i) {
    LinearEquality e{{{i, 1}, {map[i], -1}}, 0};
    for (std::size_t k = 0; k < basis.size(); ++k)
      if (basis[k][i] != 0) e.coeffs.emplace_back(s0 + k, -basis[k][i]);
    out.equalities.push_back(std::move(e));
  }
  json b = json::array();
  for (const auto& v : basis) b.push_back(point_json(v));
  out.provenance = json::array({{{"stage", "minkowski_subspace"}, {"basis", b}, {"parts", shadow.provenance}}});
  return out;
}

ShadowRep fix_coordinate(const ShadowRep& shadow, std::size_t index, const Rational& value) {
  const std::size_t n = shadow.ambient;
  if (index >= n) throw DimensionError("fix_coordinate: index out of range");
  std::vector<std::size_t> map = identity_map(shadow.nvars(), 0);
  for (std::size_t i = index + 1; i < n; ++i) map[i] = i - 1;
  map[index] = n - 1;
  ShadowRep out;
  out.ambient = n - 1;
  out.lifted = shadow.lifted + 1;
  for (const auto& p : shadow.pencils) out.pencils.push_back(remap(p, map));
  for (const auto& e : shadow.equalities) out.equalities.push_back(remap(e, map));
  out.equalities.push_back({{{n - 1, 1}}, value});
  out.provenance = json::array({{{"stage", "fix_coordinate"},
                                 {"index", index},
                                 {"value", to_string(value)},
                                 {"parts", shadow.provenance}}});
  return out;
}

const char* to_string(ShadowVerdict v) {
  switch (v) {
    case ShadowVerdict::member: return "member";
    case ShadowVerdict::non_member: return "non-member";
    case ShadowVerdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

PreparedShadow::PreparedShadow(const ShadowRep& shadow) : ambient_(shadow.ambient) {
  shadow.validate();
  const std::size_t nv = shadow.nvars();
  problem_.nvars = nv;
  auto dense = [](const RMatrix& m) {
    Eigen::MatrixXd d(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j).get_d();
    return d;
  };
  for (const auto& p : shadow.pencils) {
    AffineBlock b{p.size, dense(p.f0), {}};
    for (const auto& [v, m] : p.terms) b.terms.emplace_back(v, dense(m));
    problem_.blocks.push_back(std::move(b));
  }
  if (!shadow.equalities.empty()) {
    const auto rows = static_cast<Eigen::Index>(shadow.equalities.size());
    problem_.eq_matrix = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(nv));
    problem_.eq_rhs = Eigen::VectorXd::Zero(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const auto& e = shadow.equalities[static_cast<std::size_t>(r)];
      for (const auto& [v, c] : e.coeffs) problem_.eq_matrix(r, static_cast<Eigen::Index>(v)) += c.get_d();
      problem_.eq_rhs(r) = e.rhs.get_d();
    }
  }
}

MembershipResult PreparedShadow::membership(std::span<const double> x, double tol, const SDPOptions& opts) const {
  require_dims(x.size(), ambient_, "shadow_membership: point");
  std::vector<std::pair<std::size_t, double>> fixed;
  for (std::size_t i = 0; i < x.size(); ++i) fixed.emplace_back(i, x[i]);
  const SlackResult s = feasibility_slack(problem_, fixed, 1.0, opts);
  MembershipResult r;
  r.slack = s.t;
  r.status = s.solution.status;
  r.iterations = s.solution.iterations;
  r.diagnostics = s.solution.diagnostics;
  if (s.solution.status == SDPStatus::infeasible) {
    // only the equalities can make the slack problem infeasible
    r.verdict = ShadowVerdict::non_member;
    r.slack = std::numeric_limits<double>::infinity();
    return r;
  }
  // Whatever stopped the solver, its primal point bounds the optimal slack
  // from above; membership is read off that point directly.
  const double certified = primal_slack(s.y);
  if (s.solution.status != SDPStatus::optimal) r.slack = certified;
  if (certified <= tol) {
    r.verdict = ShadowVerdict::member;
  } else if (s.solution.status == SDPStatus::optimal && s.t >= 10 * tol) {
    r.verdict = ShadowVerdict::non_member;
  } else if (s.solution.dual_infeasibility <= 1e-7 && s.solution.dual_objective >= 10 * tol) {
    // a stalled solve still carries a near-feasible dual bound
    r.verdict = ShadowVerdict::non_member;
  } else {
    r.verdict = ShadowVerdict::inconclusive;
  }
  return r;
}

double PreparedShadow::primal_slack(const Eigen::VectorXd& y) const {
  const double inf = std::numeric_limits<double>::infinity();
  if (y.size() != static_cast<Eigen::Index>(problem_.nvars) || !y.allFinite()) return inf;
  if (problem_.eq_matrix.rows() > 0 &&
      (problem_.eq_matrix * y - problem_.eq_rhs).norm() > 1e-9 * (1 + problem_.eq_rhs.norm()))
    return inf;
  double t = -inf;
  for (const auto& b : problem_.blocks) t = std::max(t, -eigen_sym(b.evaluate(y)).values(0));
  return t;
}

MembershipResult shadow_membership(const ShadowRep& shadow, std::span<const double> x, double tol) {
  return PreparedShadow(shadow).membership(x, tol);
}

namespace {

struct SliceMap {
  std::size_t eliminated = 0;
  RVector c;
  Rational level;
  std::vector<RVector> complement;  // pointed coordinates -> original, empty when L = 0

  std::vector<double> to_cone(std::span<const double> y) const {
    std::vector<double> w;
    double rest = level.get_d();
    for (std::size_t i = 0, k = 0; i < c.size(); ++i) {
      if (i == eliminated) {
        w.push_back(0);
        continue;
      }
      w.push_back(y[k]);
      rest -= c[i].get_d() * y[k++];
    }
    w[eliminated] = rest / c[eliminated].get_d();
    if (complement.empty()) return w;
    std::vector<double> x(complement.front().size(), 0.0);
    for (std::size_t k = 0; k < complement.size(); ++k)
      for (std::size_t i = 0; i < x.size(); ++i) x[i] += w[k] * complement[k][i].get_d();
    return x;
  }
};

// Rewrites slice-coordinate witness points into cone coordinates.
json lift_witness(const json& w, const SliceMap& m) {
  json out = w;
  if (!w.contains("points")) return out;
  json cone = json::array();
  for (const auto& p : w["points"]) {
    std::vector<double> y;
    if (p["point"].is_string()) {
      for (const auto& r : parse_point(p["point"].get<std::string>())) y.push_back(r.get_d());
    } else {
      y = p["point"].get<std::vector<double>>();
    }
    cone.push_back({{"point", m.to_cone(y)}, {"multiplicity", p["multiplicity"]}});
  }
  out["cone_points"] = cone;
  return out;
}

}  // namespace

ConeShadow build_cone_shadow(const HyperbolicInstance& inst, const ConeShadowOptions& opts) {
  json report = {{"schema", 1}, {"seed", opts.seed}};
  const std::size_t n = inst.dim();

  const SampledReport hyp = is_hyperbolic_sampled(inst, opts.hyperbolicity_samples, opts.seed);
  report["hyperbolicity"] = {{"samples", hyp.samples}, {"failures", hyp.failures.size()}};
  if (!hyp.passed())
    throw HypothesisViolation("hyperbolicity", "restriction along a sampled line is not real-rooted",
                              {{"direction", point_json(hyp.failures.front())}});

  const ConeBoundarySample bs = cone_boundary_sample(inst, opts.boundary_samples, opts.seed);
  int max_mult = 0;
  json bad = json::array();
  for (const auto& p : bs.points) {
    max_mult = std::max(max_mult, p.multiplicity);
    if (p.multiplicity > 1) bad.push_back({{"point", point_json(p.point)}, {"multiplicity", p.multiplicity}});
  }
  report["cone_boundary"] = {{"samples", bs.points.size()}, {"max_multiplicity", max_mult}};
  if (!bad.empty())
    throw HypothesisViolation("smoothness", "sampled boundary points of multiplicity > 1 (no simple zero at t = 0)",
                              {{"points", bad}});

  const LinealityResult lin = lineality_space(inst, 64, opts.seed);
  json lb = json::array();
  for (const auto& v : lin.basis) lb.push_back(point_json(v));
  report["lineality"] = {{"dimension", lin.basis.size()}, {"basis", lb}};
  if (lin.complement.empty()) throw DomainError("build_cone_shadow: the cone is a linear subspace");
  const HyperbolicInstance work = lin.basis.empty() ? inst : pointed_part(inst, lin);
  const std::size_t m = work.dim();

  ShadowRep cone;
  if (m == 1) {
    // a single ray through e
    const Rational s = work.e()[0] > 0 ? 1 : -1;
    RMatrix one(1, 1);
    one(0, 0) = s;
    cone.ambient = 1;
    cone.pencils.push_back(LMIPencil{1, zeros(1), {{0, one}}});
    cone.provenance = json::array({{{"stage", "ray"}}});
    report["slice"] = nullptr;
  } else {
    CompactifyingFunctional cf;
    try {
      cf = compactifying_functional(work, opts.seed);
    } catch (const DomainError& err) {
      throw HypothesisViolation("pointedness", err.what(), {{"lineality_dimension", lin.basis.size()}});
    }
    report["compactifying"] = {{"c", point_json(cf.c)},          {"level", to_string(cf.level)},
                               {"delta", cf.delta},              {"candidate", cf.candidate},
                               {"eliminated", cf.eliminated},    {"probes", cf.probes}};
    SliceMap sm{cf.eliminated, cf.c, cf.level, lin.basis.empty() ? std::vector<RVector>{} : lin.complement};

    const Polynomial slice = restrict_hyperplane(work.h(), cf.c, cf.level, cf.eliminated);
    RVector e_slice;
    for (std::size_t i = 0; i < m; ++i)
      if (i != cf.eliminated) e_slice.push_back(work.e()[i]);
    const RZInstance rz(slice, e_slice);
    report["slice"] = {{"polynomial", format(slice, default_var_names(m - 1))}, {"e", point_json(e_slice)}};

    CoverOptions co;
    co.seed = opts.seed;
    co.patch.seed = opts.seed;
    co.directions = opts.directions ? opts.directions : (m - 1 == 2 ? 24 : 48);
    BoundaryCover cover;
    try {
      cover = boundary_cover(rz, co);
    } catch (const HypothesisViolation& v) {
      throw HypothesisViolation(v.stage(), v.what(), lift_witness(v.witness(), sm));
    }
    json patches = json::array();
    for (const auto& p : cover.patches)
      patches.push_back({{"center", point_json(p.center)},
                         {"exact", p.exact_center},
                         {"radius", to_string(p.radius)},
                         {"active", p.active},
                         {"halvings", p.halvings},
                         {"qc_checks", p.qc_checks},
                         {"local_checks", p.local_checks}});
    report["cover"] = {{"directions", co.directions},
                       {"patches", patches},
                       {"verified", cover.verified},
                       {"verification_points", cover.verification_points}};
    if (!cover.verified) {
      json gaps = json::array();
      for (const auto& u : cover.uncovered) gaps.push_back({{"point", u}, {"multiplicity", 1}});
      throw HypothesisViolation("coverage", "boundary points outside every patch ball",
                                lift_witness({{"points", gaps}}, sm));
    }

    const int k0 = std::max(opts.order > 0 ? opts.order : (slice.degree() + 1) / 2, 1);
    std::vector<ShadowRep> parts;
    std::map<int, int> orders;
    std::size_t inexact = 0, probes = 0;
    double radius = cover.max_boundary_norm;
    std::uint64_t patch_index = 0;
    for (const auto& p : cover.patches) {
      const std::vector<Polynomial> cons = p.constraints(rz);
      const std::vector<double> center = to_doubles(p.center);
      const double r = p.radius.get_d();
      radius = std::max(radius, std::sqrt(std::inner_product(center.begin(), center.end(), center.begin(), 0.0)) + r);
      // outward points spread over the ball, at least 1/4 radius out and
      // within ~70 degrees of the outward normal of the first active factor
      std::vector<double> g = cons.front().gradient(center);
      const double gn = std::sqrt(std::inner_product(g.begin(), g.end(), g.begin(), 0.0));
      std::vector<std::vector<double>> outside;
      const std::uint64_t pseed = mix_seed(opts.seed ^ 0x7072, patch_index++);
      for (std::uint64_t s = 0; gn > 0 && outside.size() < opts.exactness_probes && s < 16 * opts.exactness_probes;
           ++s) {
        std::vector<double> u = gaussian_direction(center.size(), pseed, 2 * s);
        double along = 0;
        for (std::size_t i = 0; i < u.size(); ++i) along -= u[i] * g[i] / gn;
        if (along < 0) {
          for (auto& x : u) x = -x;
          along = -along;
        }
        if (along < 0.35) continue;
        const double rho = r * (0.25 + 0.75 * uniform01(pseed, 2 * s + 1));
        std::vector<double> q(center);
        for (std::size_t i = 0; i < q.size(); ++i) q[i] += rho * u[i];
        if (rz_membership(rz, round_dyadic(q, 40)).status == MembershipStatus::outside) outside.push_back(q);
      }
      int k = k0;
      for (;; ++k) {
        ShadowRep rel = patch_relaxation(rz, p, k);
        bool exact = true;
        const PreparedShadow prep(rel);
        for (const auto& q : outside) {
          ++probes;
          if (prep.membership(q).verdict != ShadowVerdict::non_member) {
            exact = false;
            break;
          }
        }
        if (exact || k >= opts.max_order) {
          if (!exact) ++inexact;
          ++orders[k];
          parts.push_back(std::move(rel));
          break;
        }
      }
    }
    json ord = json::object();
    for (const auto& [k, c] : orders) ord[std::to_string(k)] = c;
    report["relaxation"] = {{"orders", ord}, {"exactness_probes", probes}, {"inexact_patches", inexact}};

    const Rational hull_radius = dyadic_ceil(std::max(2 * cover.max_boundary_norm, radius), 6);
    report["hull"] = {{"radius", to_string(hull_radius)}, {"count", parts.size()}};
    ShadowRep hull = convex_hull_shadows(parts, hull_radius);

    // slice coordinates -> the hyperplane <c, w> = level
    RMatrix embed(m, m - 1);
    RVector offset(m);
    for (std::size_t i = 0, k = 0; i < m; ++i) {
      if (i == cf.eliminated) continue;
      embed(i, k) = 1;
      embed(cf.eliminated, k) = -cf.c[i] / cf.c[cf.eliminated];
      ++k;
    }
    offset[cf.eliminated] = cf.level / cf.c[cf.eliminated];
    cone = conical_hull(affine_image(hull, embed, offset), cf.c, cf.level);
  }

  if (!lin.basis.empty()) {
    RMatrix bt(n, m);
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t i = 0; i < n; ++i) bt(i, k) = lin.complement[k][i];
    cone = minkowski_subspace(affine_image(cone, bt, RVector(n)), lin.basis);
  }
  report["shadow"] = {{"ambient", cone.ambient},
                      {"lifted", cone.lifted},
                      {"pencils", cone.pencils.size()},
                      {"equalities", cone.equalities.size()}};
  return {std::move(cone), std::move(report)};
}

json to_json(const ShadowRep& shadow) {
  auto matrix = [](const RMatrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
      json r = json::array();
      for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(to_string(m(i, j)));
      rows.push_back(std::move(r));
    }
    return rows;
  };
  json blocks = json::array();
  for (const auto& p : shadow.pencils) {
    json terms = json::array();
    for (const auto& [v, m] : p.terms) terms.push_back({{"var", v}, {"matrix", matrix(m)}});
    blocks.push_back({{"size", p.size}, {"exact", true}, {"constant", matrix(p.f0)}, {"terms", terms}});
  }
  json eqs = json::array();
  for (const auto& e : shadow.equalities) {
    json coeffs = json::array();
    for (const auto& [v, c] : e.coeffs) coeffs.push_back({v, to_string(c)});
    eqs.push_back({{"coeffs", coeffs}, {"rhs", to_string(e.rhs)}});
  }
  json projection = json::array();
  for (std::size_t i = 0; i < shadow.ambient; ++i) projection.push_back(i);
  return {{"schema", 1},         {"ambient", shadow.ambient}, {"lifted", shadow.lifted},
          {"blocks", blocks},    {"equalities", eqs},         {"projection", projection},
          {"provenance", shadow.provenance}};
}

ShadowRep shadow_from_json(const json& j) {
  try {
    ShadowRep s;
    s.ambient = j.at("ambient").get<std::size_t>();
    s.lifted = j.at("lifted").get<std::size_t>();
    const auto& proj = j.at("projection");
    if (proj.size() != s.ambient) throw DomainError("shadow JSON: projection must select the ambient variables");
    for (std::size_t i = 0; i < proj.size(); ++i)
      if (proj[i].get<std::size_t>() != i) throw DomainError("shadow JSON: projection must select the ambient variables");
    auto matrix = [](const json& rows, std::size_t k) {
      RMatrix m(k, k);
      if (rows.size() != k) throw DimensionError("shadow JSON: matrix row count");
      for (std::size_t i = 0; i < k; ++i) {
        if (rows[i].size() != k) throw DimensionError("shadow JSON: matrix column count");
        for (std::size_t c = 0; c < k; ++c)
          m(i, c) = rows[i][c].is_string() ? parse_rational(rows[i][c].get<std::string>()) : from_double(rows[i][c].get<double>());
      }
      return m;
    };
    for (const auto& b : j.at("blocks")) {
      LMIPencil p;
      p.size = b.at("size").get<std::size_t>();
      p.f0 = matrix(b.at("constant"), p.size);
      for (const auto& t : b.at("terms")) p.terms.emplace_back(t.at("var").get<std::size_t>(), matrix(t.at("matrix"), p.size));
      s.pencils.push_back(std::move(p));
    }
    for (const auto& e : j.at("equalities")) {
      LinearEquality q;
      for (const auto& c : e.at("coeffs")) q.coeffs.emplace_back(c.at(0).get<std::size_t>(), parse_rational(c.at(1).get<std::string>()));
      q.rhs = parse_rational(e.at("rhs").get<std::string>());
      s.equalities.push_back(std::move(q));
    }
    s.provenance = j.value("provenance", json::array());
    s.validate();
    return s;
  } catch (const json::exception& err) {
    throw DomainError(std::string("shadow JSON: ") + err.what());
  }
}

}  // namespace hypshadow
