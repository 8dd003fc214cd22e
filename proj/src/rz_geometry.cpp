#include "hypshadow/rz_geometry.hpp"

#include "hypshadow/error.hpp"
#include "hypshadow/sampling.hpp"
#include "hypshadow/sdp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>

namespace hypshadow {

namespace {

Rational pow2_inv(unsigned k) { return Rational(mpz_class(1), mpz_class(1) << k); }

// Best rational approximation with denominator <= max_den (continued fractions).
Rational snap(double x, long max_den) {
  const double sign = x < 0 ? -1 : 1;
  double r = std::abs(x);
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(r);
    if (a > 1e12) break;
    const long ai = static_cast<long>(a);
    const long p2 = ai * p1 + p0, q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const double frac = r - a;
    if (frac < 1e-12) break;
    r = 1 / frac;
  }
  if (q1 == 0) return 0;
  return Rational(static_cast<long>(sign) * p1, q1);
}

std::vector<Polynomial> gradient_polys(const Polynomial& p) {
  std::vector<Polynomial> g;
  for (std::size_t i = 0; i < p.nvars(); ++i) g.push_back(p.partial(i));
  return g;
}

}  // namespace

RZInstance::RZInstance(Polynomial p, RVector e, std::vector<Polynomial> factors)
    : p_(std::move(p)), e_(std::move(e)), factors_(std::move(factors)) {
  require_dims(e_.size(), p_.nvars(), "RZInstance: base point");
  if (p_.is_zero()) throw DomainError("RZInstance: zero polynomial");
  if (p_.evaluate(e_) == 0) throw DomainError("RZInstance: p(e) = 0");
  if (factors_.empty()) {
    factors_.push_back(p_);
    return;
  }
  Polynomial prod = Polynomial::constant(p_.nvars(), 1);
  for (const auto& f : factors_) {
    require_dims(f.nvars(), p_.nvars(), "RZInstance: factor");
    prod = prod * f;
  }
  const auto& [exp, coeff] = *p_.terms().begin();
  const Rational pc = prod.coeff(exp);
  if (pc == 0 || !(prod == p_ * (pc / coeff)))
    throw DomainError("RZInstance: product of factors differs from p by more than a constant");
}

SampledReport is_real_zero_sampled(const RZInstance& inst, std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw DomainError("is_real_zero_sampled: need at least one sample");
  SampledReport r{samples, seed, {}};
  for (std::size_t i = 0; i < samples; ++i) {
    const RVector a = rational_direction(gaussian_direction(inst.dim(), seed, i));
    const UniPoly q = line_restriction(inst.p(), inst.e(), a);
    if (!is_real_rooted(q)) r.failures.push_back(a);
  }
  return r;
}

MembershipVerdict rz_membership(const Polynomial& p, std::span<const Rational> e, std::span<const Rational> a) {
  require_dims(a.size(), p.nvars(), "rz_membership: point");
  MembershipVerdict v;
  v.restricted = line_restriction(p, e, sub(a, e));
  v.roots = certify_roots(v.restricted);
  if (!is_real_rooted(v.restricted)) {
    v.status = MembershipStatus::not_real_rooted;
    return v;
  }
  if (v.restricted.degree() > 0 && count_roots_in(v.restricted, Rational(0), Rational(1)) > 0) {
    v.status = MembershipStatus::outside;
    return v;
  }
  const int m = v.restricted.degree() > 0 ? vanishing_order(v.restricted, 1) : 0;
  v.status = m > 0 ? MembershipStatus::boundary : MembershipStatus::interior;
  v.multiplicity = m;
  return v;
}

MembershipVerdict rz_membership(const RZInstance& inst, std::span<const Rational> a) {
  return rz_membership(inst.p(), inst.e(), a);
}

const char* to_string(QCStatus s) {
  switch (s) {
    case QCStatus::strict: return "strict";
    case QCStatus::degenerate: return "degenerate";
    case QCStatus::indefinite: return "indefinite";
  }
  return "unknown";
}

QCVerdict strict_quasiconcavity(const Polynomial& g, std::span<const Rational> a, double tol) {
  require_dims(a.size(), g.nvars(), "strict_quasiconcavity: point");
  const std::size_t n = g.nvars();
  QCVerdict v;
  Derivatives d = derivatives(g, a);
  v.gradient = std::move(d.gradient);
  v.hessian = std::move(d.hessian);
  if (is_zero(v.gradient)) {
    for (std::size_t i = 0; i < n; ++i) v.complement.push_back(RMatrix::identity(n).row(i));
  } else {
    v.complement = kernel(RMatrix::from_rows({v.gradient}));
  }
  const std::size_t m = v.complement.size();
  if (m == 0) return v;
  const RMatrix b = RMatrix::from_rows(v.complement).transpose();  // n x m
  v.restricted = b.transpose() * v.hessian * b;

  // float screen on an orthonormal basis of the same subspace
  Eigen::MatrixXd bd(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < m; ++k) bd(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = b(i, k).get_d();
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(bd).householderQ() *
                            Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  const SymMatrix h = SymMatrix::from_rational(v.hessian);
  const EigenDecomposition ed = eigen_sym(Eigen::MatrixXd(q.transpose() * h.matrix() * q));
  v.projected_spectrum.assign(ed.values.data(), ed.values.data() + ed.values.size());
  const double threshold = -tol * (1 + h.inf_norm());
  v.float_strict = std::all_of(v.projected_spectrum.begin(), v.projected_spectrum.end(),
                               [&](double x) { return x < threshold; });

  // exact certificate on -Q
  const DefinitenessCertificate cert = classify_semidefinite(v.restricted * Rational(-1));
  if (cert.status == Definiteness::positive_definite) return v;
  v.status = cert.status == Definiteness::indefinite ? QCStatus::indefinite : QCStatus::degenerate;
  v.witness = b * std::span<const Rational>(cert.witness);
  v.witness_value = quadratic_form(v.hessian, v.witness);
  if (dot(v.witness, v.gradient) != 0 || v.witness_value < 0 ||
      (v.status == QCStatus::degenerate) != (v.witness_value == 0))
    throw NumericError("strict_quasiconcavity: witness failed the exact recheck");
  return v;
}

bool line_vanishing_check(const Polynomial& p, std::span<const Rational> a, std::span<const Rational> v) {
  require_dims(a.size(), p.nvars(), "line_vanishing_check: point");
  require_dims(v.size(), p.nvars(), "line_vanishing_check: direction");
  if (is_zero(v)) throw DomainError("line_vanishing_check: zero direction");
  return line_restriction(p, a, v).is_zero();
}

BoundaryPoint boundary_point(const RZInstance& inst, std::span<const Rational> direction) {
  require_dims(direction.size(), inst.dim(), "boundary_point: direction");
  const UniPoly q = line_restriction(inst.p(), inst.e(), direction);
  auto root = q.degree() > 0 ? smallest_root_above(q, 0) : std::nullopt;
  if (!root) {
    nlohmann::json w = {{"direction", format_point(direction)}, {"restriction", q.to_string("t")}};
    throw HypothesisViolation("compactness", "ray from e has no boundary point (set is unbounded)", w);
  }
  BoundaryPoint bp;
  bp.direction.assign(direction.begin(), direction.end());
  bp.multiplicity = root->multiplicity;
  if (root->snap_rational()) {
    bp.exact = axpy(root->lo, direction, inst.e());
  } else {
    root->refine(pow2_inv(52));
  }
  bp.root = *root;
  const double s = root->approx();
  bp.point.resize(inst.dim());
  for (std::size_t i = 0; i < inst.dim(); ++i) bp.point[i] = inst.e()[i].get_d() + s * direction[i].get_d();
  return bp;
}

std::vector<BoundaryPoint> boundary_sample(const RZInstance& inst, std::size_t directions, std::uint64_t seed) {
  std::vector<BoundaryPoint> out;
  out.reserve(directions);
  for (const auto& d : sample_directions(inst.dim(), directions, seed))
    out.push_back(boundary_point(inst, rational_direction(d)));
  return out;
}

PointednessReport pointedness_check(const RZInstance& inst, std::size_t probes, std::uint64_t seed) {
  PointednessReport r;
  r.probes = probes;
  const std::size_t n = inst.dim();
  // directions along which p is translation invariant
  std::set<Exponent, GradedLess> monomials;
  const std::vector<Polynomial> grad = gradient_polys(inst.p());
  for (const auto& g : grad)
    for (const auto& [e, c] : g.terms()) monomials.insert(e);
  RMatrix system(std::max<std::size_t>(monomials.size(), 1), n);
  std::size_t row = 0;
  for (const auto& m : monomials) {
    for (std::size_t i = 0; i < n; ++i) system(row, i) = grad[i].coeff(m);
    ++row;
  }
  r.invariant_directions = kernel(system);

  for (std::size_t i = 0; i < probes; ++i) {
    const RVector u = rational_direction(gaussian_direction(n, seed, i));
    RVector minus = u;
    for (auto& x : minus) x = -x;
    const UniPoly qp = line_restriction(inst.p(), inst.e(), u);
    const UniPoly qm = line_restriction(inst.p(), inst.e(), minus);
    const bool up = qp.degree() <= 0 || !smallest_root_above(qp, 0);
    const bool um = qm.degree() <= 0 || !smallest_root_above(qm, 0);
    if (up && um) r.unbounded_lines.push_back(u);
  }
  r.pointed = r.invariant_directions.empty() && r.unbounded_lines.empty();
  return r;
}

std::vector<SingularPoint> singular_boundary_scan(const RZInstance& inst, std::size_t directions, std::uint64_t seed) {
  const Polynomial& p = inst.p();
  const std::size_t n = inst.dim();
  const std::vector<Polynomial> grad = gradient_polys(p);
  std::vector<std::vector<Polynomial>> hess(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) hess[i].push_back(grad[i].partial(j));

  const auto ni = static_cast<Eigen::Index>(n);
  auto residual = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd& jac) {
    const std::vector<double> xs(x.data(), x.data() + n);
    r.resize(ni + 1);
    jac.resize(ni + 1, ni);
    r(0) = p.evaluate(std::span<const double>(xs));
    for (std::size_t i = 0; i < n; ++i) {
      const double gi = grad[i].evaluate(std::span<const double>(xs));
      r(static_cast<Eigen::Index>(i) + 1) = gi;
      jac(0, static_cast<Eigen::Index>(i)) = gi;
      for (std::size_t j = 0; j < n; ++j)
        jac(static_cast<Eigen::Index>(i) + 1, static_cast<Eigen::Index>(j)) = hess[i][j].evaluate(std::span<const double>(xs));
    }
  };

  std::vector<SingularPoint> found;
  auto record = [&](SingularPoint sp) {
    for (const auto& f : found) {
      double d = 0;
      for (std::size_t i = 0; i < n; ++i) d = std::max(d, std::abs(f.point[i] - sp.point[i]));
      if (d < 1e-6) return;
    }
    found.push_back(std::move(sp));
  };

  const std::vector<BoundaryPoint> samples = boundary_sample(inst, directions, seed);
  double scale = 1;
  for (const auto& s : samples)
    for (double x : s.point) scale = std::max(scale, std::abs(x));

  for (const auto& s : samples) {
    if (s.multiplicity >= 2 && s.exact) {
      record({s.point, s.exact, s.multiplicity});
      continue;
    }
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(s.point.data(), ni);
    Eigen::VectorXd r;
    Eigen::MatrixXd jac;
    residual(x, r, jac);
    double lambda = 1e-6;
    for (int it = 0; it < 60 && r.norm() > 1e-14; ++it) {
      const Eigen::MatrixXd jtj = jac.transpose() * jac;
      const Eigen::VectorXd step = (jtj + lambda * (1 + jtj.diagonal().maxCoeff()) * Eigen::MatrixXd::Identity(ni, ni))
                                       .ldlt()
                                       .solve(-jac.transpose() * r);
      Eigen::VectorXd r2;
      Eigen::MatrixXd j2;
      residual(x + step, r2, j2);
      if (r2.norm() < r.norm()) {
        x += step;
        r = r2;
        jac = j2;
        lambda = std::max(lambda / 10, 1e-15);
        if (step.norm() < 1e-15 * (1 + x.norm())) break;
      } else {
        lambda *= 10;
        if (lambda > 1e8) break;
      }
    }
    if (!(r.norm() < 1e-9) || x.norm() > 10 * scale) continue;

    std::vector<double> xd(x.data(), x.data() + n);
    RVector snapped(n);
    for (std::size_t i = 0; i < n; ++i) snapped[i] = snap(xd[i], 64);
    bool exact = p.evaluate(snapped) == 0;
    for (std::size_t i = 0; exact && i < n; ++i) exact = grad[i].evaluate(snapped) == 0;
    if (exact) {
      const MembershipVerdict v = rz_membership(inst, snapped);
      if (v.status != MembershipStatus::boundary) continue;
      record({to_doubles(snapped), snapped, v.multiplicity});
      continue;
    }
    // irrational singular point: accept when the ray from e first leaves S there
    const RVector xr = round_dyadic(xd, 40);
    const UniPoly q = line_restriction(p, inst.e(), sub(xr, inst.e()));
    if (q.degree() <= 0) continue;
    auto root = smallest_root_above(q, 0);
    if (!root) continue;
    root->refine(pow2_inv(40));
    if (std::abs(root->approx() - 1) < 1e-6) record({xd, std::nullopt, 2});
  }
  std::sort(found.begin(), found.end(), [](const SingularPoint& a, const SingularPoint& b) { return a.point < b.point; });
  return found;
}

}  // namespace hypshadow
