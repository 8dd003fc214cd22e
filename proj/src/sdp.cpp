#include "hypshadow/sdp.hpp"

#include "hypshadow/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace hypshadow {

using Eigen::MatrixXd;
using Eigen::VectorXd;

SymMatrix::SymMatrix(MatrixXd m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw DimensionError("SymMatrix: matrix is not square");
  const double scale = 1 + (m_.size() ? m_.cwiseAbs().maxCoeff() : 0.0);
  if (m_.size() && (m_ - m_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw DomainError("SymMatrix: asymmetry above 1e-12");
  m_ = (m_ + m_.transpose()) / 2;
}

SymMatrix SymMatrix::from_rational(const RMatrix& r) {
  MatrixXd m(r.rows(), r.cols());
  for (std::size_t i = 0; i < r.rows(); ++i)
    for (std::size_t j = 0; j < r.cols(); ++j) m(i, j) = r(i, j).get_d();
  return SymMatrix(std::move(m));
}

double SymMatrix::inf_norm() const { return m_.size() ? m_.cwiseAbs().rowwise().sum().maxCoeff() : 0.0; }

EigenDecomposition eigen_sym(const SymMatrix& s) { return eigen_sym(s.matrix()); }

EigenDecomposition eigen_sym(const MatrixXd& s) {
  if (s.rows() != s.cols()) throw DimensionError("eigen_sym: matrix is not square");
  if (!s.allFinite()) throw DomainError("eigen_sym: non-finite entry");
  const Eigen::Index n = s.rows();
  MatrixXd a = (s + s.transpose()) / 2;
  MatrixXd v = MatrixXd::Identity(n, n);
  const double total = a.squaredNorm();

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off <= 1e-32 * total || off == 0) break;

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 1 / (2 * theta);
        } else {
          t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        }
        const double c = 1 / std::sqrt(t * t + 1);
        const double sn = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });
  EigenDecomposition out{VectorXd(n), MatrixXd(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

PsdCheck psd_check(const SymMatrix& s, double tol) {
  PsdCheck r;
  if (s.size() == 0) {
    r.psd = true;
    return r;
  }
  const EigenDecomposition ed = eigen_sym(s);
  r.min_eigenvalue = ed.values(0);
  r.psd = r.min_eigenvalue >= -tol * (1 + s.inf_norm());
  if (!r.psd) r.witness = ed.vectors.col(0);
  return r;
}

PsdCheck psd_check(const RMatrix& s, double tol) {
  PsdCheck r = psd_check(SymMatrix::from_rational(s), tol);
  if (!r.psd) {
    std::vector<double> w(r.witness.data(), r.witness.data() + r.witness.size());
    RVector v = round_dyadic(w, 30);
    if (quadratic_form(s, v) < 0) r.exact_witness = std::move(v);
  }
  const DefinitenessCertificate cert = classify_semidefinite(s);
  r.exact = true;
  r.psd = cert.status != Definiteness::indefinite;
  if (r.psd) {
    r.exact_witness.reset();
  } else if (!r.exact_witness) {
    r.exact_witness = cert.witness;
  }
  return r;
}

MatrixXd AffineBlock::evaluate(const VectorXd& y) const {
  MatrixXd m = constant;
  for (const auto& [i, f] : terms) m += y(static_cast<Eigen::Index>(i)) * f;
  return m;
}

void SDPProblem::validate() const {
  if (objective.size() != 0 && static_cast<std::size_t>(objective.size()) != nvars)
    throw DimensionError("SDPProblem: objective length differs from variable count");
  for (const auto& b : blocks) {
    if (static_cast<std::size_t>(b.constant.rows()) != b.size || static_cast<std::size_t>(b.constant.cols()) != b.size)
      throw DimensionError("SDPProblem: block constant has wrong size");
    for (const auto& [i, f] : b.terms) {
      if (i >= nvars) throw DimensionError("SDPProblem: block references unknown variable");
      if (static_cast<std::size_t>(f.rows()) != b.size || static_cast<std::size_t>(f.cols()) != b.size)
        throw DimensionError("SDPProblem: block coefficient has wrong size");
    }
  }
  if (eq_matrix.size() != 0) {
    if (static_cast<std::size_t>(eq_matrix.cols()) != nvars || eq_matrix.rows() != eq_rhs.size())
      throw DimensionError("SDPProblem: equality system has wrong shape");
  }
}

const char* to_string(SDPStatus s) {
  switch (s) {
    case SDPStatus::optimal: return "optimal";
    case SDPStatus::infeasible: return "infeasible";
    case SDPStatus::unbounded: return "unbounded";
    case SDPStatus::stalled: return "stalled";
    case SDPStatus::max_iterations: return "max_iterations";
    case SDPStatus::numerical_error: return "numerical_error";
  }
  return "unknown";
}

namespace {

// Largest alpha with M + alpha dM PSD (M positive definite), capped at 1e30.
double max_step(const MatrixXd& m, const MatrixXd& dm) {
  if (m.rows() == 1) {
    if (dm(0, 0) >= 0) return 1e30;
    return -m(0, 0) / dm(0, 0);
  }
  Eigen::LLT<MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) return 0;
  const MatrixXd li_dm = llt.matrixL().solve(dm);
  const MatrixXd t = llt.matrixL().solve(li_dm.transpose());
  const double lmin = eigen_sym(MatrixXd((t + t.transpose()) / 2)).values(0);
  if (lmin >= 0) return 1e30;
  return -1 / lmin;
}

struct Block {
  std::size_t size;
  MatrixXd f0;
  std::vector<std::pair<Eigen::Index, MatrixXd>> terms;
};

double inner(const MatrixXd& a, const MatrixXd& b) { return a.cwiseProduct(b).sum(); }

MatrixXd sym(const MatrixXd& m) { return (m + m.transpose()) / 2; }

// Core solver without equalities: min c^T y s.t. F0_b + sum y_i F_bi >= 0.
SDPSolution interior_point(const std::vector<Block>& blocks, const VectorXd& c, const SDPOptions& opts) {
  const Eigen::Index m = c.size();
  const std::size_t nb = blocks.size();
  double ntotal = 0;
  double norm_f0 = 0, norm_f = 0;
  std::vector<double> var_norm(static_cast<std::size_t>(m), 0.0);
  for (const auto& b : blocks) {
    ntotal += static_cast<double>(b.size);
    norm_f0 += b.f0.squaredNorm();
    for (const auto& [i, f] : b.terms) var_norm[static_cast<std::size_t>(i)] += f.squaredNorm();
  }
  norm_f0 = std::sqrt(norm_f0);
  for (auto& v : var_norm) {
    v = std::sqrt(v);
    norm_f = std::max(norm_f, v);
  }
  double xi = std::max(10.0, std::sqrt(ntotal));
  for (Eigen::Index i = 0; i < m; ++i)
    xi = std::max(xi, ntotal * (1 + std::abs(c(i))) / (1 + var_norm[static_cast<std::size_t>(i)]));
  const double eta = std::max({10.0, std::sqrt(ntotal), norm_f0, norm_f});

  std::vector<MatrixXd> x(nb), z(nb), zinv(nb), rd(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    const auto k = static_cast<Eigen::Index>(blocks[b].size);
    x[b] = xi * MatrixXd::Identity(k, k);
    z[b] = eta * MatrixXd::Identity(k, k);
  }
  VectorXd y = VectorXd::Zero(m);
  const double cnorm = c.norm();

  SDPSolution sol;
  sol.status = SDPStatus::max_iterations;
  auto finish = [&](SDPStatus status, int it) {
    sol.status = status;
    sol.iterations = it;
    sol.y = y;
    sol.dual = x;
    return sol;
  };

  std::vector<std::pair<double, double>> history;  // (pobj, gap) of primal-feasible iterates
  for (int it = 0; it <= opts.max_iterations; ++it) {
    // residuals and objectives
    VectorXd rp = -c;
    double dobj = 0, xz = 0;
    double rd_norm = 0;
    for (std::size_t b = 0; b < nb; ++b) {
      const auto& blk = blocks[b];
      MatrixXd fy = blk.f0;
      for (const auto& [i, f] : blk.terms) {
        rp(i) += inner(f, x[b]);
        fy += y(i) * f;
      }
      rd[b] = fy - z[b];
      rd_norm += rd[b].squaredNorm();
      dobj -= inner(blk.f0, x[b]);
      xz += inner(x[b], z[b]);
    }
    rd_norm = std::sqrt(rd_norm);
    const double pobj = c.dot(y);
    const double mu = xz / ntotal;
    sol.primal_objective = pobj;
    sol.dual_objective = dobj;
    sol.gap = std::abs(pobj - dobj);
    sol.primal_infeasibility = rd_norm / (1 + norm_f0);
    sol.dual_infeasibility = rp.norm() / (1 + cnorm);
    const double relgap = sol.gap / (1 + std::abs(pobj) + std::abs(dobj));

    if (sol.primal_infeasibility <= opts.feas_tol && sol.dual_infeasibility <= opts.feas_tol &&
        (relgap <= opts.gap_tol || xz / (1 + std::abs(pobj) + std::abs(dobj)) <= opts.gap_tol * 1e-2))
      return finish(SDPStatus::optimal, it);

    if (opts.stall_window > 0) {
      if (sol.primal_infeasibility <= opts.feas_tol) {
        history.emplace_back(pobj, sol.gap);
      } else {
        history.clear();
      }
      const auto w = static_cast<std::size_t>(opts.stall_window);
      const auto& then = history.size() > w ? history[history.size() - 1 - w] : history.front();
      if (history.size() > w && std::abs(pobj - then.first) <= opts.gap_tol * (1 + std::abs(pobj)) &&
          sol.gap > 0.5 * then.second) {
        std::ostringstream os;
        os << "objective stalled at " << pobj << " (gap " << sol.gap << ", dual infeasibility "
           << sol.dual_infeasibility << ")";
        sol.diagnostics = os.str();
        return finish(SDPStatus::stalled, it);
      }
    }

    // certificate that no y satisfies the blocks: X >= 0, <F_i, X> ~ 0, <F0, X> < 0
    if (dobj > 0) {
      VectorXd ax = rp + c;
      if (ax.norm() <= 1e-8 * dobj * std::max(1.0, norm_f) && dobj > 1e6 * (1 + cnorm)) {
        std::ostringstream os;
        os << "dual ray: -<F0,X>=" << dobj << ", |A(X)|=" << ax.norm();
        sol.diagnostics = os.str();
        return finish(SDPStatus::infeasible, it);
      }
    }
    // improving ray in y: sum y_i F_i nearly PSD with c^T y -> -inf
    if (pobj < -1e6 * (1 + norm_f0) && sol.dual_infeasibility > 1e-3) {
      double worst = 0;
      for (std::size_t b = 0; b < nb; ++b) {
        MatrixXd g = MatrixXd::Zero(static_cast<Eigen::Index>(blocks[b].size), static_cast<Eigen::Index>(blocks[b].size));
        for (const auto& [i, f] : blocks[b].terms) g += y(i) * f;
        worst = std::min(worst, eigen_sym(g).values(0));
      }
      if (worst >= -1e-8 * std::abs(pobj)) {
        sol.diagnostics = "primal ray with decreasing objective";
        return finish(SDPStatus::unbounded, it);
      }
    }
    if (it == opts.max_iterations) break;

    // factor Z, build the Schur complement
    for (std::size_t b = 0; b < nb; ++b) {
      Eigen::LLT<MatrixXd> llt(z[b]);
      if (llt.info() != Eigen::Success) {
        sol.diagnostics = "Z lost positive definiteness";
        return finish(SDPStatus::numerical_error, it);
      }
      zinv[b] = sym(llt.solve(MatrixXd::Identity(z[b].rows(), z[b].cols())));
    }
    MatrixXd schur = MatrixXd::Zero(m, m);
    std::vector<std::vector<MatrixXd>> xfz(nb);
    for (std::size_t b = 0; b < nb; ++b) {
      const auto& terms = blocks[b].terms;
      xfz[b].resize(terms.size());
      for (std::size_t l = 0; l < terms.size(); ++l) xfz[b][l] = x[b] * terms[l].second * zinv[b];
      for (std::size_t l = 0; l < terms.size(); ++l)
        for (std::size_t i = 0; i <= l; ++i) {
          const double v = inner(terms[i].second, xfz[b][l]);
          schur(terms[i].first, terms[l].first) += v;
          if (terms[i].first != terms[l].first) schur(terms[l].first, terms[i].first) += v;
        }
    }
    const double ridge = 1e-14 * std::max(1.0, schur.diagonal().cwiseAbs().maxCoeff());
    schur.diagonal().array() += ridge;
    Eigen::LLT<MatrixXd> schur_llt(schur);
    Eigen::LDLT<MatrixXd> schur_ldlt;
    const bool use_llt = schur_llt.info() == Eigen::Success;
    if (!use_llt) {
      schur_ldlt.compute(schur);
      if (schur_ldlt.info() != Eigen::Success) {
        sol.diagnostics = "Schur complement factorization failed";
        return finish(SDPStatus::numerical_error, it);
      }
    }

    // Solve for the direction given the complementarity target r (per block).
    auto direction = [&](const std::vector<MatrixXd>& r, VectorXd& dy, std::vector<MatrixXd>& dx,
                         std::vector<MatrixXd>& dz) {
      VectorXd rhs = rp;
      for (std::size_t b = 0; b < nb; ++b) {
        const MatrixXd w = r[b] - x[b] * rd[b] * zinv[b];
        for (const auto& [i, f] : blocks[b].terms) rhs(i) += inner(f, w);
      }
      dy = use_llt ? VectorXd(schur_llt.solve(rhs)) : VectorXd(schur_ldlt.solve(rhs));
      dx.resize(nb);
      dz.resize(nb);
      for (std::size_t b = 0; b < nb; ++b) {
        dz[b] = rd[b];
        for (const auto& [i, f] : blocks[b].terms) dz[b] += dy(i) * f;
        dx[b] = sym(r[b] - x[b] * dz[b] * zinv[b]);
      }
    };
    auto steps = [&](const std::vector<MatrixXd>& dx, const std::vector<MatrixXd>& dz) {
      double ap = 1e30, ad = 1e30;
      for (std::size_t b = 0; b < nb; ++b) {
        ap = std::min(ap, max_step(x[b], dx[b]));
        ad = std::min(ad, max_step(z[b], dz[b]));
      }
      return std::pair<double, double>(ap, ad);
    };

    VectorXd dy;
    std::vector<MatrixXd> dx, dz, r(nb);
    double sigma = 0.1;
    if (opts.predictor_corrector) {
      for (std::size_t b = 0; b < nb; ++b) r[b] = -x[b];
      direction(r, dy, dx, dz);
      auto [ap, ad] = steps(dx, dz);
      ap = std::min(1.0, ap);
      ad = std::min(1.0, ad);
      double xz_aff = 0;
      for (std::size_t b = 0; b < nb; ++b) xz_aff += inner(x[b] + ap * dx[b], z[b] + ad * dz[b]);
      const double ratio = std::max(0.0, xz_aff / xz);
      sigma = std::min(1.0, ratio * ratio * ratio);
      for (std::size_t b = 0; b < nb; ++b) r[b] = sigma * mu * zinv[b] - x[b] - dx[b] * dz[b] * zinv[b];
    } else {
      for (std::size_t b = 0; b < nb; ++b) r[b] = sigma * mu * zinv[b] - x[b];
    }
    direction(r, dy, dx, dz);
    auto [ap, ad] = steps(dx, dz);
    const double gamma = 0.9 + 0.09 * std::min({1.0, ap, ad});
    ap = std::min(1.0, gamma * ap);
    ad = std::min(1.0, gamma * ad);
    if (!(ap > 1e-14) && !(ad > 1e-14)) {
      sol.diagnostics = "step length collapsed";
      return finish(SDPStatus::numerical_error, it);
    }
    for (std::size_t b = 0; b < nb; ++b) {
      x[b] = sym(x[b] + ap * dx[b]);
      z[b] = sym(z[b] + ad * dz[b]);
    }
    y += ad * dy;
  }
  sol.diagnostics = "iteration cap reached";
  return finish(SDPStatus::max_iterations, opts.max_iterations);
}

}  // namespace

SDPSolution solve_sdp(const SDPProblem& prob, const SDPOptions& opts) {
  prob.validate();
  const auto n = static_cast<Eigen::Index>(prob.nvars);
  const VectorXd c = prob.objective.size() ? prob.objective : VectorXd::Zero(n);

  // Eliminate equalities: y = y0 + N w.
  VectorXd y0 = VectorXd::Zero(n);
  MatrixXd basis = MatrixXd::Identity(n, n);
  if (prob.eq_matrix.rows() > 0) {
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(prob.eq_matrix);
    y0 = cod.solve(prob.eq_rhs);
    const double resid = (prob.eq_matrix * y0 - prob.eq_rhs).norm();
    if (resid > 1e-9 * (1 + prob.eq_rhs.norm())) {
      SDPSolution s;
      s.status = SDPStatus::infeasible;
      s.diagnostics = "inconsistent equality constraints";
      return s;
    }
    Eigen::FullPivLU<MatrixXd> lu(prob.eq_matrix);
    lu.setThreshold(1e-12);
    basis = lu.rank() == n ? MatrixXd(n, 0) : MatrixXd(lu.kernel());
  }
  const Eigen::Index nf = basis.cols();

  std::vector<Block> blocks;
  for (const auto& ab : prob.blocks) {
    Block b{ab.size, ab.constant, {}};
    std::vector<MatrixXd> reduced(static_cast<std::size_t>(nf));
    std::vector<bool> used(static_cast<std::size_t>(nf), false);
    for (const auto& [i, f] : ab.terms) {
      const auto ii = static_cast<Eigen::Index>(i);
      b.f0 += y0(ii) * f;
      for (Eigen::Index k = 0; k < nf; ++k) {
        const double coef = basis(ii, k);
        if (coef == 0) continue;
        auto& slot = reduced[static_cast<std::size_t>(k)];
        if (!used[static_cast<std::size_t>(k)]) {
          slot = coef * f;
          used[static_cast<std::size_t>(k)] = true;
        } else {
          slot += coef * f;
        }
      }
    }
    for (Eigen::Index k = 0; k < nf; ++k)
      if (used[static_cast<std::size_t>(k)]) b.terms.emplace_back(k, std::move(reduced[static_cast<std::size_t>(k)]));
    blocks.push_back(std::move(b));
  }
  const VectorXd cw = basis.transpose() * c;

  // Drop variables that touch no block: they must have zero cost.
  std::vector<Eigen::Index> remap(static_cast<std::size_t>(nf), -1);
  std::vector<bool> touched(static_cast<std::size_t>(nf), false);
  for (const auto& b : blocks)
    for (const auto& t : b.terms) touched[static_cast<std::size_t>(t.first)] = true;
  Eigen::Index live = 0;
  for (Eigen::Index k = 0; k < nf; ++k) {
    if (touched[static_cast<std::size_t>(k)]) {
      remap[static_cast<std::size_t>(k)] = live++;
    } else if (std::abs(cw(k)) > 1e-14 * (1 + cw.norm())) {
      SDPSolution s;
      s.status = SDPStatus::unbounded;
      s.diagnostics = "free variable with nonzero cost";
      return s;
    }
  }
  for (auto& b : blocks)
    for (auto& t : b.terms) t.first = remap[static_cast<std::size_t>(t.first)];
  VectorXd cl(live);
  for (Eigen::Index k = 0; k < nf; ++k)
    if (remap[static_cast<std::size_t>(k)] >= 0) cl(remap[static_cast<std::size_t>(k)]) = cw(k);

  SDPSolution sol = interior_point(blocks, cl, opts);
  VectorXd w = VectorXd::Zero(nf);
  for (Eigen::Index k = 0; k < nf; ++k)
    if (remap[static_cast<std::size_t>(k)] >= 0 && sol.y.size() == live) w(k) = sol.y(remap[static_cast<std::size_t>(k)]);
  sol.y = y0 + basis * w;
  const double c0 = c.dot(y0);
  sol.primal_objective += c0;
  sol.dual_objective += c0;
  return sol;
}

SlackResult feasibility_slack(const std::vector<AffineBlock>& blocks, std::size_t nvars,
                              const std::vector<std::pair<std::size_t, double>>& fixed, double floor,
                              const SDPOptions& opts) {
  SDPProblem prob;
  prob.nvars = nvars;
  prob.blocks = blocks;
  return feasibility_slack(prob, fixed, floor, opts);
}

SlackResult feasibility_slack(const SDPProblem& input, const std::vector<std::pair<std::size_t, double>>& fixed,
                              double floor, const SDPOptions& opts) {
  const std::size_t nvars = input.nvars;
  std::vector<std::optional<double>> value(nvars);
  for (const auto& [i, v] : fixed) {
    if (i >= nvars) throw DimensionError("feasibility_slack: fixed variable out of range");
    value[i] = v;
  }
  std::vector<std::size_t> free_index(nvars, 0);
  std::size_t nfree = 0;
  for (std::size_t i = 0; i < nvars; ++i)
    if (!value[i]) free_index[i] = nfree++;
  const std::size_t t_index = nfree;

  SDPProblem prob;
  prob.nvars = nfree + 1;
  prob.objective = VectorXd::Zero(static_cast<Eigen::Index>(prob.nvars));
  prob.objective(static_cast<Eigen::Index>(t_index)) = 1;
  for (const auto& ab : input.blocks) {
    AffineBlock b{ab.size, ab.constant, {}};
    for (const auto& [i, f] : ab.terms) {
      if (i >= nvars) throw DimensionError("feasibility_slack: block references unknown variable");
      if (value[i]) {
        b.constant += *value[i] * f;
      } else {
        b.terms.emplace_back(free_index[i], f);
      }
    }
    const auto k = static_cast<Eigen::Index>(ab.size);
    b.terms.emplace_back(t_index, MatrixXd::Identity(k, k));
    prob.blocks.push_back(std::move(b));
  }
  AffineBlock guard{1, MatrixXd::Constant(1, 1, floor), {{t_index, MatrixXd::Identity(1, 1)}}};
  prob.blocks.push_back(std::move(guard));

  if (input.eq_matrix.rows() > 0) {
    if (static_cast<std::size_t>(input.eq_matrix.cols()) != nvars || input.eq_matrix.rows() != input.eq_rhs.size())
      throw DimensionError("feasibility_slack: equality system shape");
    const Eigen::Index rows = input.eq_matrix.rows();
    prob.eq_matrix = MatrixXd::Zero(rows, static_cast<Eigen::Index>(prob.nvars));
    prob.eq_rhs = input.eq_rhs;
    for (std::size_t i = 0; i < nvars; ++i) {
      const auto col = input.eq_matrix.col(static_cast<Eigen::Index>(i));
      if (value[i]) {
        prob.eq_rhs -= *value[i] * col;
      } else {
        prob.eq_matrix.col(static_cast<Eigen::Index>(free_index[i])) = col;
      }
    }
  }

  SlackResult out;
  out.solution = solve_sdp(prob, opts);
  out.y = VectorXd::Zero(static_cast<Eigen::Index>(nvars));
  if (out.solution.y.size() == static_cast<Eigen::Index>(prob.nvars)) {
    out.t = out.solution.y(static_cast<Eigen::Index>(t_index));
    for (std::size_t i = 0; i < nvars; ++i)
      out.y(static_cast<Eigen::Index>(i)) = value[i] ? *value[i] : out.solution.y(static_cast<Eigen::Index>(free_index[i]));
  } else {
    out.t = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace hypshadow
