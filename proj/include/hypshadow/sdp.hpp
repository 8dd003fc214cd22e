#pragma once

// Dense symmetric eigensolver and a small primal-dual interior-point SDP
// solver for problems of the form
//
//   minimize  c^T y   subject to  F_j(y) = F_j0 + sum_i y_i F_ji >= 0  (PSD, every block j)
//                                 A y = b.

#include "hypshadow/exact_linalg.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hypshadow {

/// Symmetric matrix of doubles. Construction rejects asymmetry above 1e-12
/// (relative) and symmetrizes what remains.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(Eigen::MatrixXd m);
  static SymMatrix from_rational(const RMatrix& m);

  std::size_t size() const { return static_cast<std::size_t>(m_.rows()); }
  const Eigen::MatrixXd& matrix() const { return m_; }
  double inf_norm() const;

 private:
  Eigen::MatrixXd m_;
};

struct EigenDecomposition {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // column i belongs to values(i)
};

/// Cyclic Jacobi. Throws DomainError on non-finite input.
EigenDecomposition eigen_sym(const SymMatrix& s);
EigenDecomposition eigen_sym(const Eigen::MatrixXd& s);

struct PsdCheck {
  bool psd = false;
  double min_eigenvalue = 0;
  Eigen::VectorXd witness;              // unit vector with v^T S v < 0 when !psd
  bool exact = false;                   // verdict decided in exact arithmetic
  std::optional<RVector> exact_witness; // rational v with v^T S v < 0
};

/// Float screen: psd iff lambda_min >= -tol (1 + |S|_inf).
PsdCheck psd_check(const SymMatrix& s, double tol = 1e-9);
/// Float screen, then an exact verdict; a float witness is rounded to a
/// rational vector and rechecked before the exact classifier is consulted.
PsdCheck psd_check(const RMatrix& s, double tol = 1e-9);

struct AffineBlock {
  std::size_t size = 0;
  Eigen::MatrixXd constant;
  std::vector<std::pair<std::size_t, Eigen::MatrixXd>> terms;  // (variable, coefficient matrix)

  Eigen::MatrixXd evaluate(const Eigen::VectorXd& y) const;
};

struct SDPProblem {
  std::size_t nvars = 0;
  Eigen::VectorXd objective;  // minimized; empty means zero
  std::vector<AffineBlock> blocks;
  Eigen::MatrixXd eq_matrix;  // rows x nvars, may be empty
  Eigen::VectorXd eq_rhs;

  void validate() const;
};

struct SDPOptions {
  double gap_tol = 1e-7;
  double feas_tol = 1e-8;
  int max_iterations = 200;
  bool predictor_corrector = true;
  // Stop once the iterate is primal feasible, the objective has moved less
  // than gap_tol (relative) and the gap has not halved over this many
  // iterations; 0 disables.
  int stall_window = 10;
};

enum class SDPStatus { optimal, infeasible, unbounded, stalled, max_iterations, numerical_error };

const char* to_string(SDPStatus s);

struct SDPSolution {
  SDPStatus status = SDPStatus::numerical_error;
  double primal_objective = 0;  // c^T y
  double dual_objective = 0;    // -<F0, X> (plus equality term)
  Eigen::VectorXd y;
  std::vector<Eigen::MatrixXd> dual;  // X per block
  int iterations = 0;
  double gap = 0;
  double primal_infeasibility = 0;
  double dual_infeasibility = 0;
  std::string diagnostics;
};

SDPSolution solve_sdp(const SDPProblem& prob, const SDPOptions& opts = {});

struct SlackResult {
  double t = 0;
  Eigen::VectorXd y;  // values of the free variables
  SDPSolution solution;
};

/// min t s.t. every block + t I >= 0 over the free variables, with t >= -floor.
/// Variables listed in `fixed` are substituted before solving.
SlackResult feasibility_slack(const std::vector<AffineBlock>& blocks, std::size_t nvars,
                              const std::vector<std::pair<std::size_t, double>>& fixed, double floor = 1.0,
                              const SDPOptions& opts = {});
/// Same, keeping the equalities of `prob` (its objective is ignored).
SlackResult feasibility_slack(const SDPProblem& prob, const std::vector<std::pair<std::size_t, double>>& fixed,
                              double floor = 1.0, const SDPOptions& opts = {});

}  // namespace hypshadow
