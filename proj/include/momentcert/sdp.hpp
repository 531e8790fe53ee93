#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "momentcert/linalg.hpp"

namespace momentcert::sdp {

/// One symmetric entry of a sparse constraint matrix: A[row,col] = A[col,row]
/// = value (row <= col).
struct Term {
  int block = 0;
  int row = 0, col = 0;
  double value = 0;
};

using Constraint = std::vector<Term>;

/// Records "coeff * X(i,j)" as a symmetric term, i.e. the constraint's inner
/// product against X picks up exactly coeff times the (i,j) entry value.
void add_entry(Constraint& a, int block, int i, int j, double coeff);

/// Sorts terms and merges duplicates; drops exact zeros.
void normalize(Constraint& a);

/// Block-diagonal SDP in standard primal form
///   min sum_b <C_b, X_b>   s.t.  sum_b <A_{l,b}, X_b> = b_l,  X_b >= 0,
/// with dual
///   max b'y               s.t.  C_b - sum_l y_l A_{l,b} = S_b >= 0.
struct SDPProblem {
  std::vector<int> block_sizes;
  std::vector<linalg::SymMatrix> C;
  std::vector<Constraint> constraints;
  Eigen::VectorXd b;

  int num_constraints() const { return static_cast<int>(constraints.size()); }
  int num_blocks() const { return static_cast<int>(block_sizes.size()); }
  void validate() const;
};

enum class SolveStatus { Optimal, NearOptimal, PrimalInfeasible, DualInfeasible, Stalled };

std::string to_string(SolveStatus s);

struct SdpOptions {
  int max_iter = 200;
  double tol_gap = 1e-8;
  double tol_feas = 1e-8;
  double near_tol = 1e-5;       // NearOptimal threshold for degenerate problems
  double min_step = 1e-10;      // stall detection
  double schur_reg = 1e-12;     // diagonal regularization when the Schur LLT fails
  int verbosity = 0;
};

struct IterStats {
  double pobj = 0, dobj = 0;
  double primal_res = 0, dual_res = 0;
  double comp_gap = 0;  // <X,S>/(1+|p|+|d|)
  double rel_gap = 0;   // |p-d|/(1+|p|+|d|)
  double mu = 0;
};

struct SDPSolution {
  std::vector<Eigen::MatrixXd> X;
  std::vector<Eigen::MatrixXd> S;
  Eigen::VectorXd y;
  double primal_value = 0, dual_value = 0;
  double primal_residual = 0, dual_residual = 0;
  double rel_gap = 0, comp_gap = 0;
  double min_eig_X = 0, min_eig_S = 0;
  SolveStatus status = SolveStatus::Stalled;
  int iterations = 0;
  std::vector<IterStats> trace;
};

SDPSolution solve(const SDPProblem& problem, const SdpOptions& options = {});

/// sum_b <A_{l,b}, X_b> for every constraint l.
Eigen::VectorXd apply_A(const SDPProblem& p, const std::vector<Eigen::MatrixXd>& X);

/// Dense accumulation of sum_l y_l A_{l,b}.
std::vector<Eigen::MatrixXd> apply_At(const SDPProblem& p, const Eigen::Ref<const Eigen::VectorXd>& y);

}  // namespace momentcert::sdp
