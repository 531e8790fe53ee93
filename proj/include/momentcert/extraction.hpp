#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "momentcert/relaxation.hpp"

namespace momentcert {

struct ExtractionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Truncated moment vector indexed by the degree-2k monomial basis, y_0 = 1.
struct MomentSequence {
  int order = 0;
  MonomialBasis basis2k;
  Eigen::VectorXd y;

  /// Reads the moments off the canonical entries of the solved moment block.
  static MomentSequence from_solution(const MomentRelaxation& rel, const RelaxationSdp& rsdp,
                                      const sdp::SDPSolution& sol);

  /// Moments of the Dirac measure at a point: y_alpha = u^alpha.
  static MomentSequence dirac(int nvars, int order, const Eigen::Ref<const Eigen::VectorXd>& point);

  /// M_s(y) over the degree-s basis (s <= order).
  Eigen::MatrixXd moment_matrix(int s) const;

  /// L_y(f).
  double value_of(const Polynomial<double>& f) const;

  int nvars() const { return basis2k.nvars; }
};

/// Rank decision with the plateau heuristic: the tau threshold decides unless
/// a singular-value ratio gap >= 1e3 overrides it; both are recorded.
struct RankDecision {
  int rank = 0;
  int rank_tau = 0;
  bool plateau_used = false;
  Eigen::VectorXd spectrum;
};
RankDecision decide_rank(const Eigen::Ref<const Eigen::VectorXd>& singular_values, double tau);

struct FlatTruncation {
  int order = 0;
  int d_K = 1;
  int rank_high = 0, rank_low = 0;
  bool flat = false;
  RankDecision high, low;
};

/// Compares rank M_k(y) with rank M_{k-d_K}(y). Throws when k <= d_K.
FlatTruncation flat_check(const MomentSequence& y, const POPInstance& pop,
                          double tau = linalg::kDefaultRankTol);

struct ExtractionResult {
  bool ok = false;
  std::vector<Eigen::VectorXd> points;
  std::vector<double> feasibility_violations;
  std::vector<double> objective_gaps;  // |f(u) - L_y(f)| / (1 + |L_y(f)|)
  Eigen::VectorXd weights;             // nonnegative Dirac-mixture weights
  int rank = 0;
  std::string log;
};

/// Moment-matrix minimizer extraction: pivoted column echelon basis of the
/// low-order moment matrix, multiplication matrices per variable, and
/// simultaneous diagonalization through the real Schur form of a random
/// convex combination. Points failing the feasibility or objective-match
/// filters are discarded.
ExtractionResult extract(const MomentSequence& y, const POPInstance& pop,
                         double tau = linalg::kDefaultRankTol, std::uint64_t seed = 0x6d636572);

}  // namespace momentcert
