#pragma once

#include <Eigen/Dense>

#include <stdexcept>

namespace momentcert::linalg {

/// Default relative singular-value threshold for rank decisions; every
/// rank-based verdict records the spectrum it was decided on.
inline constexpr double kDefaultRankTol = 1e-6;

/// Symmetric matrix with the symmetry enforced on construction.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Eigen::Ref<const Eigen::MatrixXd>& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("SymMatrix: not square");
    m_ = 0.5 * (a + a.transpose());
  }
  const Eigen::MatrixXd& mat() const { return m_; }
  Eigen::Index order() const { return m_.rows(); }

 private:
  Eigen::MatrixXd m_;
};

struct EigSym {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns, A*V = V*diag(values)
};

/// Eigendecomposition of a symmetric matrix. Throws on non-finite input.
EigSym eig_sym(const Eigen::Ref<const Eigen::MatrixXd>& a);

struct RankInfo {
  int rank = 0;
  Eigen::MatrixXd null_basis;       // orthonormal columns spanning ker(A)
  Eigen::VectorXd singular_values;  // descending
};

/// rank = #{sigma_i > tau * sigma_max}; tau must lie in (0,1).
RankInfo numerical_rank(const Eigen::Ref<const Eigen::MatrixXd>& a, double tau = kDefaultRankTol);

struct LstsqResult {
  Eigen::VectorXd x;
  double residual = 0;  // ||A x - b||_2
};

/// Minimum-norm least squares.
LstsqResult lstsq(const Eigen::Ref<const Eigen::MatrixXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b);

/// Nonnegative least squares (Lawson-Hanson active set): x >= 0 elementwise.
LstsqResult nnls(const Eigen::Ref<const Eigen::MatrixXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b);

/// Determinant via LU with partial pivoting.
double det_lu(const Eigen::Ref<const Eigen::MatrixXd>& a);

/// Spectral norm of a symmetric matrix.
double sym_opnorm(const Eigen::Ref<const Eigen::MatrixXd>& a);

}  // namespace momentcert::linalg
