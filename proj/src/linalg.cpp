#include "momentcert/linalg.hpp"

#include <vector>

namespace momentcert::linalg {

EigSym eig_sym(const Eigen::Ref<const Eigen::MatrixXd>& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("eig_sym: not square");
  if (!a.allFinite()) throw std::invalid_argument("eig_sym: non-finite input");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (a + a.transpose()));
  if (es.info() != Eigen::Success) throw std::runtime_error("eig_sym: eigendecomposition failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

RankInfo numerical_rank(const Eigen::Ref<const Eigen::MatrixXd>& a, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("numerical_rank: tau must lie in (0,1)");
  const Eigen::Index cols = a.cols();
  RankInfo info;
  if (a.rows() == 0 || cols == 0) {
    info.rank = 0;
    info.null_basis = Eigen::MatrixXd::Identity(cols, cols);
    info.singular_values = Eigen::VectorXd::Zero(std::min<Eigen::Index>(a.rows(), cols));
    return info;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  info.singular_values = svd.singularValues();
  const double smax = info.singular_values.size() > 0 ? info.singular_values[0] : 0.0;
  int r = 0;
  for (Eigen::Index i = 0; i < info.singular_values.size(); ++i)
    if (info.singular_values[i] > tau * smax) ++r;
  if (smax == 0.0) r = 0;
  info.rank = r;
  info.null_basis = svd.matrixV().rightCols(cols - r);
  return info;
}

LstsqResult lstsq(const Eigen::Ref<const Eigen::MatrixXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.rows() != b.size()) throw std::invalid_argument("lstsq: dimension mismatch");
  LstsqResult r;
  if (a.cols() == 0) {
    r.x = Eigen::VectorXd::Zero(0);
    r.residual = b.norm();
    return r;
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
  r.x = cod.solve(b);
  r.residual = (a * r.x - b).norm();
  return r;
}

LstsqResult nnls(const Eigen::Ref<const Eigen::MatrixXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.rows() != b.size()) throw std::invalid_argument("nnls: dimension mismatch");
  const int n = static_cast<int>(a.cols());
  LstsqResult out;
  out.x = Eigen::VectorXd::Zero(n);
  if (n == 0) {
    out.residual = b.norm();
    return out;
  }

  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  const double wtol = 1e-12 * std::max(1.0, (a.transpose() * b).cwiseAbs().maxCoeff());
  const int max_outer = 3 * n + 30;

  auto solve_passive = [&](Eigen::VectorXd& z) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (passive[static_cast<std::size_t>(i)]) idx.push_back(i);
    Eigen::MatrixXd ap(a.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) ap.col(static_cast<Eigen::Index>(c)) = a.col(idx[c]);
    const Eigen::VectorXd zp = lstsq(ap, b).x;
    z = Eigen::VectorXd::Zero(n);
    for (std::size_t c = 0; c < idx.size(); ++c) z[idx[c]] = zp[static_cast<Eigen::Index>(c)];
  };

  for (int outer = 0; outer < max_outer; ++outer) {
    const Eigen::VectorXd w = a.transpose() * (b - a * x);
    int best = -1;
    double bestw = wtol;
    for (int i = 0; i < n; ++i) {
      if (!passive[static_cast<std::size_t>(i)] && w[i] > bestw) {
        bestw = w[i];
        best = i;
      }
    }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;

    for (int inner = 0; inner < max_outer; ++inner) {
      Eigen::VectorXd z;
      solve_passive(z);
      bool all_positive = true;
      double alpha = 1.0;
      for (int i = 0; i < n; ++i) {
        if (passive[static_cast<std::size_t>(i)] && z[i] <= 0.0) {
          all_positive = false;
          const double denom = x[i] - z[i];
          if (denom > 0) alpha = std::min(alpha, x[i] / denom);
        }
      }
      if (all_positive) {
        x = z;
        break;
      }
      x += alpha * (z - x);
      for (int i = 0; i < n; ++i) {
        if (passive[static_cast<std::size_t>(i)] && x[i] <= 1e-14) {
          x[i] = 0.0;
          passive[static_cast<std::size_t>(i)] = false;
        }
      }
      if (!passive[static_cast<std::size_t>(best)] && inner == 0) break;  // the fresh column left immediately
    }
  }

  out.x = x.cwiseMax(0.0);
  out.residual = (a * out.x - b).norm();
  return out;
}

double det_lu(const Eigen::Ref<const Eigen::MatrixXd>& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("det_lu: not square");
  if (a.rows() == 0) return 1.0;
  return Eigen::PartialPivLU<Eigen::MatrixXd>(a).determinant();
}

double sym_opnorm(const Eigen::Ref<const Eigen::MatrixXd>& a) {
  if (a.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace momentcert::linalg
