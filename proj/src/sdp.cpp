#include "momentcert/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace momentcert::sdp {

void add_entry(Constraint& a, int block, int i, int j, double coeff) {
  if (coeff == 0.0) return;
  const int r = std::min(i, j), c = std::max(i, j);
  a.push_back({block, r, c, r == c ? coeff : 0.5 * coeff});
}

void normalize(Constraint& a) {
  std::sort(a.begin(), a.end(), [](const Term& s, const Term& t) {
    return std::tie(s.block, s.row, s.col) < std::tie(t.block, t.row, t.col);
  });
  Constraint merged;
  for (const Term& t : a) {
    if (!merged.empty() && merged.back().block == t.block && merged.back().row == t.row &&
        merged.back().col == t.col) {
      merged.back().value += t.value;
    } else {
      merged.push_back(t);
    }
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(), [](const Term& t) { return t.value == 0.0; }),
               merged.end());
  a = std::move(merged);
}

void SDPProblem::validate() const {
  if (static_cast<int>(C.size()) != num_blocks()) throw std::invalid_argument("sdp: C block count mismatch");
  if (b.size() != num_constraints()) throw std::invalid_argument("sdp: rhs size mismatch");
  for (int bidx = 0; bidx < num_blocks(); ++bidx) {
    if (block_sizes[static_cast<std::size_t>(bidx)] <= 0) throw std::invalid_argument("sdp: empty block");
    if (C[static_cast<std::size_t>(bidx)].order() != block_sizes[static_cast<std::size_t>(bidx)])
      throw std::invalid_argument("sdp: C block order mismatch");
    if (!C[static_cast<std::size_t>(bidx)].mat().allFinite()) throw std::invalid_argument("sdp: non-finite C");
  }
  if (!b.allFinite()) throw std::invalid_argument("sdp: non-finite rhs");
  for (const Constraint& a : constraints) {
    for (const Term& t : a) {
      if (t.block < 0 || t.block >= num_blocks()) throw std::invalid_argument("sdp: term block out of range");
      const int n = block_sizes[static_cast<std::size_t>(t.block)];
      if (t.row < 0 || t.col < t.row || t.col >= n) throw std::invalid_argument("sdp: term index out of range");
      if (!std::isfinite(t.value)) throw std::invalid_argument("sdp: non-finite constraint entry");
    }
  }
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::NearOptimal: return "NearOptimal";
    case SolveStatus::PrimalInfeasible: return "PrimalInfeasible";
    case SolveStatus::DualInfeasible: return "DualInfeasible";
    case SolveStatus::Stalled: return "Stalled";
  }
  return "Unknown";
}

namespace {

// Directed atom: contributes value at the ordered position (i,j).
struct Atom {
  int block, i, j;
  double v;
};

struct ConstraintData {
  std::vector<Atom> atoms;      // both (i,j) and (j,i) for off-diagonal terms
  std::vector<Term> terms;      // canonical upper-triangle terms
  double frob = 0;
};

double inner_with_X(const ConstraintData& a, const std::vector<Eigen::MatrixXd>& X) {
  double s = 0;
  for (const Term& t : a.terms) s += (t.row == t.col ? 1.0 : 2.0) * t.value * X[static_cast<std::size_t>(t.block)](t.row, t.col);
  return s;
}

void add_scaled(const ConstraintData& a, double w, std::vector<Eigen::MatrixXd>& M) {
  for (const Term& t : a.terms) {
    M[static_cast<std::size_t>(t.block)](t.row, t.col) += w * t.value;
    if (t.row != t.col) M[static_cast<std::size_t>(t.block)](t.col, t.row) += w * t.value;
  }
}

double block_dot(const std::vector<Eigen::MatrixXd>& A, const std::vector<Eigen::MatrixXd>& B) {
  double s = 0;
  for (std::size_t b = 0; b < A.size(); ++b) s += A[b].cwiseProduct(B[b]).sum();
  return s;
}

double block_fnorm(const std::vector<Eigen::MatrixXd>& A) {
  double s = 0;
  for (const auto& m : A) s += m.squaredNorm();
  return std::sqrt(s);
}

void symmetrize(std::vector<Eigen::MatrixXd>& A) {
  for (auto& m : A) m = 0.5 * (m + m.transpose()).eval();
}

/// Largest alpha <= cap with X + alpha*D >= 0, given X > 0.
double max_step(const Eigen::MatrixXd& X, const Eigen::MatrixXd& D, double cap) {
  Eigen::LLT<Eigen::MatrixXd> llt(X);
  if (llt.info() != Eigen::Success) return 0.0;
  const Eigen::MatrixXd L = llt.matrixL();
  Eigen::MatrixXd W = L.triangularView<Eigen::Lower>().solve(D);
  W = L.triangularView<Eigen::Lower>().solve(W.transpose().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (W + W.transpose()), Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()[0];
  if (lmin >= -1e-14) return cap;
  return std::min(cap, -1.0 / lmin);
}

double max_step_blocks(const std::vector<Eigen::MatrixXd>& X, const std::vector<Eigen::MatrixXd>& D, double cap) {
  double a = cap;
  for (std::size_t b = 0; b < X.size(); ++b) a = std::min(a, max_step(X[b], D[b], cap));
  return a;
}

double min_eig_blocks(const std::vector<Eigen::MatrixXd>& A) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& blk : A) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(blk, Eigen::EigenvaluesOnly);
    m = std::min(m, es.eigenvalues()[0]);
  }
  return m;
}

struct Workspace {
  std::vector<ConstraintData> A;
  int m = 0;
  std::vector<int> sizes;
  double b_norm = 0, c_norm = 0, a_scale = 0;
};

}  // namespace

Eigen::VectorXd apply_A(const SDPProblem& p, const std::vector<Eigen::MatrixXd>& X) {
  Eigen::VectorXd r(p.num_constraints());
  for (int l = 0; l < p.num_constraints(); ++l) {
    double s = 0;
    for (const Term& t : p.constraints[static_cast<std::size_t>(l)])
      s += (t.row == t.col ? 1.0 : 2.0) * t.value * X[static_cast<std::size_t>(t.block)](t.row, t.col);
    r[l] = s;
  }
  return r;
}

std::vector<Eigen::MatrixXd> apply_At(const SDPProblem& p, const Eigen::Ref<const Eigen::VectorXd>& y) {
  std::vector<Eigen::MatrixXd> M;
  for (int n : p.block_sizes) M.push_back(Eigen::MatrixXd::Zero(n, n));
  for (int l = 0; l < p.num_constraints(); ++l) {
    const double w = y[l];
    if (w == 0.0) continue;
    for (const Term& t : p.constraints[static_cast<std::size_t>(l)]) {
      M[static_cast<std::size_t>(t.block)](t.row, t.col) += w * t.value;
      if (t.row != t.col) M[static_cast<std::size_t>(t.block)](t.col, t.row) += w * t.value;
    }
  }
  return M;
}

SDPSolution solve(const SDPProblem& problem, const SdpOptions& opt) {
  problem.validate();

  Workspace ws;
  ws.m = problem.num_constraints();
  ws.sizes = problem.block_sizes;
  const int nblocks = problem.num_blocks();
  double ntot = 0;
  for (int n : ws.sizes) ntot += n;

  ws.A.resize(static_cast<std::size_t>(ws.m));
  for (int l = 0; l < ws.m; ++l) {
    Constraint c = problem.constraints[static_cast<std::size_t>(l)];
    normalize(c);
    ConstraintData& cd = ws.A[static_cast<std::size_t>(l)];
    cd.terms = c;
    double f2 = 0;
    for (const Term& t : c) {
      cd.atoms.push_back({t.block, t.row, t.col, t.value});
      f2 += t.value * t.value;
      if (t.row != t.col) {
        cd.atoms.push_back({t.block, t.col, t.row, t.value});
        f2 += t.value * t.value;
      }
    }
    cd.frob = std::sqrt(f2);
    ws.a_scale = std::max(ws.a_scale, cd.frob);
  }
  ws.b_norm = problem.b.norm();
  for (const auto& c : problem.C) ws.c_norm = std::max(ws.c_norm, c.mat().norm());

  // Starting point: scaled identities, SDPA-style.
  double rho_p = std::max({10.0, std::sqrt(ntot)});
  for (int l = 0; l < ws.m; ++l)
    rho_p = std::max(rho_p, (1.0 + std::abs(problem.b[l])) / (1.0 + ws.A[static_cast<std::size_t>(l)].frob));
  const double rho_d = std::max({10.0, std::sqrt(ntot), ws.c_norm, ws.a_scale});

  std::vector<Eigen::MatrixXd> X, S;
  for (int n : ws.sizes) {
    X.push_back(rho_p * Eigen::MatrixXd::Identity(n, n));
    S.push_back(rho_d * Eigen::MatrixXd::Identity(n, n));
  }
  Eigen::VectorXd y = Eigen::VectorXd::Zero(ws.m);

  SDPSolution sol;
  SDPSolution best;
  double best_merit = std::numeric_limits<double>::infinity();
  bool converged = false;
  SolveStatus infeas_status = SolveStatus::Stalled;
  bool infeas_detected = false;
  int no_progress = 0;

  Eigen::MatrixXd M(ws.m, ws.m);
  std::vector<Eigen::MatrixXd> Sinv(static_cast<std::size_t>(nblocks));
  std::vector<Eigen::MatrixXd> Rd(static_cast<std::size_t>(nblocks));

  int iter = 0;
  for (; iter < opt.max_iter; ++iter) {
    // S^{-1}, with escalating jitter if S lost definiteness to roundoff.
    for (int bi = 0; bi < nblocks; ++bi) {
      const int n = ws.sizes[static_cast<std::size_t>(bi)];
      double jitter = 0;
      for (int attempt = 0; attempt < 8; ++attempt) {
        Eigen::LLT<Eigen::MatrixXd> llt(S[static_cast<std::size_t>(bi)] + jitter * Eigen::MatrixXd::Identity(n, n));
        if (llt.info() == Eigen::Success) {
          Sinv[static_cast<std::size_t>(bi)] = llt.solve(Eigen::MatrixXd::Identity(n, n));
          break;
        }
        jitter = jitter == 0 ? 1e-14 * std::max(1.0, S[static_cast<std::size_t>(bi)].norm()) : jitter * 100;
        if (attempt == 7) throw std::runtime_error("sdp: dual slack factorization failed");
      }
    }

    const Eigen::VectorXd ax = apply_A(problem, X);
    const Eigen::VectorXd rp = problem.b - ax;
    std::vector<Eigen::MatrixXd> aty = apply_At(problem, y);
    for (int bi = 0; bi < nblocks; ++bi)
      Rd[static_cast<std::size_t>(bi)] =
          problem.C[static_cast<std::size_t>(bi)].mat() - S[static_cast<std::size_t>(bi)] - aty[static_cast<std::size_t>(bi)];

    double pobj = 0;
    for (int bi = 0; bi < nblocks; ++bi)
      pobj += problem.C[static_cast<std::size_t>(bi)].mat().cwiseProduct(X[static_cast<std::size_t>(bi)]).sum();
    const double dobj = problem.b.dot(y);
    const double xs = block_dot(X, S);
    const double mu = xs / ntot;

    IterStats st;
    st.pobj = pobj;
    st.dobj = dobj;
    st.mu = mu;
    st.primal_res = rp.norm() / (1.0 + ws.b_norm);
    st.dual_res = block_fnorm(Rd) / (1.0 + ws.c_norm);
    const double denom = 1.0 + std::abs(pobj) + std::abs(dobj);
    st.comp_gap = xs / denom;
    st.rel_gap = std::abs(pobj - dobj) / denom;
    sol.trace.push_back(st);

    if (opt.verbosity > 0) {
      std::cerr << "iter " << iter << " pobj " << pobj << " dobj " << dobj << " pres " << st.primal_res
                << " dres " << st.dual_res << " gap " << st.comp_gap << "\n";
    }

    const double merit = std::max({st.primal_res, st.dual_res, st.comp_gap, st.rel_gap});
    if (merit < best_merit * 0.9999) {
      no_progress = 0;
    } else {
      ++no_progress;
    }
    if (merit < best_merit) {
      best_merit = merit;
      best.X = X;
      best.S = S;
      best.y = y;
      best.primal_value = pobj;
      best.dual_value = dobj;
      best.primal_residual = st.primal_res;
      best.dual_residual = st.dual_res;
      best.comp_gap = st.comp_gap;
      best.rel_gap = st.rel_gap;
    }

    if (st.primal_res <= opt.tol_feas && st.dual_res <= opt.tol_feas && st.comp_gap <= opt.tol_gap &&
        st.rel_gap <= opt.tol_gap) {
      converged = true;
      break;
    }

    // Certificate-based infeasibility detection.
    const double bty = dobj;
    if (bty > 1e7 * (1.0 + ws.b_norm)) {
      Eigen::VectorXd yhat = y / bty;
      std::vector<Eigen::MatrixXd> z = apply_At(problem, -yhat);
      double znorm = block_fnorm(z);
      if (min_eig_blocks(z) >= -1e-7 * std::max(1.0, znorm)) {
        infeas_detected = true;
        infeas_status = SolveStatus::PrimalInfeasible;
        break;
      }
    }
    if (pobj < -1e7 * (1.0 + ws.c_norm + ws.b_norm)) {
      const double cx = std::abs(pobj);
      double feas = (ax / cx).cwiseAbs().maxCoeff();
      if (feas <= 1e-7) {
        infeas_detected = true;
        infeas_status = SolveStatus::DualInfeasible;
        break;
      }
    }
    if (no_progress > 20) break;

    // Schur complement M_{lm} = sum_b tr(A_l X A_m S^{-1}).
    for (int l = 0; l < ws.m; ++l) {
      const auto& al = ws.A[static_cast<std::size_t>(l)].atoms;
      for (int k = l; k < ws.m; ++k) {
        const auto& ak = ws.A[static_cast<std::size_t>(k)].atoms;
        double s = 0;
        for (const Atom& p : al) {
          const auto& Xb = X[static_cast<std::size_t>(p.block)];
          const auto& Zb = Sinv[static_cast<std::size_t>(p.block)];
          for (const Atom& q : ak) {
            if (q.block != p.block) continue;
            s += p.v * q.v * Xb(p.j, q.i) * Zb(q.j, p.i);
          }
        }
        M(l, k) = s;
        M(k, l) = s;
      }
    }

    Eigen::LLT<Eigen::MatrixXd> mllt;
    {
      double reg = 0;
      const double mscale = std::max(1.0, M.diagonal().cwiseAbs().maxCoeff());
      for (int attempt = 0; attempt < 12; ++attempt) {
        mllt.compute(reg == 0 ? M : Eigen::MatrixXd(M + reg * Eigen::MatrixXd::Identity(ws.m, ws.m)));
        if (mllt.info() == Eigen::Success) break;
        reg = reg == 0 ? opt.schur_reg * mscale : reg * 100;
        if (attempt == 11) throw std::runtime_error("sdp: Schur complement factorization failed");
      }
    }

    // Predictor (affine scaling) direction.
    std::vector<Eigen::MatrixXd> XRdSinv(static_cast<std::size_t>(nblocks));
    for (int bi = 0; bi < nblocks; ++bi)
      XRdSinv[static_cast<std::size_t>(bi)] = X[static_cast<std::size_t>(bi)] * Rd[static_cast<std::size_t>(bi)] *
                                              Sinv[static_cast<std::size_t>(bi)];
    Eigen::VectorXd rhs = problem.b + apply_A(problem, XRdSinv);
    const Eigen::VectorXd dy_a = mllt.solve(rhs);

    std::vector<Eigen::MatrixXd> dS_a = apply_At(problem, dy_a);
    for (int bi = 0; bi < nblocks; ++bi)
      dS_a[static_cast<std::size_t>(bi)] = Rd[static_cast<std::size_t>(bi)] - dS_a[static_cast<std::size_t>(bi)];
    std::vector<Eigen::MatrixXd> dX_a(static_cast<std::size_t>(nblocks));
    for (int bi = 0; bi < nblocks; ++bi)
      dX_a[static_cast<std::size_t>(bi)] =
          -X[static_cast<std::size_t>(bi)] - X[static_cast<std::size_t>(bi)] * dS_a[static_cast<std::size_t>(bi)] *
                                                 Sinv[static_cast<std::size_t>(bi)];
    symmetrize(dX_a);

    const double ap_a = max_step_blocks(X, dX_a, 1.0);
    const double ad_a = max_step_blocks(S, dS_a, 1.0);
    double mu_aff = 0;
    for (int bi = 0; bi < nblocks; ++bi)
      mu_aff += (X[static_cast<std::size_t>(bi)] + ap_a * dX_a[static_cast<std::size_t>(bi)])
                    .cwiseProduct(S[static_cast<std::size_t>(bi)] + ad_a * dS_a[static_cast<std::size_t>(bi)])
                    .sum();
    mu_aff /= ntot;
    double sigma = std::pow(std::max(mu_aff, 0.0) / mu, 3.0);
    sigma = std::clamp(sigma, 1e-10, 1.0);

    // Corrector.
    std::vector<Eigen::MatrixXd> corr(static_cast<std::size_t>(nblocks));
    for (int bi = 0; bi < nblocks; ++bi)
      corr[static_cast<std::size_t>(bi)] =
          (X[static_cast<std::size_t>(bi)] * Rd[static_cast<std::size_t>(bi)] +
           dX_a[static_cast<std::size_t>(bi)] * dS_a[static_cast<std::size_t>(bi)]) *
          Sinv[static_cast<std::size_t>(bi)];
    rhs = problem.b + apply_A(problem, corr);
    for (int l = 0; l < ws.m; ++l) {
      double asinv = 0;
      for (const Term& t : ws.A[static_cast<std::size_t>(l)].terms)
        asinv += (t.row == t.col ? 1.0 : 2.0) * t.value * Sinv[static_cast<std::size_t>(t.block)](t.row, t.col);
      rhs[l] -= sigma * mu * asinv;
    }
    const Eigen::VectorXd dy = mllt.solve(rhs);

    std::vector<Eigen::MatrixXd> dS = apply_At(problem, dy);
    for (int bi = 0; bi < nblocks; ++bi)
      dS[static_cast<std::size_t>(bi)] = Rd[static_cast<std::size_t>(bi)] - dS[static_cast<std::size_t>(bi)];
    std::vector<Eigen::MatrixXd> dX(static_cast<std::size_t>(nblocks));
    for (int bi = 0; bi < nblocks; ++bi) {
      const int n = ws.sizes[static_cast<std::size_t>(bi)];
      dX[static_cast<std::size_t>(bi)] =
          sigma * mu * Sinv[static_cast<std::size_t>(bi)] - X[static_cast<std::size_t>(bi)] -
          (X[static_cast<std::size_t>(bi)] * dS[static_cast<std::size_t>(bi)] +
           dX_a[static_cast<std::size_t>(bi)] * dS_a[static_cast<std::size_t>(bi)]) *
              Sinv[static_cast<std::size_t>(bi)];
      (void)n;
    }
    symmetrize(dX);

    const double tau = iter < 3 ? 0.9 : 0.97;
    const double ap = std::min(1.0, tau * max_step_blocks(X, dX, 1.0 / tau));
    const double ad = std::min(1.0, tau * max_step_blocks(S, dS, 1.0 / tau));

    if (ap < opt.min_step && ad < opt.min_step) break;

    for (int bi = 0; bi < nblocks; ++bi) {
      X[static_cast<std::size_t>(bi)] += ap * dX[static_cast<std::size_t>(bi)];
      S[static_cast<std::size_t>(bi)] += ad * dS[static_cast<std::size_t>(bi)];
    }
    symmetrize(X);
    symmetrize(S);
    y += ad * dy;
  }

  // Assemble the returned iterate.
  if (converged) {
    sol.X = X;
    sol.S = S;
    sol.y = y;
    const IterStats& st = sol.trace.back();
    sol.primal_value = st.pobj;
    sol.dual_value = st.dobj;
    sol.primal_residual = st.primal_res;
    sol.dual_residual = st.dual_res;
    sol.comp_gap = st.comp_gap;
    sol.rel_gap = st.rel_gap;
    sol.status = SolveStatus::Optimal;
  } else if (infeas_detected) {
    sol.X = X;
    sol.S = S;
    sol.y = y;
    const IterStats& st = sol.trace.back();
    sol.primal_value = st.pobj;
    sol.dual_value = st.dobj;
    sol.primal_residual = st.primal_res;
    sol.dual_residual = st.dual_res;
    sol.comp_gap = st.comp_gap;
    sol.rel_gap = st.rel_gap;
    sol.status = infeas_status;
  } else {
    sol.X = best.X;
    sol.S = best.S;
    sol.y = best.y;
    sol.primal_value = best.primal_value;
    sol.dual_value = best.dual_value;
    sol.primal_residual = best.primal_residual;
    sol.dual_residual = best.dual_residual;
    sol.comp_gap = best.comp_gap;
    sol.rel_gap = best.rel_gap;
    const double near = std::max({best.primal_residual, best.dual_residual, best.comp_gap, best.rel_gap});
    sol.status = near <= opt.near_tol ? SolveStatus::NearOptimal : SolveStatus::Stalled;
  }
  sol.iterations = iter;
  if (!sol.X.empty()) {
    sol.min_eig_X = min_eig_blocks(sol.X);
    sol.min_eig_S = min_eig_blocks(sol.S);
  }
  return sol;
}

}  // namespace momentcert::sdp
