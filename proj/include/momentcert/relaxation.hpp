#pragma once

#include <unordered_map>
#include <vector>

#include "momentcert/pop.hpp"
#include "momentcert/sdp.hpp"

namespace momentcert {

/// Monomials of degree <= `degree`, ascending grevlex, with index lookup.
struct MonomialBasis {
  int nvars = 0;
  int degree = -1;
  std::vector<Monomial> monomials;
  std::unordered_map<Monomial, int, MonomialHash> index;

  static MonomialBasis up_to_degree(int nvars, int degree);
  int find(const Monomial& m) const {
    auto it = index.find(m);
    return it == index.end() ? -1 : it->second;
  }
  int size() const { return static_cast<int>(monomials.size()); }
};

/// A linear form sum coef * y_{mono} over the degree-2k monomial basis.
struct LinearTerm {
  int mono = 0;
  double coef = 0;
};
using LinearForm = std::vector<LinearTerm>;

struct BlockSpec {
  enum class Kind { Moment, Localizing };
  Kind kind = Kind::Moment;
  int g_index = -1;  // index into the instance's inequality tuple
  MonomialBasis gens;
  std::vector<LinearForm> entries;  // upper triangle, row-major

  int order() const { return gens.size(); }
  const LinearForm& entry(int i, int j) const;
};

/// The order-k moment-side relaxation: one moment block, one localizing block
/// per inequality, linear constraints generated by the truncated ideal of h,
/// and the normalization y_0 = 1.
struct MomentRelaxation {
  int order = 0;
  int nvars = 0;
  int d_K = 1;  // max(1, ceil(deg h_i / 2), ceil(deg g_j / 2))
  NumericPOP pop;
  MonomialBasis basis2k;
  std::vector<BlockSpec> blocks;  // blocks[0] is the moment block

  struct IdealRow {
    int h_index = 0;
    Monomial shift;    // x^alpha with deg(x^alpha h_i) <= 2k
    LinearForm form;   // sum_delta h_delta * y_{alpha+delta}
  };
  std::vector<IdealRow> ideal_rows;
  LinearForm objective_form;  // L_y(f)

  static int min_order_for(const POPInstance& pop);
  static MomentRelaxation build(const POPInstance& pop, int k);
};

/// Provenance of each SDP constraint row, used to decode dual solutions.
struct SdpMapping {
  enum class Kind { Normalization, Consistency, Ideal, LocalizingTie };
  struct Row {
    Kind kind = Kind::Consistency;
    int h_index = -1;
    int shift_mono = -1;  // index into basis2k (Ideal rows)
  };
  std::vector<Row> rows;
  std::vector<std::pair<int, int>> canonical;  // moment-block entry holding each y_alpha
  int norm_row = -1;
  int duplicates_removed = 0;
};

struct RelaxationSdp {
  sdp::SDPProblem problem;
  SdpMapping map;
};

/// Lowers the relaxation to a block SDP whose only primal matrix variables are
/// the PSD blocks; the moment-variable structure becomes linear equalities on
/// canonical moment-block entries.
RelaxationSdp to_sdp(const MomentRelaxation& rel);

/// SOS data of the dual: gamma (the order-k bound f_k), Gram matrices for the
/// SOS multipliers, polynomial coefficients for the ideal part, and the
/// coefficient-norm residual of the reconstructed identity
///   f - gamma - sum phi_i h_i - sigma_0 - sum sigma_j g_j.
struct SosCertificate {
  double gamma = 0;
  std::vector<Eigen::MatrixXd> gram;  // gram[0] = sigma_0, gram[1+j] = sigma_{g_j}
  std::vector<Polynomial<double>> ideal_multipliers;
  double identity_residual = 0;
  double min_gram_eig = 0;
};

SosCertificate sos_value_from_dual(const MomentRelaxation& rel, const RelaxationSdp& rsdp,
                                   const sdp::SDPSolution& sol);

/// sigma(x) = v(x)' Gram v(x) expanded over the generating basis.
Polynomial<double> gram_polynomial(const MonomialBasis& gens, const Eigen::Ref<const Eigen::MatrixXd>& gram);

}  // namespace momentcert
