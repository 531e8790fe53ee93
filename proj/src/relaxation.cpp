#include "momentcert/relaxation.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace momentcert {

namespace {

void enumerate_exponents(int nvars, int max_deg, std::vector<int>& cur, int pos, int used,
                         std::vector<Monomial>& out) {
  if (pos == nvars) {
    out.emplace_back(cur);
    return;
  }
  for (int e = 0; e <= max_deg - used; ++e) {
    cur[static_cast<std::size_t>(pos)] = e;
    enumerate_exponents(nvars, max_deg, cur, pos + 1, used + e, out);
  }
  cur[static_cast<std::size_t>(pos)] = 0;
}

int half_degree_up(int deg) { return (deg + 1) / 2; }

LinearForm sorted_form(std::map<int, double> acc) {
  LinearForm f;
  f.reserve(acc.size());
  for (const auto& [mono, coef] : acc)
    if (coef != 0.0) f.push_back({mono, coef});
  return f;
}

}  // namespace

MonomialBasis MonomialBasis::up_to_degree(int nvars, int degree) {
  MonomialBasis b;
  b.nvars = nvars;
  b.degree = degree;
  std::vector<int> cur(static_cast<std::size_t>(nvars), 0);
  enumerate_exponents(nvars, degree, cur, 0, 0, b.monomials);
  std::sort(b.monomials.begin(), b.monomials.end(), grevlex_less);
  b.index.reserve(b.monomials.size());
  for (int i = 0; i < b.size(); ++i) b.index.emplace(b.monomials[static_cast<std::size_t>(i)], i);
  return b;
}

const LinearForm& BlockSpec::entry(int i, int j) const {
  if (i > j) std::swap(i, j);
  const int n = order();
  // row-major upper triangle offset
  const std::size_t pos = static_cast<std::size_t>(i) * n - static_cast<std::size_t>(i) * (i - 1) / 2 +
                          static_cast<std::size_t>(j - i);
  return entries[pos];
}

int MomentRelaxation::min_order_for(const POPInstance& pop) {
  int k = std::max(1, pop.objective.is_zero() ? 1 : half_degree_up(pop.objective.degree()));
  for (const auto& h : pop.equalities.entries)
    if (!h.is_zero()) k = std::max(k, half_degree_up(h.degree()));
  for (const auto& g : pop.inequalities.entries)
    if (!g.is_zero()) k = std::max(k, half_degree_up(g.degree()));
  return k;
}

MomentRelaxation MomentRelaxation::build(const POPInstance& pop, int k) {
  pop.validate();
  const int kmin = min_order_for(pop);
  if (k < kmin)
    throw std::invalid_argument("relaxation order " + std::to_string(k) + " below minimum " + std::to_string(kmin));

  MomentRelaxation rel;
  rel.order = k;
  rel.nvars = pop.nvars();
  rel.pop = NumericPOP::from(pop);
  // Identically-zero constraints are vacuous; drop them before building blocks.
  std::erase_if(rel.pop.equalities, [](const Polynomial<double>& p) { return p.is_zero(); });
  std::erase_if(rel.pop.inequalities, [](const Polynomial<double>& p) { return p.is_zero(); });
  rel.basis2k = MonomialBasis::up_to_degree(rel.nvars, 2 * k);

  rel.d_K = 1;
  for (const auto& h : rel.pop.equalities) rel.d_K = std::max(rel.d_K, half_degree_up(h.degree()));
  for (const auto& g : rel.pop.inequalities) rel.d_K = std::max(rel.d_K, half_degree_up(g.degree()));

  auto make_block = [&](BlockSpec::Kind kind, int g_index, int gen_degree,
                        const Polynomial<double>* weight) {
    BlockSpec blk;
    blk.kind = kind;
    blk.g_index = g_index;
    blk.gens = MonomialBasis::up_to_degree(rel.nvars, gen_degree);
    const int n = blk.gens.size();
    blk.entries.reserve(static_cast<std::size_t>(n) * (n + 1) / 2);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        const Monomial prod = blk.gens.monomials[static_cast<std::size_t>(i)] *
                              blk.gens.monomials[static_cast<std::size_t>(j)];
        std::map<int, double> acc;
        if (weight == nullptr) {
          acc[rel.basis2k.find(prod)] += 1.0;
        } else {
          for (const auto& [m, c] : weight->terms()) acc[rel.basis2k.find(prod * m)] += c;
        }
        blk.entries.push_back(sorted_form(std::move(acc)));
      }
    }
    return blk;
  };

  rel.blocks.push_back(make_block(BlockSpec::Kind::Moment, -1, k, nullptr));
  for (int j = 0; j < static_cast<int>(rel.pop.inequalities.size()); ++j) {
    const auto& g = rel.pop.inequalities[static_cast<std::size_t>(j)];
    const int gen_degree = k - half_degree_up(g.degree());
    rel.blocks.push_back(make_block(BlockSpec::Kind::Localizing, j, gen_degree, &g));
  }

  for (int i = 0; i < static_cast<int>(rel.pop.equalities.size()); ++i) {
    const auto& h = rel.pop.equalities[static_cast<std::size_t>(i)];
    const MonomialBasis shifts = MonomialBasis::up_to_degree(rel.nvars, 2 * k - h.degree());
    for (const Monomial& alpha : shifts.monomials) {
      std::map<int, double> acc;
      for (const auto& [delta, c] : h.terms()) acc[rel.basis2k.find(alpha * delta)] += c;
      rel.ideal_rows.push_back({i, alpha, sorted_form(std::move(acc))});
    }
  }

  {
    std::map<int, double> acc;
    for (const auto& [m, c] : rel.pop.objective.terms()) acc[rel.basis2k.find(m)] += c;
    rel.objective_form = sorted_form(std::move(acc));
  }
  return rel;
}

namespace {

/// Scale-normalized key for deduplicating ideal rows that coincide as
/// polynomials (canonical monomial form).
std::string row_key(const sdp::Constraint& c) {
  double lead = 0;
  for (const sdp::Term& t : c) {
    if (t.value != 0.0) {
      lead = t.value;
      break;
    }
  }
  if (lead == 0.0) return "0";
  std::ostringstream os;
  for (const sdp::Term& t : c) {
    os << t.block << "," << t.row << "," << t.col << ":";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.15g", t.value / lead);
    os << buf << ";";
  }
  return os.str();
}

}  // namespace

RelaxationSdp to_sdp(const MomentRelaxation& rel) {
  RelaxationSdp out;
  sdp::SDPProblem& prob = out.problem;
  SdpMapping& map = out.map;

  const BlockSpec& mblk = rel.blocks.front();
  const int morder = mblk.order();

  for (const BlockSpec& blk : rel.blocks) prob.block_sizes.push_back(blk.order());

  // Canonical representative entry in the moment block for every y_alpha.
  map.canonical.assign(static_cast<std::size_t>(rel.basis2k.size()), {-1, -1});
  for (int i = 0; i < morder; ++i) {
    for (int j = i; j < morder; ++j) {
      const LinearForm& f = mblk.entry(i, j);
      const int mono = f.front().mono;
      if (map.canonical[static_cast<std::size_t>(mono)].first < 0)
        map.canonical[static_cast<std::size_t>(mono)] = {i, j};
    }
  }

  auto add_form = [&](sdp::Constraint& c, const LinearForm& form, double scale) {
    for (const LinearTerm& t : form) {
      const auto [ci, cj] = map.canonical[static_cast<std::size_t>(t.mono)];
      sdp::add_entry(c, 0, ci, cj, scale * t.coef);
    }
  };

  std::vector<double> bs;

  // y_0 = 1.
  {
    sdp::Constraint c;
    const auto [ci, cj] = map.canonical[0];
    sdp::add_entry(c, 0, ci, cj, 1.0);
    prob.constraints.push_back(std::move(c));
    bs.push_back(1.0);
    map.rows.push_back({SdpMapping::Kind::Normalization, -1, -1});
    map.norm_row = 0;
  }

  // Repeated-entry consistency inside the moment block.
  for (int i = 0; i < morder; ++i) {
    for (int j = i; j < morder; ++j) {
      const int mono = mblk.entry(i, j).front().mono;
      const auto [ci, cj] = map.canonical[static_cast<std::size_t>(mono)];
      if (ci == i && cj == j) continue;
      sdp::Constraint c;
      sdp::add_entry(c, 0, i, j, 1.0);
      sdp::add_entry(c, 0, ci, cj, -1.0);
      sdp::normalize(c);
      prob.constraints.push_back(std::move(c));
      bs.push_back(0.0);
      map.rows.push_back({SdpMapping::Kind::Consistency, -1, -1});
    }
  }

  // Localizing blocks: every entry ties to its linear form in the moments.
  for (int bidx = 1; bidx < static_cast<int>(rel.blocks.size()); ++bidx) {
    const BlockSpec& blk = rel.blocks[static_cast<std::size_t>(bidx)];
    for (int i = 0; i < blk.order(); ++i) {
      for (int j = i; j < blk.order(); ++j) {
        sdp::Constraint c;
        sdp::add_entry(c, bidx, i, j, 1.0);
        add_form(c, blk.entry(i, j), -1.0);
        sdp::normalize(c);
        prob.constraints.push_back(std::move(c));
        bs.push_back(0.0);
        map.rows.push_back({SdpMapping::Kind::LocalizingTie, -1, -1});
      }
    }
  }

  // Truncated-ideal rows L_y(x^alpha h_i) = 0, deduplicated by canonical form.
  {
    std::unordered_map<std::string, int> seen;
    for (const auto& row : rel.ideal_rows) {
      sdp::Constraint c;
      add_form(c, row.form, 1.0);
      sdp::normalize(c);
      const std::string key = row_key(c);
      if (seen.count(key)) {
        ++map.duplicates_removed;
        continue;
      }
      seen.emplace(key, static_cast<int>(prob.constraints.size()));
      prob.constraints.push_back(std::move(c));
      bs.push_back(0.0);
      map.rows.push_back({SdpMapping::Kind::Ideal, row.h_index, rel.basis2k.find(row.shift)});
    }
  }

  prob.b = Eigen::Map<Eigen::VectorXd>(bs.data(), static_cast<Eigen::Index>(bs.size()));

  // Objective: L_y(f) spread over canonical entries.
  {
    std::vector<Eigen::MatrixXd> cs;
    for (int n : prob.block_sizes) cs.push_back(Eigen::MatrixXd::Zero(n, n));
    for (const LinearTerm& t : rel.objective_form) {
      const auto [ci, cj] = map.canonical[static_cast<std::size_t>(t.mono)];
      if (ci == cj) {
        cs[0](ci, cj) += t.coef;
      } else {
        cs[0](ci, cj) += 0.5 * t.coef;
        cs[0](cj, ci) += 0.5 * t.coef;
      }
    }
    for (const auto& m : cs) prob.C.emplace_back(m);
  }

  prob.validate();
  return out;
}

Polynomial<double> gram_polynomial(const MonomialBasis& gens, const Eigen::Ref<const Eigen::MatrixXd>& gram) {
  Polynomial<double> p(gens.nvars);
  const int n = gens.size();
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double w = (i == j ? 1.0 : 2.0) * gram(i, j);
      if (w == 0.0) continue;
      p.add_term(gens.monomials[static_cast<std::size_t>(i)] * gens.monomials[static_cast<std::size_t>(j)], w);
    }
  }
  return p;
}

SosCertificate sos_value_from_dual(const MomentRelaxation& rel, const RelaxationSdp& rsdp,
                                   const sdp::SDPSolution& sol) {
  SosCertificate cert;
  cert.gamma = sol.y[rsdp.map.norm_row];
  cert.gram = sol.S;
  cert.min_gram_eig = sol.min_eig_S;

  const int m1 = static_cast<int>(rel.pop.equalities.size());
  cert.ideal_multipliers.assign(static_cast<std::size_t>(m1), Polynomial<double>(rel.nvars));
  for (int l = 0; l < static_cast<int>(rsdp.map.rows.size()); ++l) {
    const SdpMapping::Row& row = rsdp.map.rows[static_cast<std::size_t>(l)];
    if (row.kind != SdpMapping::Kind::Ideal) continue;
    const double lam = sol.y[l];
    if (lam == 0.0) continue;
    cert.ideal_multipliers[static_cast<std::size_t>(row.h_index)].add_term(
        rel.basis2k.monomials[static_cast<std::size_t>(row.shift_mono)], lam);
  }

  Polynomial<double> r = rel.pop.objective;
  r.add_term(Monomial::unit(rel.nvars), -cert.gamma);
  for (int i = 0; i < m1; ++i)
    r -= cert.ideal_multipliers[static_cast<std::size_t>(i)] * rel.pop.equalities[static_cast<std::size_t>(i)];
  for (std::size_t bidx = 0; bidx < rel.blocks.size(); ++bidx) {
    const BlockSpec& blk = rel.blocks[bidx];
    Polynomial<double> sigma = gram_polynomial(blk.gens, cert.gram[bidx]);
    if (blk.kind == BlockSpec::Kind::Localizing)
      sigma = sigma * rel.pop.inequalities[static_cast<std::size_t>(blk.g_index)];
    r -= sigma;
  }
  cert.identity_residual = coefficient_norm(r);
  return cert;
}

}  // namespace momentcert
