#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <Eigen/Core>

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "momentcert/monomial.hpp"

namespace momentcert {

/// Exact coefficient type for the rational pipeline (parsing, identities).
using Rational = boost::multiprecision::cpp_rational;

/// Degree sentinel for the zero polynomial, standing in for -infinity so that
/// deg(p*q) = deg p + deg q stays uniform.
inline constexpr int kZeroPolyDegree = std::numeric_limits<int>::min();

/// Sparse multivariate polynomial with coefficients in `Scalar` (Rational for
/// the exact pipeline, double for the numeric one). Terms are kept in a
/// grevlex-ordered map with no stored zeros.
template <typename Scalar>
class Polynomial {
 public:
  using TermMap = std::map<Monomial, Scalar, GrevlexLess>;

  Polynomial() : nvars_(0) {}
  explicit Polynomial(int nvars) : nvars_(nvars) {
    if (nvars < 0) throw std::invalid_argument("polynomial: negative nvars");
  }

  static Polynomial zero(int nvars) { return Polynomial(nvars); }

  static Polynomial constant(int nvars, Scalar c) {
    Polynomial p(nvars);
    p.add_term(Monomial::unit(nvars), std::move(c));
    return p;
  }

  static Polynomial variable(int nvars, int i) {
    Polynomial p(nvars);
    p.add_term(Monomial::variable(nvars, i), Scalar(1));
    return p;
  }

  static Polynomial monomial(int nvars, Monomial m, Scalar c = Scalar(1)) {
    Polynomial p(nvars);
    p.add_term(std::move(m), std::move(c));
    return p;
  }

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t num_terms() const { return terms_.size(); }
  const TermMap& terms() const { return terms_; }

  int degree() const {
    if (terms_.empty()) return kZeroPolyDegree;
    return terms_.rbegin()->first.degree();
  }

  Scalar coeff(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Scalar(0) : it->second;
  }

  void add_term(Monomial m, Scalar c) {
    if (m.nvars() != nvars_) throw std::invalid_argument("polynomial term: nvars mismatch");
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      if (c != Scalar(0)) terms_.emplace(std::move(m), std::move(c));
      return;
    }
    it->second += c;
    if (it->second == Scalar(0)) terms_.erase(it);
  }

  Polynomial& operator+=(const Polynomial& q) {
    check_same_vars(q);
    for (const auto& [m, c] : q.terms_) add_term(m, c);
    return *this;
  }

  Polynomial& operator-=(const Polynomial& q) {
    check_same_vars(q);
    for (const auto& [m, c] : q.terms_) add_term(m, Scalar(-c));
    return *this;
  }

  Polynomial& operator*=(const Scalar& s) {
    if (s == Scalar(0)) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator-(const Polynomial& a) {
    Polynomial r(a.nvars_);
    for (const auto& [m, c] : a.terms_) r.terms_.emplace(m, Scalar(-c));
    return r;
  }
  friend Polynomial operator*(Polynomial a, const Scalar& s) { return a *= s; }
  friend Polynomial operator*(const Scalar& s, Polynomial a) { return a *= s; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check_same_vars(b);
    Polynomial r(a.nvars_);
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, Scalar(ca * cb));
    return r;
  }

  bool operator==(const Polynomial& q) const { return nvars_ == q.nvars_ && terms_ == q.terms_; }

 private:
  void check_same_vars(const Polynomial& q) const {
    if (nvars_ != q.nvars_) throw std::invalid_argument("polynomial arithmetic: nvars mismatch");
  }

  int nvars_;
  TermMap terms_;
};

/// Ordered tuple of polynomials over a shared variable set; carrier for the
/// equality tuple h and the inequality tuple g.
template <typename Scalar>
struct PolyTuple {
  int nvars = 0;
  std::vector<Polynomial<Scalar>> entries;

  PolyTuple() = default;
  explicit PolyTuple(int n) : nvars(n) {}
  PolyTuple(int n, std::vector<Polynomial<Scalar>> e) : nvars(n), entries(std::move(e)) {
    for (const auto& p : entries)
      if (p.nvars() != nvars) throw std::invalid_argument("poly tuple: nvars mismatch");
  }

  std::size_t size() const { return entries.size(); }
  const Polynomial<Scalar>& operator[](std::size_t i) const { return entries.at(i); }

  void push_back(Polynomial<Scalar> p) {
    if (p.nvars() != nvars) throw std::invalid_argument("poly tuple: nvars mismatch");
    entries.push_back(std::move(p));
  }
};

template <typename Scalar>
Scalar int_pow(Scalar base, int e) {
  Scalar r(1);
  while (e > 0) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

template <typename Scalar>
Polynomial<Scalar> pow(const Polynomial<Scalar>& p, int e) {
  if (e < 0) throw std::invalid_argument("polynomial pow: negative exponent");
  Polynomial<Scalar> r = Polynomial<Scalar>::constant(p.nvars(), Scalar(1));
  Polynomial<Scalar> base = p;
  while (e > 0) {
    if (e & 1) r = r * base;
    if (e > 1) base = base * base;
    e >>= 1;
  }
  return r;
}

template <typename Scalar>
Scalar eval(const Polynomial<Scalar>& p, const std::vector<Scalar>& u) {
  if (static_cast<int>(u.size()) != p.nvars()) throw std::invalid_argument("eval: point dimension mismatch");
  Scalar acc(0);
  for (const auto& [m, c] : p.terms()) {
    Scalar t = c;
    for (int i = 0; i < p.nvars(); ++i) {
      const int e = m.exponents[static_cast<std::size_t>(i)];
      if (e != 0) t *= int_pow(u[static_cast<std::size_t>(i)], e);
    }
    acc += t;
  }
  return acc;
}

template <typename Scalar>
Polynomial<Scalar> differentiate(const Polynomial<Scalar>& p, int var) {
  Polynomial<Scalar> r(p.nvars());
  for (const auto& [m, c] : p.terms()) {
    const int e = m.exponents[static_cast<std::size_t>(var)];
    if (e == 0) continue;
    Monomial d = m;
    d.exponents[static_cast<std::size_t>(var)] = e - 1;
    r.add_term(std::move(d), Scalar(c * Scalar(e)));
  }
  return r;
}

template <typename Scalar>
PolyTuple<Scalar> gradient(const Polynomial<Scalar>& p) {
  PolyTuple<Scalar> g(p.nvars());
  for (int i = 0; i < p.nvars(); ++i) g.push_back(differentiate(p, i));
  return g;
}

template <typename Scalar>
std::vector<std::vector<Polynomial<Scalar>>> hessian(const Polynomial<Scalar>& p) {
  const int n = p.nvars();
  std::vector<std::vector<Polynomial<Scalar>>> h(static_cast<std::size_t>(n));
  PolyTuple<Scalar> g = gradient(p);
  for (int i = 0; i < n; ++i) {
    h[static_cast<std::size_t>(i)].reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) h[static_cast<std::size_t>(i)].push_back(differentiate(g[static_cast<std::size_t>(i)], j));
  }
  return h;
}

/// x0^{deg p} * p(x/x0) with the homogenizing variable prepended at index 0.
template <typename Scalar>
Polynomial<Scalar> homogenize(const Polynomial<Scalar>& p) {
  if (p.is_zero()) throw std::invalid_argument("homogenize: zero polynomial");
  const int d = p.degree();
  Polynomial<Scalar> r(p.nvars() + 1);
  for (const auto& [m, c] : p.terms()) {
    std::vector<int> e;
    e.reserve(static_cast<std::size_t>(p.nvars()) + 1);
    e.push_back(d - m.degree());
    e.insert(e.end(), m.exponents.begin(), m.exponents.end());
    r.add_term(Monomial(std::move(e)), c);
  }
  return r;
}

template <typename Scalar>
bool is_homogeneous(const Polynomial<Scalar>& p) {
  if (p.is_zero()) return true;
  const int d = p.degree();
  for (const auto& [m, c] : p.terms())
    if (m.degree() != d) return false;
  return true;
}

inline Polynomial<double> to_double(const Polynomial<Rational>& p) {
  Polynomial<double> r(p.nvars());
  for (const auto& [m, c] : p.terms()) r.add_term(m, static_cast<double>(c));
  return r;
}

inline Polynomial<Rational> to_rational(const Polynomial<double>& p) {
  Polynomial<Rational> r(p.nvars());
  for (const auto& [m, c] : p.terms()) r.add_term(m, Rational(c));
  return r;
}

/// L2 norm of the coefficient vector; the residual metric for SOS identities.
inline double coefficient_norm(const Polynomial<double>& p) {
  double s = 0;
  for (const auto& [m, c] : p.terms()) s += c * c;
  return std::sqrt(s);
}

// -- numeric evaluation at Eigen points ------------------------------------

inline double eval_at(const Polynomial<double>& p, const Eigen::Ref<const Eigen::VectorXd>& u) {
  if (u.size() != p.nvars()) throw std::invalid_argument("eval_at: point dimension mismatch");
  double acc = 0;
  for (const auto& [m, c] : p.terms()) {
    double t = c;
    for (int i = 0; i < p.nvars(); ++i) {
      const int e = m.exponents[static_cast<std::size_t>(i)];
      if (e != 0) t *= int_pow(u[i], e);
    }
    acc += t;
  }
  return acc;
}

inline Eigen::VectorXd gradient_at(const Polynomial<double>& p, const Eigen::Ref<const Eigen::VectorXd>& u) {
  Eigen::VectorXd g(p.nvars());
  for (int i = 0; i < p.nvars(); ++i) g[i] = eval_at(differentiate(p, i), u);
  return g;
}

inline Eigen::MatrixXd hessian_at(const Polynomial<double>& p, const Eigen::Ref<const Eigen::VectorXd>& u) {
  const int n = p.nvars();
  Eigen::MatrixXd h(n, n);
  for (int i = 0; i < n; ++i) {
    const Polynomial<double> di = differentiate(p, i);
    for (int j = i; j < n; ++j) {
      h(i, j) = eval_at(differentiate(di, j), u);
      h(j, i) = h(i, j);
    }
  }
  return h;
}

// -- printing ---------------------------------------------------------------

inline std::string coeff_to_string(const Rational& c) {
  std::ostringstream os;
  os << c;
  return os.str();
}

inline std::string coeff_to_string(double c) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", c);
  return buf;
}

/// Renders terms in descending grevlex order: "x1^2 - 1", "3*x1^2*x2 + 1/2".
template <typename Scalar>
std::string to_string(const Polynomial<Scalar>& p, const std::vector<std::string>& var_names) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const Monomial& m = it->first;
    Scalar c = it->second;
    const bool neg = c < Scalar(0);
    if (first) {
      if (neg) os << "-";
    } else {
      os << (neg ? " - " : " + ");
    }
    if (neg) c = -c;
    const bool unit_coeff = (c == Scalar(1));
    if (!unit_coeff || m.is_constant()) os << coeff_to_string(c);
    bool printed_factor = !unit_coeff || m.is_constant();
    for (int i = 0; i < p.nvars(); ++i) {
      const int e = m.exponents[static_cast<std::size_t>(i)];
      if (e == 0) continue;
      if (printed_factor) os << "*";
      os << var_names.at(static_cast<std::size_t>(i));
      if (e > 1) os << "^" << e;
      printed_factor = true;
    }
    first = false;
  }
  return os.str();
}

template <typename Scalar>
std::string to_string(const Polynomial<Scalar>& p) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(p.nvars()));
  for (int i = 0; i < p.nvars(); ++i) names.push_back("x" + std::to_string(i + 1));
  return to_string(p, names);
}

}  // namespace momentcert
