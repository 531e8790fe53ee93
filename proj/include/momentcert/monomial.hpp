#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace momentcert {

/// Exponent vector of a power product x1^e1 * ... * xn^en.
///
/// The canonical term order everywhere in this project is graded reverse
/// lexicographic with x1 as the least variable, so monomials of equal total
/// degree compare by the first differing exponent (larger exponent on the
/// earlier variable sorts first). This makes the degree-d basis a prefix of
/// the degree-(d+1) basis, which moment-matrix indexing relies on.
struct Monomial {
  std::vector<int> exponents;

  Monomial() = default;
  explicit Monomial(std::vector<int> e) : exponents(std::move(e)) {}

  static Monomial unit(int nvars) { return Monomial(std::vector<int>(nvars, 0)); }

  static Monomial variable(int nvars, int i, int power = 1) {
    Monomial m = unit(nvars);
    m.exponents.at(static_cast<std::size_t>(i)) = power;
    return m;
  }

  int nvars() const { return static_cast<int>(exponents.size()); }

  int degree() const { return std::accumulate(exponents.begin(), exponents.end(), 0); }

  bool is_constant() const {
    for (int e : exponents)
      if (e != 0) return false;
    return true;
  }

  bool operator==(const Monomial& o) const = default;
};

inline Monomial operator*(const Monomial& a, const Monomial& b) {
  if (a.nvars() != b.nvars()) throw std::invalid_argument("monomial product: nvars mismatch");
  Monomial r = a;
  for (int i = 0; i < b.nvars(); ++i) r.exponents[static_cast<std::size_t>(i)] += b.exponents[static_cast<std::size_t>(i)];
  return r;
}

/// True if a divides b componentwise.
inline bool divides(const Monomial& a, const Monomial& b) {
  if (a.nvars() != b.nvars()) return false;
  for (int i = 0; i < a.nvars(); ++i)
    if (a.exponents[static_cast<std::size_t>(i)] > b.exponents[static_cast<std::size_t>(i)]) return false;
  return true;
}

inline Monomial quotient(const Monomial& b, const Monomial& a) {
  Monomial r = b;
  for (int i = 0; i < b.nvars(); ++i) {
    r.exponents[static_cast<std::size_t>(i)] -= a.exponents[static_cast<std::size_t>(i)];
    if (r.exponents[static_cast<std::size_t>(i)] < 0) throw std::invalid_argument("monomial quotient: not divisible");
  }
  return r;
}

inline bool grevlex_less(const Monomial& a, const Monomial& b) {
  const int da = a.degree(), db = b.degree();
  if (da != db) return da < db;
  for (std::size_t i = 0; i < a.exponents.size(); ++i) {
    if (a.exponents[i] != b.exponents[i]) return a.exponents[i] > b.exponents[i];
  }
  return false;
}

struct GrevlexLess {
  bool operator()(const Monomial& a, const Monomial& b) const { return grevlex_less(a, b); }
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const {
    std::size_t h = 0x9e3779b97f4a7c15ull ^ static_cast<std::size_t>(m.exponents.size());
    for (int e : m.exponents) {
      h ^= static_cast<std::size_t>(e) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

/// C(n+d, n): number of monomials in n variables of degree <= d.
inline long long monomial_count(int nvars, int degree) {
  if (degree < 0) return 0;
  long long r = 1;
  for (int i = 1; i <= nvars; ++i) r = r * (degree + i) / i;
  return r;
}

}  // namespace momentcert
