#pragma once

#include <gmpxx.h>

#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "hsq/rational.hpp"

namespace hsq {

// Exponent vector of a monomial z^alpha, length = ambient variable count.
using MultiIndex = std::vector<int>;

inline int degree(const MultiIndex& a) { return std::accumulate(a.begin(), a.end(), 0); }

// alpha! = prod alpha_i!
inline mpz_class multi_factorial(const MultiIndex& a) {
  mpz_class r = 1;
  for (int e : a) r *= factorial_z((unsigned long)e);
  return r;
}

// d! / alpha!  (number of orderings; the coefficient of z^alpha in (z_1+...+z_N)^d)
inline mpz_class multinomial(int d, const MultiIndex& a) {
  if (degree(a) != d) throw std::invalid_argument("multinomial: degree mismatch");
  return factorial_z((unsigned long)d) / multi_factorial(a);
}

inline mpz_class binomial_z(unsigned long n, unsigned long k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

// All multi-indices of total degree d in N variables, graded-lex order
// (first exponent decreasing, then recursively). Every matrix and vector in
// the library binds to this order.
struct MonomialBasis {
  int N = 0;
  int d = 0;
  std::vector<MultiIndex> indices;
  std::map<MultiIndex, std::size_t> position;

  MonomialBasis() = default;
  MonomialBasis(int N_, int d_) : N(N_), d(d_) {
    if (N < 1 || d < 0) throw std::invalid_argument("MonomialBasis: need N >= 1, d >= 0");
    MultiIndex cur(std::size_t(N), 0);
    emit(cur, 0, d);
    for (std::size_t i = 0; i < indices.size(); ++i) position[indices[i]] = i;
  }

  std::size_t size() const { return indices.size(); }

  std::size_t index_of(const MultiIndex& a) const {
    auto it = position.find(a);
    if (it == position.end()) throw std::out_of_range("MonomialBasis: index not in basis");
    return it->second;
  }

 private:
  void emit(MultiIndex& cur, int var, int rem) {
    if (var == N - 1) {
      cur[std::size_t(var)] = rem;
      indices.push_back(cur);
      return;
    }
    for (int e = rem; e >= 0; --e) {
      cur[std::size_t(var)] = e;
      emit(cur, var + 1, rem - e);
    }
    cur[std::size_t(var)] = 0;
  }
};

inline MonomialBasis basis(int N, int d) { return MonomialBasis(N, d); }

inline MultiIndex add_indices(const MultiIndex& a, const MultiIndex& b) {
  MultiIndex r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

}  // namespace hsq
