#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "hsq/multi_index.hpp"
#include "hsq/rational.hpp"
#include "hsq/rng.hpp"

namespace hsq {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

// Hermitian bihomogeneous form Q(x, ybar) = sum C_{alpha betabar} x^alpha ybar^beta
// of bidegree (d, d) on C^N, stored as a dense square matrix over MonomialBasis(N, d).
// Scalar is either Complex (quadrature pipeline) or QComplex (exact pipeline);
// conversion between the two is explicit (to_floating), never implicit.
template <class Scalar>
struct BasicHermitianForm {
  int N = 0;
  int d = 0;
  MonomialBasis bas;
  std::vector<Scalar> mat;  // row-major, dim = bas.size()

  BasicHermitianForm() = default;
  BasicHermitianForm(int N_, int d_)
      : N(N_), d(d_), bas(N_, d_), mat(bas.size() * bas.size(), Scalar(0)) {}

  std::size_t dim() const { return bas.size(); }
  Scalar& at(std::size_t i, std::size_t j) { return mat[i * dim() + j]; }
  const Scalar& at(std::size_t i, std::size_t j) const { return mat[i * dim() + j]; }
  Scalar& at(const MultiIndex& a, const MultiIndex& b) {
    return at(bas.index_of(a), bas.index_of(b));
  }
  const Scalar& at(const MultiIndex& a, const MultiIndex& b) const {
    return at(bas.index_of(a), bas.index_of(b));
  }
};

using HermitianForm = BasicHermitianForm<Complex>;
using ExactHermitianForm = BasicHermitianForm<QComplex>;

HermitianForm to_floating(const ExactHermitianForm& f);

// Homogeneous polynomial of degree k on C^N (a global section of O(k)).
struct Section {
  int N = 0;
  int k = 0;
  MonomialBasis bas;
  CVector coeffs;

  Section() = default;
  Section(int N_, int k_) : N(N_), k(k_), bas(N_, k_), coeffs(bas.size(), Complex(0)) {}

  // Monomial z_var^k.
  static Section monomial(int N_, int k_, int var);

  Complex eval(const CVector& z) const;
};

// --- core operations -------------------------------------------------------

// Max Hermitian defect |C - C^H| relative to max|C|; 0 for exact data.
double hermitian_defect(const HermitianForm& f);
bool is_hermitian(const ExactHermitianForm& f);

// The constant-1 form of bidegree (0,0).
HermitianForm unit_form(int N);
ExactHermitianForm unit_form_exact(int N);

// (sum |z_i|^2)^ell: diagonal matrix of multinomial coefficients.
ExactHermitianForm norm_power_exact(int ell, int N);
HermitianForm norm_power(int ell, int N);

// Fubini-Study form (identity matrix in degree 1) and its e-th power.
inline HermitianForm fubini_study(int N) { return norm_power(1, N); }
inline HermitianForm fs_power(int e, int N) { return norm_power(e, N); }

// Q(v, wbar) = sum C_{ab} v^a conj(w)^b.
Complex eval_form(const HermitianForm& f, const CVector& v, const CVector& w);

// Coefficient convolution; bidegree adds. Hermitian by construction.
HermitianForm multiply(const HermitianForm& f, const HermitianForm& g);
ExactHermitianForm multiply(const ExactHermitianForm& f, const ExactHermitianForm& g);

// Pullback under a linear change of variables z -> U z (coefficient matrix of
// (x, y) -> Q(Ux, conj(Uy))). Used by the unitary-invariance checks.
HermitianForm pullback(const HermitianForm& f, const std::vector<CVector>& U);

// Cauchy-Schwarz function Psi_f(x, y) = f(x,ybar) f(y,xbar) / (f(x,xbar) f(y,ybar)).
// Throws std::domain_error when a denominator factor is below 1e-300 in
// magnitude (evaluation adjacent to the zero set Z_f).
double cauchy_schwarz(const HermitianForm& f, const CVector& x, const CVector& y);

// Wirtinger derivative of z -> f(z, zbar) with respect to zbar_i, as a function value.
Complex d_zbar(const HermitianForm& f, const CVector& z, int i);

struct SymmetryReport {
  double max_defect = 0.0;  // max |f(v,wbar) - conj(f(w,vbar))| over the sample
  CVector witness_v, witness_w;
};

SymmetryReport hermitian_symmetry_check(const HermitianForm& f, int sample_pairs,
                                        std::uint64_t seed);

// --- JSON interface ---------------------------------------------------------
// {"N": int, "d": int, "entries": [{"alpha": [...], "beta": [...],
//   "re": number|"p/q", "im": number|"p/q"}, ...]}
// Entries below the diagonal may be omitted; Hermitian closure is completed
// and inconsistent duplicates are rejected.
HermitianForm form_from_json(const std::string& text);
HermitianForm load_form(const std::string& path);
std::string form_to_json(const HermitianForm& f);

}  // namespace hsq
