#pragma once

#include <string>
#include <vector>

#include "hsq/forms.hpp"
#include "hsq/rational.hpp"

namespace hsq {

// Exact integral of z^alpha zbar^beta / ||z||^{2d} over P^{N-1} against the
// Fubini-Study volume form (vol(P^{N-1}) = pi^n / n!, n = N-1). Zero unless
// alpha == beta; otherwise pi^n * alpha! / (d+n)!.
ExactScalar monomial_integral(const MultiIndex& alpha, const MultiIndex& beta, int d, int N);

// Exact-mode configuration: R = FS, P = FS^e, sections = MonomialBasis(N, m+e).
struct OperatorSetup {
  int N = 2;
  int m = 1;
  int e = 0;

  int section_degree() const { return m + e; }
  int n() const { return N - 1; }
};

struct ExactMatrix {
  std::size_t dim = 0;
  std::vector<ExactScalar> entries;  // row-major

  ExactScalar& at(std::size_t i, std::size_t j) { return entries[i * dim + j]; }
  const ExactScalar& at(std::size_t i, std::size_t j) const { return entries[i * dim + j]; }
};

// Gram matrix G_{ab} = (s^a, s^b) of the monomial sections under the L2 inner
// product induced by R^m P and the FS volume form. Diagonal with positive entries.
ExactMatrix gram_matrix(const OperatorSetup& setup);

// K_{ab} = K_{R^m P, Omega}(s^a, s^b); the double integral factors through the
// coefficient expansion of Q = R^m P into products of monomial integrals.
ExactMatrix operator_matrix(const OperatorSetup& setup);

// The coefficient matrix of Q = FS^{m+e} over the section basis.
ExactMatrix q_coefficients(const OperatorSetup& setup);

// Exactly verifies the orthonormal-basis identity K-hat = C-hat, in the
// denominator-cleared form K_{ab} = C_{ab} G_{aa} G_{bb} (no square roots).
// Returns the max |deviation| as a double: exactly 0 on success.
double orthonormal_identity_check(const OperatorSetup& setup);

struct SweepRow {
  int m = 0;
  double K_ss = 0.0;
  double norm_sq = 0.0;
  double err = 0.0;         // |K(s,s) - (pi^n/m^n) ||s||^2|
  double scaled_err = 0.0;  // m^{n+1} * err / ||s||^2
  ExactScalar K_exact, norm_exact;
};

// Exact asymptotic sweep with s = z_var^{m+e} per m.
std::vector<SweepRow> asymptotic_sweep(int N, int e, int section_var, int m_lo, int m_hi);

// CSV per the external interface: header m,K_ss,norm_sq,err,scaled_err,
// floating 17 significant digits; with_exact appends exact-value columns.
std::string sweep_to_csv(const std::vector<SweepRow>& rows, bool with_exact = false);

struct MaximalSosReport {
  std::size_t square_count = 0;
  std::size_t basis_dim = 0;
  double max_residual = 0.0;
  double min_khat = 0.0;  // min eigenvalue of the orthonormal-basis matrix
  bool positive_definite = false;
};

// Extracts sections from the operator-reconstructed coefficient matrix and
// verifies Q(x,xbar) = sum |t(x)|^2 at sampled points.
MaximalSosReport maximal_sos_check(const OperatorSetup& setup, int num_samples = 200,
                                   std::uint64_t seed = 42);

}  // namespace hsq
