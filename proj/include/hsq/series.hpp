#pragma once

#include <complex>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hsq/forms.hpp"
#include "hsq/multi_index.hpp"

namespace hsq {

inline constexpr int kDefaultCutoff = 8;

// Bivariate truncated power series sum c_{a,b} z^a zbar^b in n chart
// variables, all stored keys satisfying |a|+|b| <= cutoff. Ring arithmetic is
// exact through the cutoff; coefficients are doubles.
struct TruncatedSeries {
  int n = 1;
  int cutoff = kDefaultCutoff;
  std::map<std::pair<MultiIndex, MultiIndex>, Complex> coeffs;

  TruncatedSeries() = default;
  TruncatedSeries(int n_, int cutoff_) : n(n_), cutoff(cutoff_) {}
  static TruncatedSeries constant(int n, int cutoff, Complex c);

  Complex coeff(const MultiIndex& a, const MultiIndex& b) const;
  void set(const MultiIndex& a, const MultiIndex& b, Complex c);
  void add_to(const MultiIndex& a, const MultiIndex& b, Complex c);
  void prune(double eps = 0.0);

  Complex eval(const CVector& z) const;

  // Largest |coeff(a,b) - conj(coeff(b,a))|; 0 for series of real-valued functions.
  double reality_defect() const;
  // Largest off-quasi-diagonal coefficient magnitude (|a| != |b|).
  double quasi_diagonal_defect() const;

  // Debug dump, one term per line: "alpha beta re im", graded-lex sorted.
  std::string dump() const;
};

TruncatedSeries add(const TruncatedSeries& f, const TruncatedSeries& g);
TruncatedSeries sub(const TruncatedSeries& f, const TruncatedSeries& g);
TruncatedSeries scale(const TruncatedSeries& f, Complex c);
TruncatedSeries mul(const TruncatedSeries& f, const TruncatedSeries& g);
TruncatedSeries conj(const TruncatedSeries& f);
// 1/f; requires |f(0)| bounded away from zero.
TruncatedSeries reciprocal(const TruncatedSeries& f);
// log f; requires constant term 1.
TruncatedSeries log(const TruncatedSeries& f);
TruncatedSeries d_z(const TruncatedSeries& f, int i);
TruncatedSeries d_zbar(const TruncatedSeries& f, int j);

// Truncated holomorphic polynomial in the chart variables (used for the
// holomorphic coordinate changes and for section restrictions).
struct HoloPoly {
  int n = 1;
  int cutoff = kDefaultCutoff;
  std::map<MultiIndex, Complex> coeffs;

  HoloPoly() = default;
  HoloPoly(int n_, int cutoff_) : n(n_), cutoff(cutoff_) {}
  static HoloPoly constant(int n, int cutoff, Complex c);
  static HoloPoly variable(int n, int cutoff, int i);

  Complex coeff(const MultiIndex& a) const;
  void add_to(const MultiIndex& a, Complex c);
  Complex eval(const CVector& z) const;
  HoloPoly derivative(int i) const;
};

HoloPoly add(const HoloPoly& f, const HoloPoly& g);
HoloPoly scale(const HoloPoly& f, Complex c);
HoloPoly mul(const HoloPoly& f, const HoloPoly& g);
// f(g_1(z), ..., g_n(z)), truncated.
HoloPoly compose(const HoloPoly& f, const std::vector<HoloPoly>& g);
TruncatedSeries holo_series(const HoloPoly& f);

// A projective point together with a holomorphic chart centered on it.
// Coordinates z map to affine offsets u = frame*z + higher(z) in the chosen
// affine chart; `higher` (degree >= 2 terms, possibly empty) carries the
// Bochner corrections beyond the linear part.
struct ChartPoint {
  CVector base;                    // homogeneous representative, nonzero at `chart`
  int chart = 0;                   // index of the coordinate normalized to 1
  std::vector<CVector> frame;      // n x n invertible linear part
  std::vector<HoloPoly> higher;    // empty, or n holomorphic polys of degree >= 2

  int ambient() const { return int(base.size()); }
  int n() const { return ambient() - 1; }
};

// Centered affine chart with identity frame (largest |coordinate| normalized).
ChartPoint affine_chart(const CVector& base);

// Observed validity radius of the truncated chart: the radius where a
// higher-order correction term first matches the linear part in size
// (min over terms of (|F| / |h_k|)^{1/(k-1)}); infinity for purely linear charts.
double chart_validity_radius(const ChartPoint& x);

// Homogeneous coordinates of the point with chart coordinates z.
CVector chart_embed(const ChartPoint& x, const CVector& z);
// Inverse of chart_embed on the manifold: the chart coordinates of y.
// Throws std::domain_error when y is outside the chart.
CVector chart_coordinates(const ChartPoint& x, const CVector& y);

// Taylor series at z = 0 of y -> Psi_f(x, y(z)); constant term 1.
TruncatedSeries restrict_psi(const HermitianForm& f, const ChartPoint& x, int cutoff);

// Diastasis Phi = -log psi (psi with constant term 1).
TruncatedSeries diastasis(const TruncatedSeries& psi_R);

// Canonical chart at `base` for R: linear part normalizes the Hessian of the
// diastasis to the identity (Cholesky factor with positive diagonal fixes the
// unitary ambiguity), higher holomorphic terms kill every coefficient with
// |beta| <= 1 beyond the identity block, order by order up to the cutoff.
// Throws std::domain_error when the Hessian is not positive definite.
ChartPoint bochner_normalize(const HermitianForm& R, const CVector& base,
                             int cutoff = kDefaultCutoff);

struct MetricData {
  int n = 1;
  std::vector<TruncatedSeries> omega;  // row-major n x n, omega_{i jbar}
  TruncatedSeries det;                 // Omega(zhat) = det(omega)
  const TruncatedSeries& at(int i, int j) const { return omega[std::size_t(i * n + j)]; }
};

// omega_{i jbar} = d_{z_i} d_{zbar_j} Phi and its determinant, exact in the ring.
MetricData metric_series(const TruncatedSeries& phi);

struct Truncations {
  TruncatedSeries psi_R4;  // 1 - |z|^2 + (|a|=|b|=2 block)
  TruncatedSeries omega2;  // 1 + (|a|=|b|=1 block)
  TruncatedSeries psi_P2;  // 1 + (|a|=|b|=1 block)
};

// Low-order truncations in a Bochner-normalized chart. Validates the expansion
// templates; forbidden low-order terms above `template_tol` are an error.
Truncations truncations(const TruncatedSeries& psi_R, const TruncatedSeries& omega_det,
                        const TruncatedSeries& psi_P, double template_tol = 1e-12);

// Kernel approximant around x: (psi_R4(z))^m * psi_P2(z) * omega2(z) / Omega(z).
// The power is binary exponentiation on the evaluated value.
struct Approximant {
  Truncations data;
  TruncatedSeries omega_det;
  int m = 1;

  Complex eval(const CVector& z) const;
};

Approximant make_approximant(int m, const Truncations& data, const TruncatedSeries& omega_det);

}  // namespace hsq
