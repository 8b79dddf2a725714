#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "hsq/forms.hpp"
#include "hsq/rational.hpp"
#include "hsq/series.hpp"

namespace hsq {

struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule on [a, b] (Newton iteration on the Legendre recurrence).
GaussLegendre gauss_legendre(int order, double a, double b);

// Numerically stable fixed-tree-order reduction; results do not depend on
// accumulation chunking.
Complex pairwise_sum(std::vector<Complex>& terms);

// Tensor Gauss-Legendre in polar coordinates per affine chart of P^1,
// chart handoff at |w| = split_radius.
struct QuadratureGrid {
  int chart_order = 96;      // node count per radial/angular direction, >= 16
  double split_radius = 1.0;
};

struct P1Node {
  CVector y;       // homogeneous representative
  double weight;   // includes the volume density induced by R and the polar jacobian
};

// Quadrature nodes covering P^1 (both charts) with the volume form of R.
std::vector<P1Node> p1_nodes(const HermitianForm& R, const QuadratureGrid& grid);

// Double chart quadrature of K_{R^m P, Omega}(s, t) over P^1 x P^1.
Complex k_numeric(const HermitianForm& R, const HermitianForm& P, int m, const Section& s,
                  const Section& t, const QuadratureGrid& grid);

// L2 norm ||s||^2 under R^m P and the R-induced volume form.
double norm_sq_numeric(const HermitianForm& R, const HermitianForm& P, int m, const Section& s,
                       const QuadratureGrid& grid);

struct ConvergenceCheck {
  Complex value;          // at grid.chart_order
  Complex refined;        // at 2 * grid.chart_order
  double rel_change;
  bool converged;
};

ConvergenceCheck k_numeric_convergence(const HermitianForm& R, const HermitianForm& P, int m,
                                       const Section& s, const Section& t,
                                       const QuadratureGrid& grid, double tol = 1e-8);

// rho(x, y) = |z(y)|, the Bochner-coordinate radius of y relative to x.
double rho(const ChartPoint& x, const CVector& y);

// Exact volume density Omega(zhat)(z) in the chart coordinates of x (affine
// density times the squared holomorphic jacobian of the coordinate change).
double omega_density_exact(const HermitianForm& R, const ChartPoint& x, const CVector& z);

struct DecompositionReport {
  int m = 0;
  double r = 0.0;
  Complex I, II, III;
  Complex K_ss;
  double norm_sq = 0.0;
  double closure_defect = 0.0;
};

// Near/far decomposition (tubular neighborhood of radius r around the diagonal):
// I integrates the kernel-minus-approximant difference over W(r), II the
// approximant against pi^n/m^n * ||s||^2, III the raw kernel over the
// complement (computed as the full integral minus the W(r) part; both are
// smooth-domain quadratures). The per-point series run at cutoff 6: the
// approximant only involves the degree <= 4 truncations plus the exact
// density. When exact reference values for K(s,s) and ||s||^2 are supplied,
// K_ss/norm_sq and the closure defect are reported against them.
DecompositionReport decompose(const HermitianForm& R, const HermitianForm& P, int m,
                              const Section& s, double r, const QuadratureGrid& grid,
                              std::optional<std::pair<double, double>> exact_refs = {});

struct RadiusSchedule {
  bool feasible = false;
  double r = 0.0;      // geometric mean of the bounds when feasible
  double lower = 0.0;  // sqrt(2(n+1) log m / m)
  double upper = 0.0;  // r9_hat / m^{(n+2)/(2n+5)}
  double m0 = 0.0;     // minimal feasible m for this r9_hat (approximate for huge values)
};

RadiusSchedule radius_schedule(double m, int n, double r9_hat);

// Closed-form ball integral: integral over B(1/sqrt(a)) of |z|^{2k} (1-a|z|^2)^m dV
// = pi^n (n+k-1)! m! / ((n-1)! (m+k+n)! a^{n+k}).
ExactScalar lemma52(int n, int k, const mpq_class& a, int m);
// Independent radial-quadrature oracle for the same integral.
double lemma52_quadrature(int n, int k, double a, int m, int order = 200);

// |integral_{B(r)} f q dV - f(0) integral_{B(r)} q dV| by quadrature; q must be
// quasi-diagonal (off-diagonal coefficients above 1e-12 are a precondition error).
double quasi_diagonal_mean_value_test(const HoloPoly& f, const TruncatedSeries& q, double r,
                                      int order = 64);

// integral_{B(r)} z^a zbar^b dV by symmetric polar quadrature (n = 1 or 2).
Complex ball_monomial_quadrature(const MultiIndex& a, const MultiIndex& b, double r,
                                 int order = 64);

struct OffDiagonalReport {
  double max_psi = 0.0;
  double bound = 1.0;  // 1 - r^2/2
  bool holds = true;
  CVector witness_x, witness_y;
  int samples_used = 0;
};

// Samples pairs with rho(x, y) >= r (or y outside x's chart) and compares the
// observed max Psi_R against 1 - r^2/2.
OffDiagonalReport off_diagonal_bound_test(const HermitianForm& R, double r, int num_samples,
                                          std::uint64_t seed = 42);

struct RemainderFits {
  double psiR_deg5 = 0.0;   // sup |Psi_R - Psi_{R,<=4}| / rho^5
  double psiR_deg4 = 0.0;   // sup |Psi_R - (1 - rho^2)| / rho^4
  double psiP_deg3 = 0.0;   // sup |Psi_P - Psi_{P,<=2}| / rho^3
  double psiP_deg2 = 0.0;   // sup |Psi_P - 1| / rho^2
  double omega_deg3 = 0.0;  // sup |Omega(zhat) - Omega_{<=2}| / rho^3
  double omega_deg2 = 0.0;  // sup |Omega(zhat) - 1| / rho^2
  double ball_k3 = 0.0;     // sup over r of integral_{B(x,r)} rho^3 Omega / r^{2n+3}
  double ball_k5 = 0.0;     // same with rho^5
};

// Empirical sup of each remainder ratio over sampled radii/directions around
// the given base points (P^1 data).
RemainderFits remainder_scaling_test(const HermitianForm& R, const HermitianForm& P,
                                     const std::vector<CVector>& bases, double rho_lo,
                                     double rho_hi, int n_radii = 24, int n_dirs = 8,
                                     int cutoff = kDefaultCutoff);

}  // namespace hsq
