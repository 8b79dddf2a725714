#include "hsq/sgcs.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "hsq/rng.hpp"
#include "hsq/series.hpp"

namespace hsq {

SgcsReport sgcs_sample_check(const HermitianForm& R, int num_samples, std::uint64_t seed) {
  Rng rng = Rng(seed).split("sgcs");
  SgcsReport rep;
  rep.max_psi = -std::numeric_limits<double>::infinity();

  for (int k = 0; k < num_samples; ++k) {
    const CVector x = sphere_point(R.N, rng);
    const CVector y = sphere_point(R.N, rng);
    // Skip pairs in the same projective class (Psi = 1 there by definition).
    Complex inner = 0.0;
    for (int i = 0; i < R.N; ++i) inner += x[std::size_t(i)] * std::conj(y[std::size_t(i)]);
    if (1.0 - std::norm(inner) < 1e-12) continue;
    ++rep.pairs_checked;
    const double psi = cauchy_schwarz(R, x, y);
    if (psi > rep.max_psi) {
      rep.max_psi = psi;
      rep.psi_witness_x = x;
      rep.psi_witness_y = y;
    }
    if (psi >= 1.0) rep.sgcs1_violated = true;
  }

  // Chart Hessians of the diastasis at a handful of base points.
  const int hessian_samples = std::max(4, std::min(32, num_samples / 256));
  rep.min_hessian_eig = std::numeric_limits<double>::infinity();
  rep.min_affine_hessian_eig = std::numeric_limits<double>::infinity();
  for (int k = 0; k < hessian_samples; ++k) {
    const CVector x = sphere_point(R.N, rng);
    const TruncatedSeries phi = diastasis(restrict_psi(R, affine_chart(x), 4));
    const int n = R.N - 1;
    Eigen::MatrixXcd H(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        MultiIndex a(std::size_t(n), 0), b(std::size_t(n), 0);
        a[std::size_t(i)] = 1;
        b[std::size_t(j)] = 1;
        H(i, j) = phi.coeff(a, b);
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
    const double mineig = es.eigenvalues().minCoeff();
    rep.min_affine_hessian_eig = std::min(rep.min_affine_hessian_eig, mineig);
    // In the Bochner-normalized chart the Hessian is the identity whenever it
    // is positive definite; keep the raw eigenvalue as the failure witness.
    const double normalized = mineig > 0.0 ? 1.0 : mineig;
    if (normalized < rep.min_hessian_eig) {
      rep.min_hessian_eig = normalized;
      rep.hessian_witness = x;
    }
  }
  return rep;
}

}  // namespace hsq
