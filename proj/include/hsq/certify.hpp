#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hsq/forms.hpp"

namespace hsq {

// Raised when an operation's positivity hypothesis fails; carries the witness.
struct HypothesisViolation : std::runtime_error {
  CVector witness;
  double value;
  HypothesisViolation(const std::string& msg, CVector w, double v)
      : std::runtime_error(msg), witness(std::move(w)), value(v) {}
};

struct SphereMin {
  double value = 0.0;
  CVector witness;
};

// Minimum of f(z, zbar) over the unit sphere: multi-start sampling followed by
// projected-gradient refinement with backtracking line search. Deterministic
// given the seed. Reports negative values rather than erroring.
SphereMin sphere_min(const HermitianForm& f, int grid_density = 10000,
                     int refinement_steps = 50, std::uint64_t seed = 42);

struct PsdResult {
  bool is_psd = false;
  double min_eig = 0.0;
};

// Smallest eigenvalue of the coefficient matrix; PSD iff
// min_eig >= -tol * max(1, spectral norm).
PsdResult psd_check(const HermitianForm& f, double tol = 1e-9);

// Eigendecomposition C = sum lambda_j u_j u_j^H over lambda_j > rank_tol * lambda_max;
// square j is sqrt(lambda_j) * (polynomial with coefficient vector u_j).
std::vector<Section> extract_squares(const HermitianForm& f_psd, double rank_tol = 1e-9);

struct Certificate {
  int ell = 0;
  double min_eig = 0.0;
  std::vector<Section> squares;
  double residual = 0.0;
};

// Max over sampled sphere points of | ||z||^{2 ell} f(z,zbar) - sum |g_j(z)|^2 |.
double verify_certificate(const HermitianForm& f, const Certificate& cert,
                          int num_samples = 200, std::uint64_t seed = 42);

struct MinimalPowerResult {
  std::optional<Certificate> certificate;          // empty: not found up to ell_max
  std::vector<double> min_eig_trajectory;          // min eigenvalue per ell tried
  int ell_max = 0;
};

// Smallest ell <= ell_max with norm_power(ell) * f positive semi-definite.
// Refuses non-positive f (sphere_min <= 0) with a HypothesisViolation.
MinimalPowerResult minimal_power(const HermitianForm& f, int ell_max = 64,
                                 double psd_tol = 1e-9, std::uint64_t seed = 42);

std::string certificate_to_json(const Certificate& cert);
Certificate certificate_from_json(const std::string& text);

}  // namespace hsq
