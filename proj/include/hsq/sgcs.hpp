#pragma once

#include "hsq/forms.hpp"

namespace hsq {

struct SgcsReport {
  // SGCS-1 evidence: max Psi_R over sampled pairs with distinct projective classes.
  double max_psi = 0.0;
  CVector psi_witness_x, psi_witness_y;
  bool sgcs1_violated = false;  // Psi >= 1 observed at distinct classes
  // SGCS-2 evidence: min eigenvalue of the diastasis Hessian at the center of
  // the (Bochner-normalized) chart: exactly 1 wherever normalization succeeds,
  // the raw negative eigenvalue where it fails.
  double min_hessian_eig = 0.0;
  // Raw affine-chart Hessian minimum (scale-dependent, sign-meaningful).
  double min_affine_hessian_eig = 0.0;
  CVector hessian_witness;
  int pairs_checked = 0;
};

// Sampling falsification check of the strong global Cauchy-Schwarz condition.
// Sampling gives falsification power, not proof.
SgcsReport sgcs_sample_check(const HermitianForm& R, int num_samples = 10000,
                             std::uint64_t seed = 42);

}  // namespace hsq
