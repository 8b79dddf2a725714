#include "hsq/proj_operator.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "hsq/certify.hpp"
#include "hsq/rng.hpp"

namespace hsq {

ExactScalar monomial_integral(const MultiIndex& alpha, const MultiIndex& beta, int d, int N) {
  if ((int)alpha.size() != N || (int)beta.size() != N)
    throw std::invalid_argument("monomial_integral: index length != N");
  if (degree(alpha) != d || degree(beta) != d)
    throw std::invalid_argument("monomial_integral: index degree != d");
  if (alpha != beta) return ExactScalar::zero();
  const int n = N - 1;
  mpq_class q(multi_factorial(alpha), factorial_z((unsigned long)(d + n)));
  q.canonicalize();
  return {q, n};
}

ExactMatrix gram_matrix(const OperatorSetup& setup) {
  const MonomialBasis bas(setup.N, setup.section_degree());
  ExactMatrix G;
  G.dim = bas.size();
  G.entries.assign(G.dim * G.dim, ExactScalar::zero());
  for (std::size_t a = 0; a < G.dim; ++a)
    for (std::size_t b = 0; b < G.dim; ++b)
      G.at(a, b) = monomial_integral(bas.indices[a], bas.indices[b], setup.section_degree(),
                                     setup.N);
  return G;
}

ExactMatrix q_coefficients(const OperatorSetup& setup) {
  const ExactHermitianForm q = norm_power_exact(setup.section_degree(), setup.N);
  ExactMatrix C;
  C.dim = q.dim();
  C.entries.assign(C.dim * C.dim, ExactScalar::zero());
  for (std::size_t a = 0; a < C.dim; ++a)
    for (std::size_t b = 0; b < C.dim; ++b)
      if (!q.at(a, b).is_zero()) C.at(a, b) = ExactScalar::rational(q.at(a, b).re);
  return C;
}

ExactMatrix operator_matrix(const OperatorSetup& setup) {
  // K(s^a, s^b) = sum_{g,h} C_{g h} * I(g, b) * I(a, h). The monomial integrals
  // vanish off the diagonal, so only (g, h) = (b, a) survives.
  const int d = setup.section_degree();
  const MonomialBasis bas(setup.N, d);
  const ExactMatrix C = q_coefficients(setup);
  ExactMatrix K;
  K.dim = bas.size();
  K.entries.assign(K.dim * K.dim, ExactScalar::zero());
  for (std::size_t a = 0; a < K.dim; ++a)
    for (std::size_t b = 0; b < K.dim; ++b) {
      const ExactScalar Ib = monomial_integral(bas.indices[b], bas.indices[b], d, setup.N);
      const ExactScalar Ia = monomial_integral(bas.indices[a], bas.indices[a], d, setup.N);
      K.at(a, b) = C.at(b, a) * Ib * Ia;
    }
  return K;
}

double orthonormal_identity_check(const OperatorSetup& setup) {
  const ExactMatrix K = operator_matrix(setup);
  const ExactMatrix G = gram_matrix(setup);
  const ExactMatrix C = q_coefficients(setup);
  double worst = 0.0;
  for (std::size_t a = 0; a < K.dim; ++a)
    for (std::size_t b = 0; b < K.dim; ++b) {
      const ExactScalar lhs = K.at(a, b);
      const ExactScalar rhs = C.at(a, b) * G.at(a, a) * G.at(b, b);
      const ExactScalar dev = lhs - rhs;
      if (!dev.is_zero()) worst = std::max(worst, std::abs(dev.to_double()));
    }
  return worst;
}

std::vector<SweepRow> asymptotic_sweep(int N, int e, int section_var, int m_lo, int m_hi) {
  if (m_lo > m_hi || m_lo < 1) throw std::invalid_argument("asymptotic_sweep: empty range");
  if (section_var < 0 || section_var >= N)
    throw std::invalid_argument("asymptotic_sweep: bad section variable");
  const int n = N - 1;
  std::vector<SweepRow> rows;
  for (int m = m_lo; m <= m_hi; ++m) {
    const OperatorSetup setup{N, m, e};
    const int d = setup.section_degree();
    MultiIndex alpha(std::size_t(N), 0);
    alpha[std::size_t(section_var)] = d;
    const MonomialBasis bas(N, d);
    const std::size_t idx = bas.index_of(alpha);
    const ExactMatrix K = operator_matrix(setup);
    const ExactMatrix G = gram_matrix(setup);
    const ExactScalar K_ss = K.at(idx, idx);
    const ExactScalar nsq = G.at(idx, idx);

    // pi^n / m^n * ||s||^2, same pi power as K_ss (2n).
    mpq_class mn(1);
    for (int i = 0; i < n; ++i) mn *= m;
    const ExactScalar dominant = ExactScalar(mpq_class(1) / mn, n) * nsq;
    ExactScalar err = K_ss - dominant;
    if (err.q < 0) err.q = -err.q;
    mpq_class mpow(1);
    for (int i = 0; i < n + 1; ++i) mpow *= m;
    const ExactScalar scaled = ExactScalar(mpow, 0) * (err / nsq);

    SweepRow row;
    row.m = m;
    row.K_exact = K_ss;
    row.norm_exact = nsq;
    row.K_ss = K_ss.to_double();
    row.norm_sq = nsq.to_double();
    row.err = err.to_double();
    row.scaled_err = scaled.to_double();
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows, bool with_exact) {
  std::ostringstream os;
  os << "m,K_ss,norm_sq,err,scaled_err";
  if (with_exact) os << ",K_ss_exact,norm_sq_exact";
  os << "\n";
  char buf[512];
  double c_hat = 0.0;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g", r.m, r.K_ss, r.norm_sq, r.err,
                  r.scaled_err);
    os << buf;
    if (with_exact) os << ',' << r.K_exact.str() << ',' << r.norm_exact.str();
    os << "\n";
    c_hat = std::max(c_hat, r.scaled_err);
  }
  std::snprintf(buf, sizeof buf, "# C_hat,%.17g\n", c_hat);
  os << buf;
  return os.str();
}

MaximalSosReport maximal_sos_check(const OperatorSetup& setup, int num_samples,
                                   std::uint64_t seed) {
  const ExactMatrix K = operator_matrix(setup);
  const ExactMatrix G = gram_matrix(setup);
  const int d = setup.section_degree();
  const MonomialBasis bas(setup.N, d);
  const std::size_t dim = bas.size();

  // Coefficient matrix of Q in the orthonormal basis: C-hat_{ab} = K_{ab} / sqrt(G_a G_b).
  HermitianForm chat(setup.N, d);
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t b = 0; b < dim; ++b)
      chat.at(a, b) = K.at(a, b).to_double() /
                      std::sqrt(G.at(a, a).to_double() * G.at(b, b).to_double());

  MaximalSosReport rep;
  rep.basis_dim = dim;
  const PsdResult psd = psd_check(chat);
  rep.min_khat = psd.min_eig;
  rep.positive_definite = psd.min_eig > 1e-9;
  if (!psd.is_psd) return rep;  // caller inspects min_khat (m below threshold)

  // Sections in the orthonormal basis; convert coefficients back to the
  // monomial basis by dividing out sqrt(G_a).
  std::vector<Section> squares = extract_squares(chat);
  for (auto& s : squares)
    for (std::size_t a = 0; a < dim; ++a) s.coeffs[a] /= std::sqrt(G.at(a, a).to_double());
  rep.square_count = squares.size();

  Rng rng = Rng(seed).split("maximal_sos");
  for (int k = 0; k < num_samples; ++k) {
    const CVector z = sphere_point(setup.N, rng);
    double sum = 0.0;
    for (const auto& s : squares) sum += std::norm(s.eval(z));
    // Q(z, zbar) = ||z||^{2d} = 1 on the sphere.
    rep.max_residual = std::max(rep.max_residual, std::abs(sum - 1.0));
  }
  return rep;
}

}  // namespace hsq
