#include "hsq/certify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "hsq/rng.hpp"
#include "json.hpp"

namespace hsq {

namespace {

Eigen::MatrixXcd to_eigen(const HermitianForm& f) {
  const Eigen::Index n = Eigen::Index(f.dim());
  Eigen::MatrixXcd M(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) M(i, j) = f.at(std::size_t(i), std::size_t(j));
  return M;
}

double form_value(const HermitianForm& f, const CVector& z) {
  return std::real(eval_form(f, z, z));
}

CVector normalize(CVector z) {
  double nsq = 0.0;
  for (const auto& c : z) nsq += std::norm(c);
  const double inv = 1.0 / std::sqrt(nsq);
  for (auto& c : z) c *= inv;
  return z;
}

// One projected-gradient descent run on the sphere.
std::pair<double, CVector> refine(const HermitianForm& f, CVector z, int steps) {
  double val = form_value(f, z);
  for (int it = 0; it < steps; ++it) {
    // Wirtinger gradient g_i = df/dzbar_i; descent direction -g, projected tangentially.
    CVector g(z.size());
    double gnorm = 0.0;
    Complex radial = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) g[i] = d_zbar(f, z, int(i));
    for (std::size_t i = 0; i < z.size(); ++i) radial += g[i] * std::conj(z[i]);
    for (std::size_t i = 0; i < z.size(); ++i) {
      g[i] -= radial * z[i];
      gnorm += std::norm(g[i]);
    }
    if (gnorm < 1e-28) break;
    double step = 0.5 / (1.0 + std::sqrt(gnorm));
    bool moved = false;
    for (int bt = 0; bt < 30; ++bt) {
      CVector cand = z;
      for (std::size_t i = 0; i < z.size(); ++i) cand[i] -= step * g[i];
      cand = normalize(cand);
      const double cval = form_value(f, cand);
      if (cval < val - 0.25 * step * gnorm) {
        z = cand;
        val = cval;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return {val, z};
}

}  // namespace

SphereMin sphere_min(const HermitianForm& f, int grid_density, int refinement_steps,
                     std::uint64_t seed) {
  Rng rng = Rng(seed).split("sphere_min");
  const int samples = grid_density * f.N;
  // Keep the best few starts; the refinement handles the local structure.
  constexpr int kStarts = 8;
  std::vector<std::pair<double, CVector>> best;
  for (int k = 0; k < samples; ++k) {
    CVector z = sphere_point(f.N, rng);
    const double v = form_value(f, z);
    if ((int)best.size() < kStarts) {
      best.emplace_back(v, z);
      std::sort(best.begin(), best.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
    } else if (v < best.back().first) {
      best.back() = {v, z};
      std::sort(best.begin(), best.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
    }
  }
  SphereMin out;
  out.value = std::numeric_limits<double>::infinity();
  for (auto& [v, z] : best) {
    auto [rv, rz] = refine(f, z, refinement_steps);
    if (rv < out.value) {
      out.value = rv;
      out.witness = rz;
    }
  }
  return out;
}

PsdResult psd_check(const HermitianForm& f, double tol) {
  const Eigen::MatrixXcd M = to_eigen(f);
  if (!M.allFinite()) throw std::runtime_error("psd_check: non-finite matrix entry");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("psd_check: eigensolve failed");
  const double min_eig = es.eigenvalues().minCoeff();
  const double scale = std::max({1.0, std::abs(es.eigenvalues().minCoeff()),
                                 std::abs(es.eigenvalues().maxCoeff())});
  return {min_eig >= -tol * scale, min_eig};
}

std::vector<Section> extract_squares(const HermitianForm& f_psd, double rank_tol) {
  const auto psd = psd_check(f_psd);
  if (!psd.is_psd)
    throw std::domain_error("extract_squares: matrix not PSD (min eig " +
                            std::to_string(psd.min_eig) + ")");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(f_psd));
  const auto& ev = es.eigenvalues();
  const double lmax = ev.maxCoeff();
  std::vector<Section> squares;
  // Largest eigenvalue first.
  for (Eigen::Index j = ev.size() - 1; j >= 0; --j) {
    if (ev(j) <= rank_tol * std::max(lmax, 0.0)) continue;
    Section s(f_psd.N, f_psd.d);
    const double w = std::sqrt(ev(j));
    for (std::size_t i = 0; i < f_psd.dim(); ++i) s.coeffs[i] = w * es.eigenvectors()(Eigen::Index(i), j);
    squares.push_back(std::move(s));
  }
  return squares;
}

double verify_certificate(const HermitianForm& f, const Certificate& cert, int num_samples,
                          std::uint64_t seed) {
  Rng rng = Rng(seed).split("verify_certificate");
  double worst = 0.0;
  for (int k = 0; k < num_samples; ++k) {
    // Radii around 1 keep values O(1) while making the ||z||^{2 ell} factor
    // sensitive to a mismatched ell (it is invisible on the unit sphere).
    const double radius = 0.75 + 0.5 * rng.next_double();
    CVector z = sphere_point(f.N, rng);
    for (auto& c : z) c *= radius;
    double sum = 0.0;
    for (const auto& g : cert.squares) sum += std::norm(g.eval(z));
    const double norm_factor = std::pow(radius * radius, cert.ell);
    worst = std::max(worst, std::abs(norm_factor * form_value(f, z) - sum));
  }
  return worst;
}

MinimalPowerResult minimal_power(const HermitianForm& f, int ell_max, double psd_tol,
                                 std::uint64_t seed) {
  const SphereMin sm = sphere_min(f, 10000, 50, seed);
  if (sm.value <= 0.0)
    throw HypothesisViolation("minimal_power: f is not positive on the sphere (min " +
                                  std::to_string(sm.value) + ")",
                              sm.witness, sm.value);
  MinimalPowerResult out;
  out.ell_max = ell_max;
  HermitianForm prod = f;
  for (int ell = 0; ell <= ell_max; ++ell) {
    if (ell > 0) prod = multiply(norm_power(1, f.N), prod);
    const PsdResult psd = psd_check(prod, psd_tol);
    out.min_eig_trajectory.push_back(psd.min_eig);
    if (!psd.is_psd) continue;
    Certificate cert;
    cert.ell = ell;
    cert.min_eig = psd.min_eig;
    cert.squares = extract_squares(prod);
    cert.residual = verify_certificate(f, cert, 200, seed);
    out.certificate = std::move(cert);
    break;
  }
  return out;
}

std::string certificate_to_json(const Certificate& cert) {
  nlohmann::json squares = nlohmann::json::array();
  for (const auto& s : cert.squares) {
    nlohmann::json coeffs = nlohmann::json::array();
    for (const auto& c : s.coeffs) coeffs.push_back({c.real(), c.imag()});
    squares.push_back({{"k", s.k}, {"coeffs", coeffs}});
  }
  nlohmann::json j = {{"ell", cert.ell},
                      {"min_eig", cert.min_eig},
                      {"squares", squares},
                      {"residual", cert.residual}};
  return j.dump(2);
}

Certificate certificate_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  Certificate cert;
  cert.ell = j.at("ell").get<int>();
  cert.min_eig = j.at("min_eig").get<double>();
  cert.residual = j.at("residual").get<double>();
  for (const auto& js : j.at("squares")) {
    const int k = js.at("k").get<int>();
    const auto& coeffs = js.at("coeffs");
    // Infer N from the coefficient count: dim = binom(k + N - 1, N - 1).
    int N = 1;
    while (MonomialBasis(N, k).size() < coeffs.size() && N < 16) ++N;
    Section s(N, k);
    if (s.bas.size() != coeffs.size())
      throw std::invalid_argument("certificate JSON: coefficient count matches no basis");
    for (std::size_t i = 0; i < s.coeffs.size(); ++i)
      s.coeffs[i] = {coeffs[i][0].get<double>(), coeffs[i][1].get<double>()};
    cert.squares.push_back(std::move(s));
  }
  return cert;
}

}  // namespace hsq
