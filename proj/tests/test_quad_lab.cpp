#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "hsq/proj_operator.hpp"
#include "hsq/quad_lab.hpp"
#include "hsq/rng.hpp"

using namespace hsq;

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

HermitianForm perturbed_fs(Complex offdiag, double d0, double d1) {
  HermitianForm f(2, 1);
  f.at(0, 0) = 1.0 + d0;
  f.at(1, 1) = 1.0 + d1;
  f.at(0, 1) = offdiag;
  f.at(1, 0) = std::conj(offdiag);
  return f;
}

}  // namespace

TEST_CASE("gauss_legendre sanity") {
  const GaussLegendre g = gauss_legendre(8, 0.0, 1.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) acc += std::pow(g.nodes[i], 5) * g.weights[i];
  CHECK(acc == doctest::Approx(1.0 / 6.0).epsilon(1e-14));

  const GaussLegendre a = gauss_legendre(64, 0.0, 2.0 * kPi);
  Complex osc = 0.0;
  for (std::size_t i = 0; i < a.nodes.size(); ++i)
    osc += std::polar(1.0, 3.0 * a.nodes[i]) * a.weights[i];
  CHECK(std::abs(osc) < 1e-12);

  CHECK_THROWS_AS(gauss_legendre(0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("lemma52: paper values and the radial quadrature oracle") {
  // pi/2 cases and the C^2 unit-ball volume pi^2/2
  const ExactScalar a1 = lemma52(1, 0, 1, 1);
  CHECK(a1.q == mpq_class(1, 2));
  CHECK(a1.pi_pow == 1);
  const ExactScalar a2 = lemma52(1, 1, 1, 0);
  CHECK(a2.q == mpq_class(1, 2));
  CHECK(a2.pi_pow == 1);
  const ExactScalar a3 = lemma52(2, 0, 1, 0);
  CHECK(a3.q == mpq_class(1, 2));
  CHECK(a3.pi_pow == 2);

  for (int n : {1, 2, 3})
    for (int k : {0, 1, 2})
      for (int m : {0, 1, 5})
        for (mpq_class a : {mpq_class(1, 2), mpq_class(1), mpq_class(2)}) {
          const double exact = lemma52(n, k, a, m).to_double();
          const double quad = lemma52_quadrature(n, k, a.get_d(), m);
          CHECK(exact == doctest::Approx(quad).epsilon(1e-10));
        }

  CHECK_THROWS_AS(lemma52(0, 0, 1, 0), std::invalid_argument);
}

TEST_CASE("p1_nodes: positive weights summing to the FS volume") {
  QuadratureGrid grid;
  grid.chart_order = 32;
  const auto nodes = p1_nodes(fubini_study(2), grid);
  CHECK(nodes.size() == 2 * 32 * 32);
  double vol = 0.0;
  for (const auto& nd : nodes) {
    CHECK(nd.weight > 0.0);
    vol += nd.weight;
  }
  CHECK(vol == doctest::Approx(kPi).epsilon(1e-12));

  QuadratureGrid tiny;
  tiny.chart_order = 8;
  CHECK_THROWS_AS(p1_nodes(fubini_study(2), tiny), std::invalid_argument);
}

TEST_CASE("k_numeric: golden value, orthogonality, Hermitian symmetry") {
  const HermitianForm fs = fubini_study(2);
  const HermitianForm p1 = unit_form(2);
  QuadratureGrid grid;
  grid.chart_order = 32;

  // exact value K(z0, z0) = pi^2/4 for m = 1, P = 1 (from the exact operator module)
  const Section s0 = Section::monomial(2, 1, 0);
  const Section s1 = Section::monomial(2, 1, 1);
  const Complex k00 = k_numeric(fs, p1, 1, s0, s0, grid);
  CHECK(std::real(k00) == doctest::Approx(kPi * kPi / 4.0).epsilon(1e-10));
  CHECK(std::abs(std::imag(k00)) < 1e-12);

  // rotational orthogonality of distinct monomials
  CHECK(std::abs(k_numeric(fs, p1, 1, s0, s1, grid)) < 1e-10);

  // K(s,t) = conj(K(t,s)) for a perturbed positive P
  HermitianForm P = multiply(fubini_study(2), fubini_study(2));
  P.at(0, 2) += Complex(0.05, 0.02);
  P.at(2, 0) += Complex(0.05, -0.02);
  const Section t2 = Section::monomial(2, 3, 1);
  const Section s2 = Section::monomial(2, 3, 0);
  const Complex kst = k_numeric(fs, P, 1, s2, t2, grid);
  const Complex kts = k_numeric(fs, P, 1, t2, s2, grid);
  CHECK(std::abs(kst - std::conj(kts)) < 1e-10);

  // doubling the order changes nothing at the 1e-8 scale
  QuadratureGrid coarse;
  coarse.chart_order = 16;
  const auto conv = k_numeric_convergence(fs, p1, 1, s0, s0, coarse);
  CHECK(conv.converged);
  CHECK(conv.rel_change < 1e-8);
}

TEST_CASE("norm_sq_numeric matches the exact gram entry") {
  const HermitianForm fs = fubini_study(2);
  QuadratureGrid grid;
  grid.chart_order = 32;
  const Section s = Section::monomial(2, 3, 0);
  const double nsq = norm_sq_numeric(fs, unit_form(2), 3, s, grid);
  CHECK(nsq == doctest::Approx(kPi / 4.0).epsilon(1e-12));  // pi/(m+1), m = 3
}

TEST_CASE("exact-vs-numeric at the m = 20 end of the invariant range") {
  const HermitianForm fs = fubini_study(2);
  QuadratureGrid grid;
  grid.chart_order = 48;
  const Section s = Section::monomial(2, 20, 0);
  const Complex num = k_numeric(fs, unit_form(2), 20, s, s, grid);
  const double exact = kPi * kPi / (21.0 * 21.0);
  CHECK(std::abs(num - exact) / exact < 1e-8);
}

TEST_CASE("rho: chart radius and quasi-symmetry") {
  const HermitianForm fs = fubini_study(2);
  const ChartPoint at0 = bochner_normalize(fs, {1.0, 0.0}, 6);
  CHECK(rho(at0, {1.0, 0.0}) == doctest::Approx(0.0));
  for (double w : {0.1, 0.5, 1.5}) CHECK(rho(at0, {1.0, Complex(w, 0.0)}) == doctest::Approx(w).epsilon(1e-12));

  // Lemma 4.3 bound on sampled nearby pairs, FS and perturbed R
  for (const HermitianForm& R : {fs, perturbed_fs(Complex(0.1, 0.05), 0.15, -0.05)}) {
    Rng rng(31);
    int used = 0;
    bool asymmetric = false;
    for (int k = 0; k < 60 && used < 40; ++k) {
      const CVector x = sphere_point(2, rng);
      const ChartPoint cx = bochner_normalize(R, x, 6);
      CVector y = x;
      for (auto& c : y) c += Complex(0.08 * rng.next_gaussian(), 0.08 * rng.next_gaussian());
      double rxy;
      try {
        rxy = rho(cx, y);
      } catch (const std::domain_error&) {
        continue;
      }
      if (rxy > 0.3 || rxy < 1e-6) continue;
      const ChartPoint cy = bochner_normalize(R, y, 6);
      const double ryx = rho(cy, x);
      ++used;
      CHECK(ryx <= 2.0 * rxy);
      if (std::abs(ryx - rxy) > 1e-9 * rxy) asymmetric = true;
    }
    CHECK(used >= 30);
    (void)asymmetric;  // asymmetry is allowed, the bound is what matters
  }
}

TEST_CASE("decompose: closure against exact references") {
  const HermitianForm fs = fubini_study(2);
  const HermitianForm p1 = unit_form(2);
  QuadratureGrid grid;
  grid.chart_order = 32;
  const int m = 4;
  const Section s = Section::monomial(2, m, 0);
  const OperatorSetup setup{2, m, 0};
  const ExactMatrix K = operator_matrix(setup);
  const ExactMatrix G = gram_matrix(setup);
  const MonomialBasis bas(2, m);
  const std::size_t idx = bas.index_of(MultiIndex{m, 0});
  const auto rep = decompose(fs, p1, m, s, 0.4, grid,
                             std::make_pair(K.at(idx, idx).to_double(), G.at(idx, idx).to_double()));
  CHECK(rep.closure_defect < 1e-7 * (1.0 + rep.norm_sq));
  CHECK(std::abs(rep.I) < 0.05);  // the difference term is the small one at r = 0.4

  CHECK_THROWS_AS(decompose(fs, p1, 0, s, 0.4, grid), std::invalid_argument);
  CHECK_THROWS_AS(decompose(fs, p1, 4, s, -1.0, grid), std::invalid_argument);
}

TEST_CASE("decompose: growing radius moves mass from III into I + II") {
  const HermitianForm fs = fubini_study(2);
  const HermitianForm p1 = unit_form(2);
  QuadratureGrid grid;
  grid.chart_order = 32;
  const Section s = Section::monomial(2, 4, 0);
  const auto near = decompose(fs, p1, 4, s, 0.4, grid);
  const auto wide = decompose(fs, p1, 4, s, 0.7, grid);
  CHECK(std::abs(wide.III) < 0.5 * std::abs(near.III));
  CHECK(wide.closure_defect < 1e-12);

  // Beyond the observed validity radius of the chart series, Omega(zhat) <= 0
  // surfaces as the chart-radius error instead of a silently folded integral.
  CHECK_THROWS_AS(decompose(fs, p1, 4, s, 6.0, grid), std::domain_error);
}

TEST_CASE("radius_schedule: desk-scale infeasibility is reported, not papered over") {
  // n=1, m=2, r9=0.5: lower bound sqrt(2 log 2) ~ 1.18 exceeds the upper bound
  const auto s2 = radius_schedule(2, 1, 0.5);
  CHECK_FALSE(s2.feasible);
  CHECK(s2.lower == doctest::Approx(std::sqrt(4.0 * std::log(2.0) / 2.0)).epsilon(1e-12));

  const auto s4 = radius_schedule(1e4, 1, 0.5);
  CHECK_FALSE(s4.feasible);
  CHECK(s4.lower == doctest::Approx(0.060697).epsilon(1e-4));
  CHECK(s4.upper == doctest::Approx(0.0096549).epsilon(1e-4));
  CHECK(s4.m0 > 1e10);  // the schedule only opens up at astronomical m
  const auto at_m0 = radius_schedule(s4.m0, 1, 0.5);
  CHECK(at_m0.feasible);

  // a generous r9 makes even m = 2 feasible; r is the geometric mean
  const auto s_easy = radius_schedule(2, 1, 10.0);
  CHECK(s_easy.feasible);
  CHECK(s_easy.m0 == doctest::Approx(2.0));
  CHECK(s_easy.r == doctest::Approx(std::sqrt(s_easy.lower * s_easy.upper)));

  CHECK_THROWS_AS(radius_schedule(1, 1, 0.5), std::invalid_argument);
}

TEST_CASE("quasi-diagonal mean value (Lemma 5.1 shape)") {
  // q = 1 - |z|^2 on n = 1
  TruncatedSeries q(1, 4);
  q.set({0}, {0}, 1.0);
  q.set({1}, {1}, -1.0);

  const HoloPoly one = HoloPoly::constant(1, 4, 1.0);
  CHECK(quasi_diagonal_mean_value_test(one, q, 0.5) < 1e-14);

  const HoloPoly z = HoloPoly::variable(1, 4, 0);
  CHECK(quasi_diagonal_mean_value_test(z, q, 0.5) < 1e-10);

  // f = 3 + z^2 against the FS Psi_{R,<=4}
  HoloPoly f(1, 4);
  f.add_to({0}, 3.0);
  f.add_to({2}, 1.0);
  TruncatedSeries psi4(1, 4);
  psi4.set({0}, {0}, 1.0);
  psi4.set({1}, {1}, -1.0);
  psi4.set({2}, {2}, 1.0);
  CHECK(quasi_diagonal_mean_value_test(f, psi4, 0.4) < 1e-9);

  // n = 2
  TruncatedSeries q2(2, 4);
  q2.set({0, 0}, {0, 0}, 1.0);
  q2.set({1, 0}, {1, 0}, -1.0);
  q2.set({0, 1}, {0, 1}, -1.0);
  const HoloPoly z1 = HoloPoly::variable(2, 4, 0);
  CHECK(quasi_diagonal_mean_value_test(z1, q2, 0.5, 32) < 1e-9);

  // precondition: off-quasi-diagonal q is rejected
  TruncatedSeries bad = q;
  bad.set({2}, {0}, 1e-3);
  CHECK_THROWS_AS(quasi_diagonal_mean_value_test(one, bad, 0.5), std::invalid_argument);
}

TEST_CASE("ball monomial orthogonality by symmetric quadrature") {
  CHECK(std::abs(ball_monomial_quadrature({2}, {0}, 0.7)) < 1e-12);
  CHECK(std::abs(ball_monomial_quadrature({3}, {1}, 0.7)) < 1e-12);
  CHECK(std::abs(ball_monomial_quadrature({1, 0}, {0, 1}, 0.6, 24)) < 1e-12);
  CHECK(std::abs(ball_monomial_quadrature({2, 1}, {1, 1}, 0.6, 24)) < 1e-12);

  // diagonal value: integral of |z|^2 over B(r) in C is pi r^4 / 2
  const double r = 0.8;
  CHECK(std::real(ball_monomial_quadrature({1}, {1}, r)) ==
        doctest::Approx(kPi * r * r * r * r / 2.0).epsilon(1e-12));
}

TEST_CASE("off-diagonal bound (Lemma 6.1 shape)") {
  const HermitianForm fs = fubini_study(2);
  for (double r : {0.1, 0.3, 0.5}) {
    const auto rep = off_diagonal_bound_test(fs, r, 150, 42);
    CHECK(rep.samples_used > 0);
    CHECK(rep.holds);
    CHECK(rep.max_psi <= 1.0 - r * r / 2.0);
  }
  // r = 0: the bound is vacuous, everything passes
  const auto all = off_diagonal_bound_test(fs, 0.0, 50, 42);
  CHECK(all.holds);

  const auto pert = off_diagonal_bound_test(perturbed_fs(Complex(0.05, 0.02), 0.1, 0.0), 0.3, 100, 7);
  CHECK(pert.samples_used > 0);
  CHECK(pert.holds);
}

TEST_CASE("remainder scaling fits are finite; FS omega ratio approaches 2") {
  const HermitianForm fs = fubini_study(2);
  const std::vector<CVector> bases = {{1.0, 0.0}, {Complex(0.7, 0.2), Complex(0.4, -0.5)}};
  const auto fits = remainder_scaling_test(fs, unit_form(2), bases, 1e-3, 0.3);
  for (double c : {fits.psiR_deg5, fits.psiR_deg4, fits.psiP_deg3, fits.psiP_deg2,
                   fits.omega_deg3, fits.omega_deg2, fits.ball_k3, fits.ball_k5}) {
    CHECK(std::isfinite(c));
    CHECK(c < 1e3);
  }
  // |Omega - 1| / rho^2 -> 2 as rho -> 0 for FS (Omega = 1 - 2 rho^2 + ...);
  // the sup over rho <= 0.3 picks up a little chart-truncation excess at
  // generic base points.
  CHECK(fits.omega_deg2 > 1.9);
  CHECK(fits.omega_deg2 < 2.3);
  {
    const ChartPoint cp = bochner_normalize(fs, bases[1]);
    const CVector z = {Complex(1e-2, 0.0)};
    const double om = omega_density_exact(fs, cp, z);
    CHECK(std::abs(om - 1.0) / 1e-4 == doctest::Approx(2.0).epsilon(1e-3));
  }
  // P == 1 has no remainder at all
  CHECK(fits.psiP_deg3 < 1e-9);
  CHECK(fits.psiP_deg2 < 1e-9);
}
