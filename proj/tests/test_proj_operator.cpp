#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "hsq/proj_operator.hpp"
#include "hsq/quad_lab.hpp"

using namespace hsq;

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// Independent quadrature oracle on P^1: integral of z^a zbar^a / ||z||^{2d}
// against the FS volume, written directly from the chart formulas
// (density (1+|w|^2)^{-2}, two charts split at |w| = 1).
double p1_monomial_quadrature(const MultiIndex& a, int d, int order = 128) {
  const GaussLegendre rad = gauss_legendre(order, 0.0, 1.0);
  const GaussLegendre ang = gauss_legendre(order, 0.0, 2.0 * kPi);
  double total = 0.0;
  for (int chart = 0; chart < 2; ++chart)
    for (std::size_t ir = 0; ir < rad.nodes.size(); ++ir)
      for (std::size_t ia = 0; ia < ang.nodes.size(); ++ia) {
        const double r = rad.nodes[ir];
        const Complex w = std::polar(r, ang.nodes[ia]);
        const CVector z = (chart == 0) ? CVector{1.0, w} : CVector{w, 1.0};
        const double nsq = std::norm(z[0]) + std::norm(z[1]);
        const double mono =
            std::pow(std::abs(z[0]), 2 * a[0]) * std::pow(std::abs(z[1]), 2 * a[1]);
        const double dens = 1.0 / ((1.0 + r * r) * (1.0 + r * r));
        total += mono / std::pow(nsq, d) * dens * r * rad.weights[ir] * ang.weights[ia];
      }
  return total;
}

}  // namespace

TEST_CASE("monomial_integral: closed form against the quadrature oracle") {
  // orthogonality is exact by construction
  CHECK(monomial_integral({1, 0}, {0, 1}, 1, 2).is_zero());
  CHECK(monomial_integral({2, 1}, {1, 2}, 3, 2).is_zero());

  // volume of P^1 is pi
  const ExactScalar vol = monomial_integral({0, 0}, {0, 0}, 0, 2);
  CHECK(vol.q == mpq_class(1));
  CHECK(vol.pi_pow == 1);
  CHECK(vol.to_double() == doctest::Approx(p1_monomial_quadrature({0, 0}, 0)).epsilon(1e-10));

  // degree-1 diagonal entries are pi/2 (symmetry halves the volume)
  const ExactScalar half = monomial_integral({1, 0}, {1, 0}, 1, 2);
  CHECK(half.q == mpq_class(1, 2));
  CHECK(half.pi_pow == 1);

  // a spread of diagonal cases against quadrature
  for (int d = 1; d <= 3; ++d)
    for (int a0 = 0; a0 <= d; ++a0) {
      const MultiIndex a = {a0, d - a0};
      const double exact = monomial_integral(a, a, d, 2).to_double();
      const double quad = p1_monomial_quadrature(a, d);
      CHECK(exact == doctest::Approx(quad).epsilon(1e-10));
    }

  // volume of P^2 is pi^2/2
  const ExactScalar vol2 = monomial_integral({0, 0, 0}, {0, 0, 0}, 0, 3);
  CHECK(vol2.q == mpq_class(1, 2));
  CHECK(vol2.pi_pow == 2);

  CHECK_THROWS_AS(monomial_integral({1, 0}, {1, 0}, 2, 2), std::invalid_argument);
}

TEST_CASE("gram_matrix goldens") {
  // N=2, m=1, P=1: diag(pi/2, pi/2)
  const ExactMatrix G = gram_matrix({2, 1, 0});
  REQUIRE(G.dim == 2);
  CHECK(G.at(0, 0).q == mpq_class(1, 2));
  CHECK(G.at(0, 0).pi_pow == 1);
  CHECK(G.at(1, 1).q == mpq_class(1, 2));
  CHECK(G.at(0, 1).is_zero());

  // N=2, m=0, P=1: the volume pi
  const ExactMatrix G0 = gram_matrix({2, 0, 0});
  REQUIRE(G0.dim == 1);
  CHECK(G0.at(0, 0).q == mpq_class(1));
  CHECK(G0.at(0, 0).pi_pow == 1);

  // positive diagonal, Hermitian (diagonal and real here), for a spread of setups
  for (int N : {2, 3})
    for (int m : {1, 2, 4}) {
      const ExactMatrix g = gram_matrix({N, m, 1});
      for (std::size_t i = 0; i < g.dim; ++i) {
        CHECK(g.at(i, i).q > 0);
        CHECK(g.at(i, i).pi_pow == N - 1);
      }
    }
}

TEST_CASE("operator_matrix: m=0 boundary and PSD diagonal") {
  const ExactMatrix K0 = operator_matrix({2, 0, 0});
  REQUIRE(K0.dim == 1);
  CHECK(K0.at(0, 0).q == mpq_class(1));
  CHECK(K0.at(0, 0).pi_pow == 2);  // K = pi^2, G = pi

  for (int m : {1, 2, 5}) {
    const ExactMatrix K = operator_matrix({2, m, 0});
    for (std::size_t i = 0; i < K.dim; ++i) {
      CHECK(K.at(i, i).q > 0);  // Hermitian PSD: positive diagonal, zero elsewhere
      for (std::size_t j = 0; j < K.dim; ++j)
        if (i != j) CHECK(K.at(i, j).is_zero());
    }
  }
}

TEST_CASE("orthonormal identity holds exactly") {
  for (int N : {2, 3})
    for (int m : {1, 2, 3})
      for (int e : {0, 1}) CHECK(orthonormal_identity_check({N, m, e}) == 0.0);
}

TEST_CASE("trace identity over the orthonormal basis") {
  for (int N : {2, 3})
    for (int m : {1, 3}) {
      const OperatorSetup setup{N, m, 0};
      const ExactMatrix K = operator_matrix(setup);
      const ExactMatrix G = gram_matrix(setup);
      const ExactMatrix C = q_coefficients(setup);
      ExactScalar lhs, rhs;
      for (std::size_t i = 0; i < K.dim; ++i) {
        lhs += K.at(i, i) / G.at(i, i);
        rhs += C.at(i, i) * G.at(i, i);
      }
      CHECK(lhs == rhs);
    }
}

TEST_CASE("asymptotic sweep matches the exact closed forms") {
  const auto rows = asymptotic_sweep(2, 0, 0, 1, 60);
  REQUIRE(rows.size() == 60);
  for (const auto& row : rows) {
    const int m = row.m;
    // K(z0^m, z0^m) = pi^2/(m+1)^2 and ||z0^m||^2 = pi/(m+1), derived from the
    // closed-form monomial integral (itself pinned to quadrature above).
    CHECK(row.K_exact.q == mpq_class(1, (m + 1) * (m + 1)));
    CHECK(row.K_exact.pi_pow == 2);
    CHECK(row.norm_exact.q == mpq_class(1, m + 1));
    CHECK(row.scaled_err ==
          doctest::Approx(kPi * m / double(m + 1)).epsilon(1e-12));
    CHECK(row.scaled_err < kPi);  // bounded: the Theorem 1.1 law at desk scale
  }

  // with the FS twist (e = 1): scaled error 2 pi m / (m+2)
  const auto twisted = asymptotic_sweep(2, 1, 0, 1, 40);
  for (const auto& row : twisted) {
    CHECK(row.K_exact.q == mpq_class(1, (row.m + 2) * (row.m + 2)));
    CHECK(row.scaled_err ==
          doctest::Approx(2.0 * kPi * row.m / double(row.m + 2)).epsilon(1e-12));
    CHECK(row.scaled_err < 2.0 * kPi);
  }

  CHECK_THROWS_AS(asymptotic_sweep(2, 0, 0, 5, 4), std::invalid_argument);
}

TEST_CASE("maximal_sos_check") {
  // dim H^0(P^1, O(3)) = 4
  const auto rep3 = maximal_sos_check({2, 3, 0});
  CHECK(rep3.positive_definite);
  CHECK(rep3.square_count == 4);
  CHECK(rep3.basis_dim == 4);
  CHECK(rep3.max_residual < 1e-10);

  const auto rep1 = maximal_sos_check({2, 1, 0});
  CHECK(rep1.square_count == 2);
  CHECK(rep1.max_residual < 1e-10);

  const auto rep_n3 = maximal_sos_check({3, 2, 0});
  CHECK(rep_n3.square_count == rep_n3.basis_dim);
  CHECK(rep_n3.max_residual < 1e-10);
}

TEST_CASE("ExactScalar never silently mixes pi powers") {
  const ExactScalar pi1(mpq_class(1), 1);
  const ExactScalar pi2(mpq_class(1), 2);
  CHECK_THROWS_AS(pi1 + pi2, std::logic_error);
  CHECK((pi1 * pi2).pi_pow == 3);
  CHECK((pi2 / pi1).pi_pow == 1);
  CHECK((ExactScalar::zero() + pi2).pi_pow == 2);  // zero adopts the other power
  CHECK((pi1 - pi1).is_zero());
}

TEST_CASE("sweep CSV format and determinism") {
  const auto rows = asymptotic_sweep(2, 0, 0, 1, 3);
  const std::string csv = sweep_to_csv(rows, true);
  CHECK(csv.find("m,K_ss,norm_sq,err,scaled_err,K_ss_exact,norm_sq_exact\n") == 0);
  CHECK(csv.find("1/4 * pi^2") != std::string::npos);  // m=1: K = pi^2/4
  CHECK(csv.find("# C_hat,") != std::string::npos);
  CHECK(csv == sweep_to_csv(asymptotic_sweep(2, 0, 0, 1, 3), true));
}
