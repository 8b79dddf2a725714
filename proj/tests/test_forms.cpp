#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <complex>

#include "doctest.h"
#include "hsq/forms.hpp"
#include "hsq/rng.hpp"
#include "hsq/sgcs.hpp"

using namespace hsq;

namespace {

// Random Hermitian positive definite form: B B^H + I over the degree-d basis.
HermitianForm random_positive_form(int N, int d, Rng& rng) {
  HermitianForm f(N, d);
  const std::size_t n = f.dim();
  std::vector<CVector> B(n, CVector(n));
  for (auto& row : B)
    for (auto& c : row) c = {rng.next_gaussian(), rng.next_gaussian()};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Complex acc = (i == j) ? 1.0 : 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += B[i][k] * std::conj(B[j][k]);
      f.at(i, j) = acc;
    }
  return f;
}

HermitianForm diag_form(int N, int d, const std::vector<double>& diag) {
  HermitianForm f(N, d);
  REQUIRE(diag.size() == f.dim());
  for (std::size_t i = 0; i < diag.size(); ++i) f.at(i, i) = diag[i];
  return f;
}

}  // namespace

TEST_CASE("basis enumeration and ordering") {
  CHECK(basis(1, 3).indices == std::vector<MultiIndex>{{3}});
  CHECK(basis(2, 1).indices == std::vector<MultiIndex>{{1, 0}, {0, 1}});
  CHECK(basis(2, 2).indices == std::vector<MultiIndex>{{2, 0}, {1, 1}, {0, 2}});

  for (int N : {1, 2, 3, 4})
    for (int d : {0, 1, 2, 5}) {
      const MonomialBasis b(N, d);
      CHECK(b.size() == binomial_z((unsigned long)(d + N - 1), (unsigned long)(N - 1)).get_ui());
      for (std::size_t i = 0; i + 1 < b.size(); ++i) {
        CHECK(degree(b.indices[i]) == d);
        CHECK(b.indices[i] > b.indices[i + 1]);  // strictly ordered, no duplicates
      }
    }
}

TEST_CASE("eval_form basics") {
  const HermitianForm fs = fubini_study(2);
  CHECK(eval_form(fs, {1.0, 0.0}, {1.0, 0.0}) == Complex(1.0));
  CHECK(eval_form(fs, {1.0, 0.0}, {0.0, 1.0}) == Complex(0.0));

  // C = diag(1,-1,1) over {z1^2, z1 z2, z2^2} at v = w = (1,1): 1 - 1 + 1
  const HermitianForm f = diag_form(2, 2, {1.0, -1.0, 1.0});
  CHECK(eval_form(f, {1.0, 1.0}, {1.0, 1.0}) == Complex(1.0));

  CHECK_THROWS_AS(eval_form(fs, {1.0}, {1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("scaling covariance and Hermitian closure") {
  Rng rng(7);
  const HermitianForm f = random_positive_form(2, 2, rng);
  const Complex lambda(0.7, -1.3);
  for (int k = 0; k < 25; ++k) {
    const CVector v = sphere_point(2, rng), w = sphere_point(2, rng);
    CVector lv = v;
    for (auto& c : lv) c *= lambda;
    const Complex lhs = eval_form(f, lv, w);
    const Complex rhs = lambda * lambda * eval_form(f, v, w);  // degree d = 2
    CHECK(std::abs(lhs - rhs) < 1e-12);
    CHECK(std::abs(eval_form(f, v, w) - std::conj(eval_form(f, w, v))) < 1e-13);
  }
}

TEST_CASE("hermitian_symmetry_check") {
  const HermitianForm fs = fubini_study(2);
  CHECK(hermitian_symmetry_check(fs, 100, 1).max_defect < 1e-13);

  HermitianForm broken = diag_form(2, 2, {1.0, 1.0, 1.0});
  broken.at(0, 1) += 1e-3;  // perturb one entry off-Hermitian
  const auto rep = hermitian_symmetry_check(broken, 100, 1);
  CHECK(rep.max_defect > 1e-5);
  CHECK(rep.witness_v.size() == 2);
}

TEST_CASE("multiply against symbolic expansions") {
  const HermitianForm fs = fubini_study(2);

  // ||z||^2 * ||z||^2 = |z1|^4 + 2|z1|^2|z2|^2 + |z2|^4
  const HermitianForm sq = multiply(fs, fs);
  CHECK(sq.d == 2);
  for (std::size_t i = 0; i < sq.dim(); ++i)
    for (std::size_t j = 0; j < sq.dim(); ++j) {
      const double expect = (i == j) ? (i == 1 ? 2.0 : 1.0) : 0.0;
      CHECK(std::abs(sq.at(i, j) - expect) == 0.0);
    }

  // identity of the constant-1 form
  const HermitianForm same = multiply(sq, unit_form(2));
  for (std::size_t i = 0; i < sq.mat.size(); ++i) CHECK(same.mat[i] == sq.mat[i]);

  // (|z1|^2+|z2|^2)(|z1|^4+|z2|^4-|z1 z2|^2) = |z1|^6 + |z2|^6
  const HermitianForm g = diag_form(2, 2, {1.0, -1.0, 1.0});
  const HermitianForm prod = multiply(fs, g);
  for (std::size_t i = 0; i < prod.dim(); ++i)
    for (std::size_t j = 0; j < prod.dim(); ++j) {
      const double expect = (i == j && (i == 0 || i == 3)) ? 1.0 : 0.0;
      CHECK(std::abs(prod.at(i, j) - expect) == 0.0);
    }
}

TEST_CASE("multiply is evaluation-multiplicative (random forms)") {
  Rng rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    const HermitianForm f = random_positive_form(2, 1, rng);
    const HermitianForm g = random_positive_form(2, 2, rng);
    const HermitianForm fg = multiply(f, g);
    for (int k = 0; k < 10; ++k) {
      const CVector v = sphere_point(2, rng), w = sphere_point(2, rng);
      const Complex lhs = eval_form(fg, v, w);
      const Complex rhs = eval_form(f, v, w) * eval_form(g, v, w);
      CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(rhs)));
    }
  }
}

TEST_CASE("exact multiply: commutative, associative, norm_power additivity") {
  const auto np = [](int l) { return norm_power_exact(l, 2); };
  const ExactHermitianForm a = np(1), b = np(2), c = np(3);

  const ExactHermitianForm ab = multiply(a, b), ba = multiply(b, a);
  for (std::size_t i = 0; i < ab.mat.size(); ++i) CHECK(ab.mat[i] == ba.mat[i]);

  const ExactHermitianForm abc1 = multiply(multiply(a, b), c);
  const ExactHermitianForm abc2 = multiply(a, multiply(b, c));
  for (std::size_t i = 0; i < abc1.mat.size(); ++i) CHECK(abc1.mat[i] == abc2.mat[i]);

  // dense random rational forms, exact equality of both orders/groupings
  Rng rng(99);
  auto random_rational = [&rng](long num_range, long den_range) {
    mpq_class q(long(rng.next_u64() % std::uint64_t(2 * num_range + 1)) - num_range,
                1 + long(rng.next_u64() % std::uint64_t(den_range)));
    q.canonicalize();
    return q;
  };
  auto random_exact = [&](int N, int d) {
    ExactHermitianForm f(N, d);
    for (std::size_t i = 0; i < f.dim(); ++i) {
      f.at(i, i) = QComplex(random_rational(8, 5));
      for (std::size_t j = i + 1; j < f.dim(); ++j) {
        const QComplex v(random_rational(4, 3), random_rational(4, 3));
        f.at(i, j) = v;
        f.at(j, i) = v.conj();
      }
    }
    return f;
  };
  const ExactHermitianForm p = random_exact(2, 1), q = random_exact(2, 2),
                           r = random_exact(2, 1);
  CHECK(is_hermitian(p));
  const ExactHermitianForm pq = multiply(p, q), qp = multiply(q, p);
  CHECK(is_hermitian(pq));
  for (std::size_t i = 0; i < pq.mat.size(); ++i) CHECK(pq.mat[i] == qp.mat[i]);
  const ExactHermitianForm pqr1 = multiply(multiply(p, q), r);
  const ExactHermitianForm pqr2 = multiply(p, multiply(q, r));
  for (std::size_t i = 0; i < pqr1.mat.size(); ++i) CHECK(pqr1.mat[i] == pqr2.mat[i]);

  // norm_power(l1 + l2) = norm_power(l1) * norm_power(l2) exactly
  const ExactHermitianForm lhs = np(5);
  const ExactHermitianForm rhs = multiply(np(2), np(3));
  CHECK(lhs.mat.size() == rhs.mat.size());
  for (std::size_t i = 0; i < lhs.mat.size(); ++i) CHECK(lhs.mat[i] == rhs.mat[i]);
  CHECK(is_hermitian(lhs));
}

TEST_CASE("norm_power values") {
  const HermitianForm one = norm_power(1, 2);
  CHECK(one.dim() == 2);
  CHECK(one.at(0, 0) == Complex(1.0));
  CHECK(one.at(1, 1) == Complex(1.0));
  CHECK(one.at(0, 1) == Complex(0.0));

  const HermitianForm empty = norm_power(0, 3);
  CHECK(empty.dim() == 1);
  CHECK(empty.at(0, 0) == Complex(1.0));

  const HermitianForm two = norm_power(2, 2);
  CHECK(two.at(0, 0) == Complex(1.0));
  CHECK(two.at(1, 1) == Complex(2.0));
  CHECK(two.at(2, 2) == Complex(1.0));
}

TEST_CASE("cauchy_schwarz values and errors") {
  const HermitianForm fs = fubini_study(2);
  CHECK(cauchy_schwarz(fs, {1.0, 0.0}, {1.0, 1.0}) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(cauchy_schwarz(fs, {0.3, 0.7}, {0.3, 0.7}) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(cauchy_schwarz(fs, {1.0, 0.0}, {0.0, 1.0}) == doctest::Approx(0.0));

  // symmetric in (x, y)
  Rng rng(501);
  for (int k = 0; k < 10; ++k) {
    const CVector x = sphere_point(2, rng), y = sphere_point(2, rng);
    CHECK(cauchy_schwarz(fs, x, y) == doctest::Approx(cauchy_schwarz(fs, y, x)).epsilon(1e-13));
  }

  CHECK_THROWS_AS(multiply(fubini_study(2), fubini_study(3)), std::invalid_argument);

  // |z1|^2 alone vanishes at (0,1): degenerate input must error
  HermitianForm degenerate(2, 1);
  degenerate.at(0, 0) = 1.0;
  CHECK_THROWS_AS(cauchy_schwarz(degenerate, {0.0, 1.0}, {1.0, 0.0}), std::domain_error);
}

TEST_CASE("Psi multiplicativity") {
  Rng rng(23);
  for (int rep = 0; rep < 8; ++rep) {
    const HermitianForm f = random_positive_form(2, 1, rng);
    const HermitianForm g = random_positive_form(2, 2, rng);
    const HermitianForm fg = multiply(f, g);
    for (int k = 0; k < 15; ++k) {
      const CVector x = sphere_point(2, rng), y = sphere_point(2, rng);
      const double lhs = cauchy_schwarz(fg, x, y);
      const double rhs = cauchy_schwarz(f, x, y) * cauchy_schwarz(g, x, y);
      CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(rhs)));
    }
  }
}

TEST_CASE("pullback under linear changes") {
  const HermitianForm fs = fubini_study(2);
  const std::vector<CVector> eye = {{1.0, 0.0}, {0.0, 1.0}};
  const HermitianForm same = pullback(fs, eye);
  CHECK(std::abs(same.at(0, 0) - 1.0) == 0.0);
  CHECK(std::abs(same.at(1, 1) - 1.0) == 0.0);

  // z -> (2 z1, z2): ||z||^2 becomes 4|z1|^2 + |z2|^2
  const std::vector<CVector> stretch = {{2.0, 0.0}, {0.0, 1.0}};
  const HermitianForm st = pullback(fs, stretch);
  CHECK(std::abs(st.at(0, 0) - 4.0) == 0.0);
  CHECK(std::abs(st.at(1, 1) - 1.0) == 0.0);
}

TEST_CASE("JSON load: closure, rationals, duplicates") {
  const char* text = R"({
    "N": 2, "d": 1,
    "entries": [
      {"alpha": [1,0], "beta": [1,0], "re": 1, "im": 0},
      {"alpha": [1,0], "beta": [0,1], "re": "1/4", "im": 0.5},
      {"alpha": [0,1], "beta": [0,1], "re": "2/2", "im": 0}
    ]})";
  const HermitianForm f = form_from_json(text);
  CHECK(f.at(0, 1) == Complex(0.25, 0.5));
  CHECK(f.at(1, 0) == Complex(0.25, -0.5));  // Hermitian closure completed
  CHECK(f.at(1, 1) == Complex(1.0));

  // round-trip
  const HermitianForm g = form_from_json(form_to_json(f));
  for (std::size_t i = 0; i < f.mat.size(); ++i) CHECK(std::abs(f.mat[i] - g.mat[i]) < 1e-15);

  const char* conflict = R"({
    "N": 2, "d": 1,
    "entries": [
      {"alpha": [1,0], "beta": [0,1], "re": 1, "im": 0},
      {"alpha": [0,1], "beta": [1,0], "re": 0.5, "im": 0}
    ]})";
  CHECK_THROWS_AS(form_from_json(conflict), std::invalid_argument);

  CHECK_THROWS_AS(form_from_json("{ not json"), std::invalid_argument);
}

TEST_CASE("sgcs_sample_check on FS") {
  const HermitianForm fs = fubini_study(2);
  const auto rep = sgcs_sample_check(fs, 500, 42);
  CHECK(rep.pairs_checked > 400);
  CHECK(rep.max_psi < 1.0);
  CHECK_FALSE(rep.sgcs1_violated);
  CHECK(rep.min_hessian_eig == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("sgcs_sample_check: diagonal pairs excluded, violation witnessed") {
  const HermitianForm fs2 = fs_power(2, 2);
  const auto rep = sgcs_sample_check(fs2, 300, 5);
  CHECK(rep.max_psi < 1.0);  // diagonal (Psi = 1) pairs never enter the max

  // Rank-one form: R(x, ybar) = s(x) conj(s(y)), so Psi = 1 wherever defined.
  HermitianForm rank1(2, 1);
  const CVector u = {Complex(0.8, 0.1), Complex(0.3, -0.5)};
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) rank1.at(i, j) = u[i] * std::conj(u[j]);
  const auto bad = sgcs_sample_check(rank1, 200, 9);
  CHECK(bad.sgcs1_violated);
  CHECK(bad.max_psi >= 1.0 - 1e-12);
  CHECK(bad.psi_witness_x.size() == 2);
}
