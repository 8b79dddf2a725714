#include "hsq/quad_lab.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hsq/rng.hpp"

namespace hsq {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kTwoPi = 2.0 * kPi;

Complex pow_int(Complex base, int e) {
  Complex r = 1.0;
  while (e > 0) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

// Bidegree-(d,d) form on C^2 restricted to an affine chart of P^1:
// F(w, wbar) = sum T[a][b] w^a wbar^b, with evaluation of F and the
// derivatives needed for the induced volume density d_w d_wbar log F.
struct P1ChartForm {
  int d = 0;
  std::vector<Complex> T;  // (d+1) x (d+1), row-major

  P1ChartForm(const HermitianForm& f, int chart) : d(f.d), T(std::size_t((f.d + 1) * (f.d + 1))) {
    if (f.N != 2) throw std::invalid_argument("quad_lab: P^1 forms need N = 2");
    for (int a = 0; a <= d; ++a)
      for (int b = 0; b <= d; ++b) {
        const MultiIndex ia = (chart == 0) ? MultiIndex{d - a, a} : MultiIndex{a, d - a};
        const MultiIndex ib = (chart == 0) ? MultiIndex{d - b, b} : MultiIndex{b, d - b};
        at(a, b) = f.at(ia, ib);
      }
  }

  Complex& at(int a, int b) { return T[std::size_t(a * (d + 1) + b)]; }
  const Complex& at(int a, int b) const { return T[std::size_t(a * (d + 1) + b)]; }

  // F and Wirtinger derivatives at w.
  void eval(Complex w, Complex& F, Complex& Fw, Complex& Fwb, Complex& Fwwb) const {
    std::vector<Complex> wp(std::size_t(d + 1)), wbp(std::size_t(d + 1));
    wp[0] = wbp[0] = 1.0;
    for (int k = 1; k <= d; ++k) {
      wp[std::size_t(k)] = wp[std::size_t(k - 1)] * w;
      wbp[std::size_t(k)] = wbp[std::size_t(k - 1)] * std::conj(w);
    }
    F = Fw = Fwb = Fwwb = 0.0;
    for (int a = 0; a <= d; ++a)
      for (int b = 0; b <= d; ++b) {
        const Complex c = at(a, b);
        if (c == Complex(0)) continue;
        F += c * wp[std::size_t(a)] * wbp[std::size_t(b)];
        if (a >= 1) Fw += c * double(a) * wp[std::size_t(a - 1)] * wbp[std::size_t(b)];
        if (b >= 1) Fwb += c * double(b) * wp[std::size_t(a)] * wbp[std::size_t(b - 1)];
        if (a >= 1 && b >= 1)
          Fwwb += c * double(a * b) * wp[std::size_t(a - 1)] * wbp[std::size_t(b - 1)];
      }
  }

  // d_w d_wbar log F = (Fwwb F - Fw Fwb) / F^2
  double density(Complex w) const {
    Complex F, Fw, Fwb, Fwwb;
    eval(w, F, Fw, Fwb, Fwwb);
    if (std::abs(F) < 1e-300) throw std::domain_error("quad_lab: form vanishes on chart");
    return std::real((Fwwb * F - Fw * Fwb) / (F * F));
  }
};

// Cached per-node data for the tensor double integral.
struct KernelCache {
  std::vector<CVector> monoR;   // monomials of y over basis(2, d_R)
  std::vector<CVector> monoP;
  std::vector<Complex> s_val, t_val;
  std::vector<double> q_val;    // R^m(y,ybar) P(y,ybar)
  std::vector<double> w;
  std::vector<CVector> y;
};

CVector monomials_of(const MonomialBasis& bas, const CVector& y) {
  CVector out(bas.size());
  for (std::size_t i = 0; i < bas.size(); ++i) {
    Complex v = 1.0;
    const MultiIndex& mi = bas.indices[i];
    for (std::size_t t = 0; t < mi.size(); ++t)
      for (int k = 0; k < mi[t]; ++k) v *= y[t];
    out[i] = v;
  }
  return out;
}

Complex bilinear(const std::vector<Complex>& C, const CVector& mx, const CVector& my) {
  // sum C[a][b] mx[a] conj(my[b])
  const std::size_t n = mx.size();
  Complex r = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    if (mx[a] == Complex(0)) continue;
    Complex row = 0.0;
    for (std::size_t b = 0; b < n; ++b) row += C[a * n + b] * std::conj(my[b]);
    r += mx[a] * row;
  }
  return r;
}

KernelCache build_cache(const HermitianForm& R, const HermitianForm& P, int m, const Section& s,
                        const Section& t, const std::vector<P1Node>& nodes) {
  const MonomialBasis basR(2, R.d), basP(2, P.d);
  KernelCache c;
  const std::size_t n = nodes.size();
  c.monoR.resize(n);
  c.monoP.resize(n);
  c.s_val.resize(n);
  c.t_val.resize(n);
  c.q_val.resize(n);
  c.w.resize(n);
  c.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const CVector& y = nodes[i].y;
    c.y[i] = y;
    c.monoR[i] = monomials_of(basR, y);
    c.monoP[i] = monomials_of(basP, y);
    c.s_val[i] = s.eval(y);
    c.t_val[i] = t.eval(y);
    const double rv = std::real(bilinear(R.mat, c.monoR[i], c.monoR[i]));
    const double pv = std::real(bilinear(P.mat, c.monoP[i], c.monoP[i]));
    if (rv <= 0.0 || pv <= 0.0)
      throw std::domain_error("quad_lab: R or P not positive at a quadrature node");
    c.q_val[i] = std::pow(rv, m) * pv;
    c.w[i] = nodes[i].weight;
  }
  return c;
}

}  // namespace

std::vector<P1Node> p1_nodes(const HermitianForm& R, const QuadratureGrid& grid) {
  if (grid.chart_order < 16) throw std::invalid_argument("quad_lab: chart_order >= 16 required");
  if (R.N != 2) throw std::invalid_argument("quad_lab: P^1 grids need N = 2");
  const GaussLegendre rad = gauss_legendre(grid.chart_order, 0.0, grid.split_radius);
  const GaussLegendre ang = gauss_legendre(grid.chart_order, 0.0, kTwoPi);
  std::vector<P1Node> nodes;
  nodes.reserve(2 * std::size_t(grid.chart_order) * std::size_t(grid.chart_order));
  for (int chart = 0; chart < 2; ++chart) {
    const P1ChartForm cf(R, chart);
    for (std::size_t ir = 0; ir < rad.nodes.size(); ++ir)
      for (std::size_t ia = 0; ia < ang.nodes.size(); ++ia) {
        const double r = rad.nodes[ir];
        const Complex w = std::polar(r, ang.nodes[ia]);
        P1Node node;
        node.y = (chart == 0) ? CVector{1.0, w} : CVector{w, 1.0};
        node.weight = cf.density(w) * r * rad.weights[ir] * ang.weights[ia];
        if (node.weight <= 0.0) throw std::domain_error("quad_lab: nonpositive volume density");
        nodes.push_back(std::move(node));
      }
  }
  return nodes;
}

Complex k_numeric(const HermitianForm& R, const HermitianForm& P, int m, const Section& s,
                  const Section& t, const QuadratureGrid& grid) {
  const auto nodes = p1_nodes(R, grid);
  const KernelCache c = build_cache(R, P, m, s, t, nodes);
  const std::size_t n = nodes.size();
  std::vector<Complex> rows(n);
  for (std::size_t i = 0; i < n; ++i) {  // i: the x variable
    Complex row = 0.0;
    const double wi_over_q = c.w[i] / c.q_val[i];
    for (std::size_t j = 0; j < n; ++j) {  // j: the y variable
      const Complex rxy = bilinear(R.mat, c.monoR[i], c.monoR[j]);
      const Complex pxy = bilinear(P.mat, c.monoP[i], c.monoP[j]);
      row += pow_int(rxy, m) * pxy * c.s_val[j] * std::conj(c.t_val[i]) * (c.w[j] / c.q_val[j]);
    }
    rows[i] = row * wi_over_q;
  }
  return pairwise_sum(rows);
}

double norm_sq_numeric(const HermitianForm& R, const HermitianForm& P, int m, const Section& s,
                       const QuadratureGrid& grid) {
  const auto nodes = p1_nodes(R, grid);
  const KernelCache c = build_cache(R, P, m, s, s, nodes);
  std::vector<Complex> terms(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i)
    terms[i] = std::norm(c.s_val[i]) / c.q_val[i] * c.w[i];
  return std::real(pairwise_sum(terms));
}

ConvergenceCheck k_numeric_convergence(const HermitianForm& R, const HermitianForm& P, int m,
                                       const Section& s, const Section& t,
                                       const QuadratureGrid& grid, double tol) {
  ConvergenceCheck out;
  out.value = k_numeric(R, P, m, s, t, grid);
  QuadratureGrid fine = grid;
  fine.chart_order = 2 * grid.chart_order;
  out.refined = k_numeric(R, P, m, s, t, fine);
  out.rel_change = std::abs(out.value - out.refined) / std::max(1e-300, std::abs(out.refined));
  out.converged = out.rel_change <= tol;
  return out;
}

double rho(const ChartPoint& x, const CVector& y) {
  const CVector z = chart_coordinates(x, y);
  double nsq = 0.0;
  for (const auto& c : z) nsq += std::norm(c);
  return std::sqrt(nsq);
}

double omega_density_exact(const HermitianForm& R, const ChartPoint& x, const CVector& z) {
  if (x.ambient() != 2 || z.size() != 1)
    throw std::invalid_argument("omega_density_exact: P^1 charts only");
  const CVector y = chart_embed(x, z);
  const int chart = x.chart;
  const Complex yc = y[std::size_t(chart)];
  if (std::abs(yc) < 1e-300) throw std::domain_error("omega_density_exact: left affine chart");
  const Complex w = y[std::size_t(1 - chart)] / yc;
  const P1ChartForm cf(R, chart);
  // holomorphic jacobian of z -> affine offset u(z) = F z + higher(z)
  Complex J = x.frame[0][0];
  if (!x.higher.empty()) J += x.higher[0].derivative(0).eval(z);
  if (std::norm(J) < 1e-12 * std::norm(x.frame[0][0]))
    throw std::domain_error("omega_density_exact: chart radius exceeded (degenerate jacobian)");
  return cf.density(w) * std::norm(J);
}

DecompositionReport decompose(const HermitianForm& R, const HermitianForm& P, int m,
                              const Section& s, double r, const QuadratureGrid& grid,
                              std::optional<std::pair<double, double>> exact_refs) {
  if (m < 1) throw std::invalid_argument("decompose: m >= 1 required");
  if (r <= 0.0) throw std::invalid_argument("decompose: r > 0 required");
  // The approximant needs nothing beyond the degree-4 truncations; cutoff 6
  // keeps the chart Bochner-accurate two orders past that.
  const int cutoff = 6;
  const int n = R.N - 1;  // = 1

  const Complex K_full = k_numeric(R, P, m, s, s, grid);
  const double nsq = norm_sq_numeric(R, P, m, s, grid);

  const auto x_nodes = p1_nodes(R, grid);
  const MonomialBasis basR(2, R.d), basP(2, P.d);
  const int ball_order = std::max(24, grid.chart_order / 2);
  const GaussLegendre rad = gauss_legendre(ball_order, 0.0, r);
  const GaussLegendre ang = gauss_legendre(ball_order, 0.0, kTwoPi);

  std::vector<Complex> I_rows(x_nodes.size()), II_rows(x_nodes.size()), Wk_rows(x_nodes.size());
  for (std::size_t ix = 0; ix < x_nodes.size(); ++ix) {
    const CVector& xh = x_nodes[ix].y;
    const ChartPoint cp = bochner_normalize(R, xh, cutoff);
    const double r_valid = chart_validity_radius(cp);
    if (r >= 0.9 * r_valid)
      throw std::domain_error("decompose: r exceeds the chart validity radius (observed " +
                              std::to_string(r_valid) + ")");
    const TruncatedSeries psiR = restrict_psi(R, cp, cutoff);
    const TruncatedSeries phi = diastasis(psiR);
    const MetricData md = metric_series(phi);
    const TruncatedSeries psiP = (P.d == 0)
                                     ? TruncatedSeries::constant(n, cutoff, 1.0)
                                     : restrict_psi(P, cp, cutoff);
    const Truncations tr = truncations(psiR, md.det, psiP);

    const CVector monoR_x = monomials_of(basR, xh);
    const CVector monoP_x = monomials_of(basP, xh);
    const double rxx = std::real(bilinear(R.mat, monoR_x, monoR_x));
    const double pxx = std::real(bilinear(P.mat, monoP_x, monoP_x));
    const double qx = std::pow(rxx, m) * pxx;
    const Complex sx_conj = std::conj(s.eval(xh));

    Complex I_acc = 0.0, II_acc = 0.0, Wk_acc = 0.0;
    for (std::size_t ir = 0; ir < rad.nodes.size(); ++ir) {
      const double rr = rad.nodes[ir];
      for (std::size_t ia = 0; ia < ang.nodes.size(); ++ia) {
        const CVector z = {std::polar(rr, ang.nodes[ia])};
        const CVector y = chart_embed(cp, z);
        const CVector monoR_y = monomials_of(basR, y);
        const CVector monoP_y = monomials_of(basP, y);
        const Complex rxy = bilinear(R.mat, monoR_x, monoR_y);
        const Complex pxy = bilinear(P.mat, monoP_x, monoP_y);
        const double ryy = std::real(bilinear(R.mat, monoR_y, monoR_y));
        const double pyy = std::real(bilinear(P.mat, monoP_y, monoP_y));
        const double qy = std::pow(ryy, m) * pyy;
        const Complex sy = s.eval(y);
        // kernel k(x,y) and the holomorphic factor G(x,y)
        const Complex kval = pow_int(rxy, m) * pxy * sy * sx_conj / (qx * qy);
        // W(r) must stay clear of the zero sets Z_R, Z_P for the kernel
        // rewrite to hold; a collapsing Cauchy-Schwarz value means r is far
        // beyond any valid tubular-neighborhood radius.
        if (std::norm(rxy) < 1e-6 * (rxx * ryy) || std::norm(pxy) < 1e-6 * (pxx * pyy))
          throw std::domain_error(
              "decompose: W(r) approaches the zero set of R or P (chart radius exceeded)");
        const Complex ryx = std::conj(rxy);  // R(y, xbar) = conj(R(x, ybar))
        const Complex pyx = std::conj(pxy);
        const Complex G = sy * sx_conj / (pow_int(ryx, m) * pyx);
        const double om = omega_density_exact(R, cp, z);
        const Complex tval = pow_int(tr.psi_R4.eval(z), m) * tr.psi_P2.eval(z) *
                             tr.omega2.eval(z) / om;
        const double measure = om * rr * rad.weights[ir] * ang.weights[ia];
        Wk_acc += kval * measure;
        I_acc += (kval - tval * G) * measure;
        II_acc += tval * G * measure;
      }
    }
    const double wx = x_nodes[ix].weight;
    I_rows[ix] = I_acc * wx;
    II_rows[ix] = II_acc * wx;
    Wk_rows[ix] = Wk_acc * wx;
  }

  DecompositionReport rep;
  rep.m = m;
  rep.r = r;
  const Complex Wk = pairwise_sum(Wk_rows);
  rep.I = pairwise_sum(I_rows);
  rep.II = pairwise_sum(II_rows);
  double mn = 1.0;
  for (int i = 0; i < n; ++i) mn *= m;
  const double dominant_factor = std::pow(kPi, n) / mn;
  rep.III = K_full - Wk;

  double K_ref_re = std::real(K_full);
  double nsq_ref = nsq;
  if (exact_refs) {
    K_ref_re = exact_refs->first;
    nsq_ref = exact_refs->second;
  }
  rep.K_ss = exact_refs ? Complex(K_ref_re, 0.0) : K_full;
  rep.norm_sq = nsq_ref;
  rep.II -= dominant_factor * nsq_ref;
  const Complex closure = rep.I + rep.II + rep.III - (rep.K_ss - dominant_factor * nsq_ref);
  rep.closure_defect = std::abs(closure);
  return rep;
}

RadiusSchedule radius_schedule(double m, int n, double r9_hat) {
  if (m < 2.0) throw std::invalid_argument("radius_schedule: m >= 2 required (log m > 0)");
  if (r9_hat <= 0.0) throw std::invalid_argument("radius_schedule: r9_hat > 0 required");
  auto lower = [n](double mm) { return std::sqrt(2.0 * (n + 1) * std::log(mm) / mm); };
  auto upper = [n, r9_hat](double mm) {
    return r9_hat / std::pow(mm, double(n + 2) / double(2 * n + 5));
  };
  RadiusSchedule out;
  out.lower = lower(m);
  out.upper = upper(m);
  out.feasible = out.lower <= out.upper;
  if (out.feasible) out.r = std::sqrt(out.lower * out.upper);

  // Minimal feasible m: the bound ratio is eventually monotone; double then bisect.
  double hi = 2.0;
  bool found = false;
  for (int it = 0; it < 400 && hi < 1e60; ++it) {
    if (lower(hi) <= upper(hi)) {
      found = true;
      break;
    }
    hi *= 2.0;
  }
  if (!found) {
    out.m0 = std::numeric_limits<double>::infinity();
    return out;
  }
  double lo = std::max(2.0, hi / 2.0);
  if (lower(lo) <= upper(lo)) {
    out.m0 = lo;  // feasible from the start of the bracket
    if (lo <= 2.0) return out;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (lower(mid) <= upper(mid))
      hi = mid;
    else
      lo = mid;
  }
  out.m0 = std::ceil(hi);
  return out;
}

ExactScalar lemma52(int n, int k, const mpq_class& a, int m) {
  if (n < 1) throw std::invalid_argument("lemma52: n >= 1 required");
  if (k < 0 || m < 0) throw std::invalid_argument("lemma52: k, m >= 0 required");
  if (a <= 0) throw std::invalid_argument("lemma52: a > 0 required");
  mpq_class apow(1);
  for (int i = 0; i < n + k; ++i) apow *= a;
  mpq_class q(factorial_z((unsigned long)(n + k - 1)) * factorial_z((unsigned long)m),
              factorial_z((unsigned long)(n - 1)) * factorial_z((unsigned long)(m + k + n)));
  q /= apow;
  q.canonicalize();
  return {q, n};
}

double lemma52_quadrature(int n, int k, double a, int m, int order) {
  // Radial reduction: vol(S^{2n-1}) r^{2n-1} dr with vol = 2 pi^n / (n-1)!.
  const double upper = 1.0 / std::sqrt(a);
  const GaussLegendre rule = gauss_legendre(order, 0.0, upper);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double rr = rule.nodes[i];
    acc += std::pow(rr, 2 * k + 2 * n - 1) * std::pow(1.0 - a * rr * rr, m) * rule.weights[i];
  }
  double sphere = 2.0 * std::pow(kPi, n);
  for (int i = 2; i < n; ++i) sphere /= i;  // divide by (n-1)!
  return sphere * acc;
}

namespace {

// integral over the ball B(r) in C^n (n = 1, 2) of a pointwise integrand.
template <class F>
Complex ball_integral(int n, double r, int order, F&& integrand) {
  const GaussLegendre ang = gauss_legendre(order, 0.0, kTwoPi);
  if (n == 1) {
    const GaussLegendre rad = gauss_legendre(order, 0.0, r);
    std::vector<Complex> rows(rad.nodes.size());
    for (std::size_t ir = 0; ir < rad.nodes.size(); ++ir) {
      Complex acc = 0.0;
      for (std::size_t ia = 0; ia < ang.nodes.size(); ++ia) {
        const CVector z = {std::polar(rad.nodes[ir], ang.nodes[ia])};
        acc += integrand(z) * ang.weights[ia];
      }
      rows[ir] = acc * rad.nodes[ir] * rad.weights[ir];
    }
    return pairwise_sum(rows);
  }
  if (n == 2) {
    const GaussLegendre rad1 = gauss_legendre(order, 0.0, r);
    std::vector<Complex> rows(rad1.nodes.size());
    for (std::size_t i1 = 0; i1 < rad1.nodes.size(); ++i1) {
      const double r1 = rad1.nodes[i1];
      const double rmax = std::sqrt(std::max(0.0, r * r - r1 * r1));
      const GaussLegendre rad2 = gauss_legendre(order, 0.0, rmax);
      Complex acc = 0.0;
      for (std::size_t i2 = 0; i2 < rad2.nodes.size(); ++i2)
        for (std::size_t a1 = 0; a1 < ang.nodes.size(); ++a1) {
          Complex inner = 0.0;
          for (std::size_t a2 = 0; a2 < ang.nodes.size(); ++a2) {
            const CVector z = {std::polar(r1, ang.nodes[a1]),
                               std::polar(rad2.nodes[i2], ang.nodes[a2])};
            inner += integrand(z) * ang.weights[a2];
          }
          acc += inner * rad2.nodes[i2] * rad2.weights[i2] * ang.weights[a1];
        }
      rows[i1] = acc * r1 * rad1.weights[i1];
    }
    return pairwise_sum(rows);
  }
  throw std::invalid_argument("ball integral: n <= 2 only");
}

}  // namespace

double quasi_diagonal_mean_value_test(const HoloPoly& f, const TruncatedSeries& q, double r,
                                      int order) {
  if (q.quasi_diagonal_defect() > 1e-12)
    throw std::invalid_argument("mean_value_test: q has off-quasi-diagonal terms");
  if (f.n != q.n) throw std::invalid_argument("mean_value_test: dimension mismatch");
  const Complex both = ball_integral(q.n, r, order, [&](const CVector& z) {
    return f.eval(z) * q.eval(z);
  });
  const Complex q_only = ball_integral(q.n, r, order, [&](const CVector& z) { return q.eval(z); });
  const CVector zero(std::size_t(q.n), Complex(0));
  return std::abs(both - f.eval(zero) * q_only);
}

Complex ball_monomial_quadrature(const MultiIndex& a, const MultiIndex& b, double r, int order) {
  if (a.size() != b.size()) throw std::invalid_argument("ball quadrature: index mismatch");
  const int n = int(a.size());
  return ball_integral(n, r, order, [&](const CVector& z) {
    Complex v = 1.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      v *= pow_int(z[i], a[i]);
      v *= pow_int(std::conj(z[i]), b[i]);
    }
    return v;
  });
}

OffDiagonalReport off_diagonal_bound_test(const HermitianForm& R, double r, int num_samples,
                                          std::uint64_t seed) {
  Rng rng = Rng(seed).split("off_diagonal");
  OffDiagonalReport rep;
  rep.bound = 1.0 - r * r / 2.0;
  rep.max_psi = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < num_samples; ++k) {
    const CVector x = sphere_point(R.N, rng);
    const CVector y = sphere_point(R.N, rng);
    bool far = false;
    try {
      const ChartPoint cp = bochner_normalize(R, x);
      far = rho(cp, y) >= r;
    } catch (const std::domain_error&) {
      far = true;  // outside the chart counts as far from the diagonal
    }
    if (!far) continue;
    ++rep.samples_used;
    const double psi = cauchy_schwarz(R, x, y);
    if (psi > rep.max_psi) {
      rep.max_psi = psi;
      rep.witness_x = x;
      rep.witness_y = y;
    }
  }
  rep.holds = rep.samples_used == 0 || rep.max_psi <= rep.bound;
  return rep;
}

RemainderFits remainder_scaling_test(const HermitianForm& R, const HermitianForm& P,
                                     const std::vector<CVector>& bases, double rho_lo,
                                     double rho_hi, int n_radii, int n_dirs, int cutoff) {
  RemainderFits fits;
  const int n = R.N - 1;
  for (const CVector& base : bases) {
    const ChartPoint cp = bochner_normalize(R, base, cutoff);
    const TruncatedSeries psiR = restrict_psi(R, cp, cutoff);
    const TruncatedSeries phi = diastasis(psiR);
    const MetricData md = metric_series(phi);
    const TruncatedSeries psiP = (P.d == 0)
                                     ? TruncatedSeries::constant(n, cutoff, 1.0)
                                     : restrict_psi(P, cp, cutoff);
    const Truncations tr = truncations(psiR, md.det, psiP);
    const CVector& xh = cp.base;

    for (int ir = 0; ir < n_radii; ++ir) {
      const double t = n_radii == 1 ? 0.0 : double(ir) / double(n_radii - 1);
      const double rr = rho_lo * std::pow(rho_hi / rho_lo, t);
      for (int id = 0; id < n_dirs; ++id) {
        const double theta = kTwoPi * (id + 0.5) / n_dirs;
        const CVector z = {std::polar(rr, theta)};
        const CVector y = chart_embed(cp, z);
        const double psi = cauchy_schwarz(R, xh, y);
        const double psiP_val = (P.d == 0) ? 1.0 : cauchy_schwarz(P, xh, y);
        const double om = omega_density_exact(R, cp, z);
        const double r2 = rr * rr;
        fits.psiR_deg5 = std::max(fits.psiR_deg5,
                                  std::abs(psi - std::real(tr.psi_R4.eval(z))) / (r2 * r2 * rr));
        fits.psiR_deg4 = std::max(fits.psiR_deg4, std::abs(psi - (1.0 - r2)) / (r2 * r2));
        fits.psiP_deg3 = std::max(fits.psiP_deg3,
                                  std::abs(psiP_val - std::real(tr.psi_P2.eval(z))) / (r2 * rr));
        fits.psiP_deg2 = std::max(fits.psiP_deg2, std::abs(psiP_val - 1.0) / r2);
        fits.omega_deg3 = std::max(fits.omega_deg3,
                                   std::abs(om - std::real(tr.omega2.eval(z))) / (r2 * rr));
        fits.omega_deg2 = std::max(fits.omega_deg2, std::abs(om - 1.0) / r2);
      }
    }

    // Lemma 4.4 style ball integrals: integral of rho^k Omega over B(x, r) vs r^{2n+k}.
    for (double rr : {0.01, 0.05, 0.1, 0.2, 0.3}) {
      for (int k : {3, 5}) {
        const Complex val = ball_integral(1, rr, 48, [&](const CVector& z) {
          const double rz = std::abs(z[0]);
          return Complex(std::pow(rz, k) * omega_density_exact(R, cp, z), 0.0);
        });
        const double ratio = std::real(val) / std::pow(rr, 2 * n + k);
        if (k == 3)
          fits.ball_k3 = std::max(fits.ball_k3, ratio);
        else
          fits.ball_k5 = std::max(fits.ball_k5, ratio);
      }
    }
  }
  return fits;
}

}  // namespace hsq
