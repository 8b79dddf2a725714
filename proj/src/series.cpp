#include "hsq/series.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hsq {

namespace {

bool graded_lex_less(const MultiIndex& a, const MultiIndex& b) {
  const int da = degree(a), db = degree(b);
  if (da != db) return da < db;
  return a > b;  // within a degree: first exponent decreasing, as in MonomialBasis
}

Complex pow_int(Complex base, int e) {
  Complex r = 1.0;
  while (e > 0) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

Complex eval_monomial(const CVector& z, const MultiIndex& a) {
  Complex r = 1.0;
  for (std::size_t i = 0; i < a.size(); ++i) r *= pow_int(z[i], a[i]);
  return r;
}

}  // namespace

// --- TruncatedSeries --------------------------------------------------------

TruncatedSeries TruncatedSeries::constant(int n, int cutoff, Complex c) {
  TruncatedSeries s(n, cutoff);
  if (c != Complex(0)) s.coeffs[{MultiIndex(std::size_t(n), 0), MultiIndex(std::size_t(n), 0)}] = c;
  return s;
}

Complex TruncatedSeries::coeff(const MultiIndex& a, const MultiIndex& b) const {
  auto it = coeffs.find({a, b});
  return it == coeffs.end() ? Complex(0) : it->second;
}

void TruncatedSeries::set(const MultiIndex& a, const MultiIndex& b, Complex c) {
  if (degree(a) + degree(b) > cutoff) throw std::invalid_argument("series: term beyond cutoff");
  if (c == Complex(0))
    coeffs.erase({a, b});
  else
    coeffs[{a, b}] = c;
}

void TruncatedSeries::add_to(const MultiIndex& a, const MultiIndex& b, Complex c) {
  if (degree(a) + degree(b) > cutoff) return;
  auto& slot = coeffs[{a, b}];
  slot += c;
  if (slot == Complex(0)) coeffs.erase({a, b});
}

void TruncatedSeries::prune(double eps) {
  for (auto it = coeffs.begin(); it != coeffs.end();)
    it = (std::abs(it->second) <= eps) ? coeffs.erase(it) : std::next(it);
}

Complex TruncatedSeries::eval(const CVector& z) const {
  Complex r = 0.0;
  for (const auto& [key, c] : coeffs)
    r += c * eval_monomial(z, key.first) * std::conj(eval_monomial(z, key.second));
  return r;
}

double TruncatedSeries::reality_defect() const {
  double d = 0.0;
  for (const auto& [key, c] : coeffs)
    d = std::max(d, std::abs(c - std::conj(coeff(key.second, key.first))));
  return d;
}

double TruncatedSeries::quasi_diagonal_defect() const {
  double d = 0.0;
  for (const auto& [key, c] : coeffs)
    if (degree(key.first) != degree(key.second)) d = std::max(d, std::abs(c));
  return d;
}

std::string TruncatedSeries::dump() const {
  std::vector<std::pair<MultiIndex, MultiIndex>> keys;
  keys.reserve(coeffs.size());
  for (const auto& [key, c] : coeffs) keys.push_back(key);
  std::sort(keys.begin(), keys.end(), [](const auto& p, const auto& q) {
    const int dp = degree(p.first) + degree(p.second);
    const int dq = degree(q.first) + degree(q.second);
    if (dp != dq) return dp < dq;
    if (p.first != q.first) return graded_lex_less(p.first, q.first);
    return graded_lex_less(p.second, q.second);
  });
  std::ostringstream os;
  auto put_index = [&os](const MultiIndex& a) {
    for (std::size_t i = 0; i < a.size(); ++i) os << (i ? "," : "") << a[i];
  };
  os.precision(17);
  for (const auto& [a, b] : keys) {
    const Complex c = coeff(a, b);
    put_index(a);
    os << ' ';
    put_index(b);
    // + 0.0 canonicalizes negative zero for byte-stable golden files
    os << ' ' << c.real() + 0.0 << ' ' << c.imag() + 0.0 << '\n';
  }
  return os.str();
}

TruncatedSeries add(const TruncatedSeries& f, const TruncatedSeries& g) {
  TruncatedSeries r = f;
  r.cutoff = std::min(f.cutoff, g.cutoff);
  for (const auto& [key, c] : g.coeffs) r.add_to(key.first, key.second, c);
  // drop terms beyond the common cutoff
  for (auto it = r.coeffs.begin(); it != r.coeffs.end();)
    it = (degree(it->first.first) + degree(it->first.second) > r.cutoff) ? r.coeffs.erase(it)
                                                                         : std::next(it);
  return r;
}

TruncatedSeries sub(const TruncatedSeries& f, const TruncatedSeries& g) {
  return add(f, scale(g, -1.0));
}

TruncatedSeries scale(const TruncatedSeries& f, Complex c) {
  TruncatedSeries r(f.n, f.cutoff);
  if (c == Complex(0)) return r;
  for (const auto& [key, v] : f.coeffs) r.coeffs[key] = v * c;
  return r;
}

TruncatedSeries mul(const TruncatedSeries& f, const TruncatedSeries& g) {
  if (f.n != g.n) throw std::invalid_argument("series mul: chart dimensions differ");
  TruncatedSeries r(f.n, std::min(f.cutoff, g.cutoff));
  for (const auto& [ka, ca] : f.coeffs) {
    const int da = degree(ka.first) + degree(ka.second);
    if (da > r.cutoff) continue;
    for (const auto& [kb, cb] : g.coeffs) {
      if (da + degree(kb.first) + degree(kb.second) > r.cutoff) continue;
      r.add_to(add_indices(ka.first, kb.first), add_indices(ka.second, kb.second), ca * cb);
    }
  }
  return r;
}

TruncatedSeries conj(const TruncatedSeries& f) {
  TruncatedSeries r(f.n, f.cutoff);
  for (const auto& [key, c] : f.coeffs) r.coeffs[{key.second, key.first}] = std::conj(c);
  return r;
}

TruncatedSeries reciprocal(const TruncatedSeries& f) {
  const MultiIndex zero(std::size_t(f.n), 0);
  const Complex c0 = f.coeff(zero, zero);
  if (std::abs(c0) < 1e-300) throw std::domain_error("series reciprocal: zero constant term");
  // 1/f = (1/c0) * sum_k g^k with g = 1 - f/c0 (no constant term).
  TruncatedSeries g = scale(f, -1.0 / c0);
  g.add_to(zero, zero, 1.0);
  TruncatedSeries acc = TruncatedSeries::constant(f.n, f.cutoff, 1.0);
  TruncatedSeries pw = TruncatedSeries::constant(f.n, f.cutoff, 1.0);
  for (int k = 1; k <= f.cutoff; ++k) {
    pw = mul(pw, g);
    if (pw.coeffs.empty()) break;
    acc = add(acc, pw);
  }
  return scale(acc, 1.0 / c0);
}

TruncatedSeries log(const TruncatedSeries& f) {
  const MultiIndex zero(std::size_t(f.n), 0);
  const Complex c0 = f.coeff(zero, zero);
  if (std::abs(c0 - 1.0) > 1e-9)
    throw std::domain_error("series log: constant term must be 1 (normalize first)");
  TruncatedSeries u = f;
  u.add_to(zero, zero, -c0);  // u = f - 1 with the rounding of c0 removed exactly
  TruncatedSeries acc(f.n, f.cutoff);
  TruncatedSeries pw = TruncatedSeries::constant(f.n, f.cutoff, 1.0);
  double sign = 1.0;
  for (int k = 1; k <= f.cutoff; ++k) {
    pw = mul(pw, u);
    if (pw.coeffs.empty()) break;
    acc = add(acc, scale(pw, sign / double(k)));
    sign = -sign;
  }
  return acc;
}

TruncatedSeries d_z(const TruncatedSeries& f, int i) {
  TruncatedSeries r(f.n, f.cutoff);
  for (const auto& [key, c] : f.coeffs) {
    if (key.first[std::size_t(i)] == 0) continue;
    MultiIndex a = key.first;
    const double e = a[std::size_t(i)];
    a[std::size_t(i)] -= 1;
    r.add_to(a, key.second, c * e);
  }
  return r;
}

TruncatedSeries d_zbar(const TruncatedSeries& f, int j) {
  TruncatedSeries r(f.n, f.cutoff);
  for (const auto& [key, c] : f.coeffs) {
    if (key.second[std::size_t(j)] == 0) continue;
    MultiIndex b = key.second;
    const double e = b[std::size_t(j)];
    b[std::size_t(j)] -= 1;
    r.add_to(key.first, b, c * e);
  }
  return r;
}

// --- HoloPoly ---------------------------------------------------------------

HoloPoly HoloPoly::constant(int n, int cutoff, Complex c) {
  HoloPoly p(n, cutoff);
  if (c != Complex(0)) p.coeffs[MultiIndex(std::size_t(n), 0)] = c;
  return p;
}

HoloPoly HoloPoly::variable(int n, int cutoff, int i) {
  HoloPoly p(n, cutoff);
  MultiIndex a(std::size_t(n), 0);
  a[std::size_t(i)] = 1;
  p.coeffs[a] = 1.0;
  return p;
}

Complex HoloPoly::coeff(const MultiIndex& a) const {
  auto it = coeffs.find(a);
  return it == coeffs.end() ? Complex(0) : it->second;
}

void HoloPoly::add_to(const MultiIndex& a, Complex c) {
  if (degree(a) > cutoff) return;
  auto& slot = coeffs[a];
  slot += c;
  if (slot == Complex(0)) coeffs.erase(a);
}

Complex HoloPoly::eval(const CVector& z) const {
  Complex r = 0.0;
  for (const auto& [a, c] : coeffs) r += c * eval_monomial(z, a);
  return r;
}

HoloPoly HoloPoly::derivative(int i) const {
  HoloPoly r(n, cutoff);
  for (const auto& [a, c] : coeffs) {
    if (a[std::size_t(i)] == 0) continue;
    MultiIndex b = a;
    const double e = b[std::size_t(i)];
    b[std::size_t(i)] -= 1;
    r.add_to(b, c * e);
  }
  return r;
}

HoloPoly add(const HoloPoly& f, const HoloPoly& g) {
  HoloPoly r = f;
  for (const auto& [a, c] : g.coeffs) r.add_to(a, c);
  return r;
}

HoloPoly scale(const HoloPoly& f, Complex c) {
  HoloPoly r(f.n, f.cutoff);
  if (c == Complex(0)) return r;
  for (const auto& [a, v] : f.coeffs) r.coeffs[a] = v * c;
  return r;
}

HoloPoly mul(const HoloPoly& f, const HoloPoly& g) {
  HoloPoly r(f.n, std::min(f.cutoff, g.cutoff));
  for (const auto& [a, ca] : f.coeffs) {
    if (degree(a) > r.cutoff) continue;
    for (const auto& [b, cb] : g.coeffs) {
      if (degree(a) + degree(b) > r.cutoff) continue;
      r.add_to(add_indices(a, b), ca * cb);
    }
  }
  return r;
}

HoloPoly compose(const HoloPoly& f, const std::vector<HoloPoly>& g) {
  if ((int)g.size() != f.n) throw std::invalid_argument("compose: arity mismatch");
  const int cutoff = f.cutoff;
  const int n_out = g.empty() ? f.n : g[0].n;
  HoloPoly r(n_out, cutoff);
  // memoized powers of each component
  std::vector<std::vector<HoloPoly>> pows(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    pows[i].push_back(HoloPoly::constant(n_out, cutoff, 1.0));
  auto power = [&](std::size_t i, int e) -> const HoloPoly& {
    while ((int)pows[i].size() <= e) pows[i].push_back(mul(pows[i].back(), g[i]));
    return pows[i][std::size_t(e)];
  };
  for (const auto& [a, c] : f.coeffs) {
    HoloPoly term = HoloPoly::constant(n_out, cutoff, c);
    for (std::size_t i = 0; i < g.size(); ++i)
      if (a[i] > 0) term = mul(term, power(i, a[i]));
    r = add(r, term);
  }
  return r;
}

TruncatedSeries holo_series(const HoloPoly& f) {
  TruncatedSeries s(f.n, f.cutoff);
  const MultiIndex zero(std::size_t(f.n), 0);
  for (const auto& [a, c] : f.coeffs) s.coeffs[{a, zero}] = c;
  return s;
}

// --- charts -----------------------------------------------------------------

ChartPoint affine_chart(const CVector& base) {
  if (base.empty()) throw std::invalid_argument("chart: empty base point");
  int chart = 0;
  for (std::size_t i = 1; i < base.size(); ++i)
    if (std::abs(base[i]) > std::abs(base[std::size_t(chart)])) chart = int(i);
  if (std::abs(base[std::size_t(chart)]) < 1e-300)
    throw std::invalid_argument("chart: zero base point");
  ChartPoint cp;
  cp.base = base;
  cp.chart = chart;
  const int n = int(base.size()) - 1;
  cp.frame.assign(std::size_t(n), CVector(std::size_t(n), Complex(0)));
  for (int i = 0; i < n; ++i) cp.frame[std::size_t(i)][std::size_t(i)] = 1.0;
  return cp;
}

namespace {

// u = frame*z + higher(z) as holomorphic polys in z.
std::vector<HoloPoly> offset_map(const ChartPoint& x, int cutoff) {
  const int n = x.n();
  std::vector<HoloPoly> u(std::size_t(n), HoloPoly(n, cutoff));
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      MultiIndex a(std::size_t(n), 0);
      a[std::size_t(l)] = 1;
      if (x.frame[std::size_t(k)][std::size_t(l)] != Complex(0))
        u[std::size_t(k)].add_to(a, x.frame[std::size_t(k)][std::size_t(l)]);
    }
    if (!x.higher.empty())
      for (const auto& [a, c] : x.higher[std::size_t(k)].coeffs) u[std::size_t(k)].add_to(a, c);
  }
  return u;
}

CVector normalized_base(const ChartPoint& x) {
  CVector xn = x.base;
  const Complex pivot = xn[std::size_t(x.chart)];
  for (auto& c : xn) c /= pivot;
  return xn;
}

// Homogeneous coordinates as holomorphic polys of z.
std::vector<HoloPoly> embed_map(const ChartPoint& x, int cutoff) {
  const int N = x.ambient();
  const CVector xn = normalized_base(x);
  const auto u = offset_map(x, cutoff);
  std::vector<HoloPoly> y(static_cast<std::size_t>(N));
  int k = 0;
  for (int j = 0; j < N; ++j) {
    if (j == x.chart) {
      y[std::size_t(j)] = HoloPoly::constant(x.n(), cutoff, 1.0);
    } else {
      y[std::size_t(j)] = add(HoloPoly::constant(x.n(), cutoff, xn[std::size_t(j)]),
                              u[std::size_t(k)]);
      ++k;
    }
  }
  return y;
}

Eigen::MatrixXcd to_eigen(const std::vector<CVector>& m) {
  const Eigen::Index n = Eigen::Index(m.size());
  Eigen::MatrixXcd e(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) e(i, j) = m[std::size_t(i)][std::size_t(j)];
  return e;
}

std::vector<CVector> from_eigen(const Eigen::MatrixXcd& e) {
  std::vector<CVector> m(std::size_t(e.rows()), CVector(std::size_t(e.cols())));
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j) m[std::size_t(i)][std::size_t(j)] = e(i, j);
  return m;
}

}  // namespace

double chart_validity_radius(const ChartPoint& x) {
  if (x.higher.empty()) return std::numeric_limits<double>::infinity();
  // smallest singular value of the linear part as the comparison scale
  const Eigen::MatrixXcd F = to_eigen(x.frame);
  const double fscale = F.jacobiSvd().singularValues().minCoeff();
  double radius = std::numeric_limits<double>::infinity();
  for (const auto& h : x.higher)
    for (const auto& [a, c] : h.coeffs) {
      const int k = degree(a);
      if (k < 2 || std::abs(c) <= 0.0) continue;
      radius = std::min(radius, std::pow(fscale / std::abs(c), 1.0 / double(k - 1)));
    }
  return radius;
}

CVector chart_embed(const ChartPoint& x, const CVector& z) {
  if ((int)z.size() != x.n()) throw std::invalid_argument("chart_embed: bad z length");
  const CVector xn = normalized_base(x);
  CVector y(std::size_t(x.ambient()));
  // u = frame*z + higher(z)
  CVector u(std::size_t(x.n()), Complex(0));
  for (int k = 0; k < x.n(); ++k) {
    for (int l = 0; l < x.n(); ++l)
      u[std::size_t(k)] += x.frame[std::size_t(k)][std::size_t(l)] * z[std::size_t(l)];
    if (!x.higher.empty()) u[std::size_t(k)] += x.higher[std::size_t(k)].eval(z);
  }
  int k = 0;
  for (int j = 0; j < x.ambient(); ++j)
    y[std::size_t(j)] = (j == x.chart) ? Complex(1.0) : xn[std::size_t(j)] + u[std::size_t(k++)];
  return y;
}

CVector chart_coordinates(const ChartPoint& x, const CVector& y) {
  if ((int)y.size() != x.ambient()) throw std::invalid_argument("chart_coordinates: bad y length");
  if (std::abs(y[std::size_t(x.chart)]) < 1e-12 * std::abs(y[std::size_t(0)]) + 1e-300)
    throw std::domain_error("chart_coordinates: point outside affine chart");
  const CVector xn = normalized_base(x);
  CVector u(std::size_t(x.n()));
  {
    int k = 0;
    for (int j = 0; j < x.ambient(); ++j) {
      if (j == x.chart) continue;
      u[std::size_t(k++)] = y[std::size_t(j)] / y[std::size_t(x.chart)] - xn[std::size_t(j)];
    }
  }
  const Eigen::MatrixXcd F = to_eigen(x.frame);
  const auto lu = F.fullPivLu();
  if (!lu.isInvertible()) throw std::domain_error("chart_coordinates: singular frame");
  Eigen::VectorXcd uv(x.n());
  for (int k = 0; k < x.n(); ++k) uv(k) = u[std::size_t(k)];
  Eigen::VectorXcd zv = lu.solve(uv);
  if (x.higher.empty()) {
    CVector z(std::size_t(x.n()));
    for (int k = 0; k < x.n(); ++k) z[std::size_t(k)] = zv(k);
    return z;
  }
  // Newton on M(z) = F z + higher(z) = u
  const int n = x.n();
  Eigen::VectorXcd z = zv;
  for (int it = 0; it < 80; ++it) {
    CVector zc(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) zc[std::size_t(k)] = z(k);
    Eigen::VectorXcd resid = F * z - uv;
    for (int k = 0; k < n; ++k) resid(k) += x.higher[std::size_t(k)].eval(zc);
    if (resid.norm() <= 1e-13 * (1.0 + uv.norm())) {
      CVector out(static_cast<std::size_t>(n));
      for (int k = 0; k < n; ++k) out[std::size_t(k)] = z(k);
      return out;
    }
    Eigen::MatrixXcd J = F;
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) J(k, l) += x.higher[std::size_t(k)].derivative(l).eval(zc);
    const auto jlu = J.fullPivLu();
    if (!jlu.isInvertible())
      throw std::domain_error("chart_coordinates: point outside chart (jacobian degenerate)");
    const Eigen::VectorXcd step = jlu.solve(resid);
    if (!step.allFinite() || step.norm() > 1e6)
      throw std::domain_error("chart_coordinates: point outside chart (inversion diverged)");
    z -= step;
  }
  throw std::domain_error("chart_coordinates: point outside chart (inversion diverged)");
}

// --- restriction and normalization -------------------------------------------

TruncatedSeries restrict_psi(const HermitianForm& f, const ChartPoint& x, int cutoff) {
  const int n = x.n();
  if (f.N != x.ambient()) throw std::invalid_argument("restrict_psi: dimension mismatch");
  const CVector xn = normalized_base(x);
  const auto y = embed_map(x, cutoff);

  // Y_alpha = y(z)^alpha for every basis exponent.
  const std::size_t dim = f.dim();
  std::vector<HoloPoly> Y(dim);
  for (std::size_t a = 0; a < dim; ++a) {
    HoloPoly t = HoloPoly::constant(n, cutoff, 1.0);
    const MultiIndex& mi = f.bas.indices[a];
    for (int j = 0; j < f.N; ++j)
      for (int rep = 0; rep < mi[std::size_t(j)]; ++rep) t = mul(t, y[std::size_t(j)]);
    Y[a] = t;
  }

  // c = f(xhat, xhat-bar), A(z) = f(y(z), xhat-bar)
  const Complex c = eval_form(f, xn, xn);
  if (std::abs(c) < 1e-300)
    throw std::domain_error("restrict_psi: base point on the zero set of f");
  HoloPoly A(n, cutoff);
  CVector xbar_monomials(dim);
  for (std::size_t b = 0; b < dim; ++b) {
    Complex m = 1.0;
    const MultiIndex& mb = f.bas.indices[b];
    for (int j = 0; j < f.N; ++j)
      for (int rep = 0; rep < mb[std::size_t(j)]; ++rep) m *= std::conj(xn[std::size_t(j)]);
    xbar_monomials[b] = m;
  }
  for (std::size_t a = 0; a < dim; ++a) {
    Complex coef = 0.0;
    for (std::size_t b = 0; b < dim; ++b) coef += f.at(a, b) * xbar_monomials[b];
    if (coef != Complex(0)) A = add(A, scale(Y[a], coef));
  }

  // D(z, zbar) = f(y(z), y(z)-bar)
  TruncatedSeries D(n, cutoff);
  for (std::size_t b = 0; b < dim; ++b) {
    HoloPoly Sb(n, cutoff);
    for (std::size_t a = 0; a < dim; ++a)
      if (f.at(a, b) != Complex(0)) Sb = add(Sb, scale(Y[a], f.at(a, b)));
    if (Sb.coeffs.empty()) continue;
    D = add(D, mul(holo_series(Sb), conj(holo_series(Y[b]))));
  }

  const TruncatedSeries As = holo_series(A);
  TruncatedSeries psi = mul(mul(As, conj(As)), reciprocal(D));
  psi = scale(psi, 1.0 / c);
  // pin the constant term to exactly 1 (it is 1 up to rounding by construction)
  const MultiIndex zero(std::size_t(n), 0);
  const Complex c0 = psi.coeff(zero, zero);
  if (std::abs(c0 - 1.0) > 1e-8)
    throw std::domain_error("restrict_psi: normalization failed (constant term far from 1)");
  psi = scale(psi, 1.0 / c0);
  psi.set(zero, zero, 1.0);
  return psi;
}

TruncatedSeries diastasis(const TruncatedSeries& psi_R) { return scale(log(psi_R), -1.0); }

ChartPoint bochner_normalize(const HermitianForm& R, const CVector& base, int cutoff) {
  ChartPoint cp = affine_chart(base);
  const int n = cp.n();

  TruncatedSeries phi = diastasis(restrict_psi(R, cp, cutoff));

  // Linear part: frame <- frame * L^{-H}, H = L L^H the diastasis Hessian.
  Eigen::MatrixXcd H(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      MultiIndex a(std::size_t(n), 0), b(std::size_t(n), 0);
      a[std::size_t(i)] = 1;
      b[std::size_t(j)] = 1;
      H(i, j) = phi.coeff(a, b);
    }
  H = 0.5 * (H + H.adjoint().eval());  // symmetrize rounding
  Eigen::LLT<Eigen::MatrixXcd> llt(H);
  if (llt.info() != Eigen::Success)
    throw std::domain_error("bochner_normalize: diastasis Hessian not positive definite "
                            "(SGCS-2 violated at base point)");
  const Eigen::MatrixXcd L = llt.matrixL();
  const Eigen::MatrixXcd Finv_part =
      L.adjoint().triangularView<Eigen::Upper>().solve(Eigen::MatrixXcd::Identity(n, n));
  cp.frame = from_eigen(to_eigen(cp.frame) * Finv_part);

  // Higher orders: kill coefficients (alpha, e_j), |alpha| = k, order by order.
  // A correction at order k only perturbs orders > k, so one pass suffices;
  // orders that are already clean (all of them, for FS-type data) are skipped
  // without recomputing the series.
  phi = diastasis(restrict_psi(R, cp, cutoff));
  for (int k = 2; k <= cutoff - 1; ++k) {
    std::vector<HoloPoly> h(std::size_t(n), HoloPoly(n, cutoff));
    double worst = 0.0;
    for (const auto& [key, c] : phi.coeffs) {
      if (degree(key.second) != 1 || degree(key.first) != k) continue;
      int j = 0;
      while (key.second[std::size_t(j)] == 0) ++j;
      h[std::size_t(j)].add_to(key.first, -c);
      worst = std::max(worst, std::abs(c));
    }
    if (worst < 5e-15) continue;
    // current map M(z) = frame*z + higher(z); new map M(z + h(z))
    auto M = offset_map(cp, cutoff);
    std::vector<HoloPoly> shift(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      shift[std::size_t(i)] = add(HoloPoly::variable(n, cutoff, i), h[std::size_t(i)]);
    std::vector<HoloPoly> M2(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) M2[std::size_t(i)] = compose(M[std::size_t(i)], shift);
    // Split back into linear frame + higher terms. The recursion determines the
    // map only through degree cutoff-1 (degree-k map terms first touch Phi at
    // degree k+1); composition byproducts beyond that are dropped.
    std::vector<CVector> frame(std::size_t(n), CVector(std::size_t(n), Complex(0)));
    std::vector<HoloPoly> higher(std::size_t(n), HoloPoly(n, cutoff));
    for (int i = 0; i < n; ++i)
      for (const auto& [a, c] : M2[std::size_t(i)].coeffs) {
        if (degree(a) == 1) {
          int l = 0;
          while (a[std::size_t(l)] == 0) ++l;
          frame[std::size_t(i)][std::size_t(l)] = c;
        } else if (degree(a) >= 2 && degree(a) <= cutoff - 1) {
          higher[std::size_t(i)].add_to(a, c);
        }
      }
    cp.frame = frame;
    cp.higher = higher;
    phi = diastasis(restrict_psi(R, cp, cutoff));
  }

  // Template check: no terms with |alpha| <= 1 or |beta| <= 1 beyond the identity block.
  for (const auto& [key, c] : phi.coeffs) {
    const int da = degree(key.first), db = degree(key.second);
    if (da >= 2 && db >= 2) continue;
    Complex expect = 0.0;
    if (da == 1 && db == 1) expect = (key.first == key.second) ? 1.0 : 0.0;
    if (std::abs(c - expect) > 1e-12)
      throw std::runtime_error("bochner_normalize: residual low-order coefficient " +
                               std::to_string(std::abs(c - expect)));
  }
  return cp;
}

MetricData metric_series(const TruncatedSeries& phi) {
  const int n = phi.n;
  MetricData md;
  md.n = n;
  md.omega.resize(std::size_t(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      md.omega[std::size_t(i * n + j)] = d_zbar(d_z(phi, i), j);
  // determinant by Leibniz expansion (n is small)
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[std::size_t(i)] = i;
  TruncatedSeries det(n, md.omega[0].cutoff);
  do {
    int inversions = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (perm[std::size_t(i)] > perm[std::size_t(j)]) ++inversions;
    TruncatedSeries term = TruncatedSeries::constant(n, det.cutoff, (inversions % 2) ? -1.0 : 1.0);
    for (int i = 0; i < n; ++i) term = mul(term, md.at(i, perm[std::size_t(i)]));
    det = add(det, term);
  } while (std::next_permutation(perm.begin(), perm.end()));
  md.det = det;
  return md;
}

namespace {

void check_template(const TruncatedSeries& s, int max_low_degree, const char* what,
                    double tol) {
  // Constant term must be 1; pure terms and off-template low-order terms must vanish.
  const MultiIndex zero(std::size_t(s.n), 0);
  if (std::abs(s.coeff(zero, zero) - 1.0) > tol)
    throw std::domain_error(std::string(what) + ": constant term differs from 1");
  for (const auto& [key, c] : s.coeffs) {
    const int da = degree(key.first), db = degree(key.second);
    if (da + db > max_low_degree || (da >= 1 && db >= 1)) continue;
    if (da == 0 && db == 0) continue;
    if (std::abs(c) > tol)
      throw std::domain_error(std::string(what) + ": forbidden pure term of magnitude " +
                              std::to_string(std::abs(c)));
  }
}

}  // namespace

Truncations truncations(const TruncatedSeries& psi_R, const TruncatedSeries& omega_det,
                        const TruncatedSeries& psi_P, double template_tol) {
  const int n = psi_R.n;
  const MultiIndex zero(std::size_t(n), 0);

  // psi_R: 1 - |z|^2 + (|a|=|b|=2); everything else of degree <= 4 must vanish.
  check_template(psi_R, 4, "truncations(psi_R)", template_tol);
  TruncatedSeries r4(n, psi_R.cutoff);
  r4.set(zero, zero, 1.0);
  for (const auto& [key, c] : psi_R.coeffs) {
    const int da = degree(key.first), db = degree(key.second);
    if (da == 1 && db == 1) {
      const Complex expect = (key.first == key.second) ? Complex(-1.0) : Complex(0.0);
      if (std::abs(c - expect) > template_tol)
        throw std::domain_error("truncations(psi_R): (1,1) block differs from -|z|^2");
      if (key.first == key.second) r4.set(key.first, key.second, -1.0);
      continue;
    }
    if (da + db > 4 || (da == 0 && db == 0)) continue;
    if (da == 2 && db == 2) {
      r4.set(key.first, key.second, c);
      continue;
    }
    if (std::abs(c) > template_tol)
      throw std::domain_error("truncations(psi_R): forbidden term of degree <= 4");
  }

  auto low_block = [&](const TruncatedSeries& s, const char* what) {
    check_template(s, 2, what, template_tol);
    TruncatedSeries t(n, s.cutoff);
    t.set(zero, zero, 1.0);
    for (const auto& [key, c] : s.coeffs) {
      const int da = degree(key.first), db = degree(key.second);
      if (da == 1 && db == 1) t.set(key.first, key.second, c);
    }
    return t;
  };

  Truncations out;
  out.psi_R4 = r4;
  out.omega2 = low_block(omega_det, "truncations(omega)");
  out.psi_P2 = low_block(psi_P, "truncations(psi_P)");
  return out;
}

Complex Approximant::eval(const CVector& z) const {
  const Complex om = omega_det.eval(z);
  if (om.real() <= 0.0)
    throw std::domain_error("approximant: Omega(zhat) <= 0 (chart radius exceeded)");
  const Complex base = data.psi_R4.eval(z);
  return pow_int(base, m) * data.psi_P2.eval(z) * data.omega2.eval(z) / om;
}

Approximant make_approximant(int m, const Truncations& data, const TruncatedSeries& omega_det) {
  if (m < 0) throw std::invalid_argument("approximant: m >= 0 required");
  return Approximant{data, omega_det, m};
}

}  // namespace hsq
