#include "hsq/forms.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace hsq {

namespace {

Complex pow_vec(const CVector& v, const MultiIndex& a) {
  Complex r = 1.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (int k = 0; k < a[i]; ++k) r *= v[i];
  return r;
}

}  // namespace

HermitianForm to_floating(const ExactHermitianForm& f) {
  HermitianForm g(f.N, f.d);
  for (std::size_t i = 0; i < f.mat.size(); ++i) g.mat[i] = f.mat[i].to_complex();
  return g;
}

Section Section::monomial(int N_, int k_, int var) {
  Section s(N_, k_);
  MultiIndex a(std::size_t(N_), 0);
  a[std::size_t(var)] = k_;
  s.coeffs[s.bas.index_of(a)] = 1.0;
  return s;
}

Complex Section::eval(const CVector& z) const {
  Complex r = 0.0;
  for (std::size_t i = 0; i < bas.size(); ++i)
    if (coeffs[i] != Complex(0)) r += coeffs[i] * pow_vec(z, bas.indices[i]);
  return r;
}

double hermitian_defect(const HermitianForm& f) {
  double scale = 0.0, defect = 0.0;
  const std::size_t n = f.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      scale = std::max(scale, std::abs(f.at(i, j)));
      defect = std::max(defect, std::abs(f.at(i, j) - std::conj(f.at(j, i))));
    }
  return scale > 0 ? defect / std::max(1.0, scale) : defect;
}

bool is_hermitian(const ExactHermitianForm& f) {
  const std::size_t n = f.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      if (!(f.at(i, j) == f.at(j, i).conj())) return false;
  return true;
}

HermitianForm unit_form(int N) {
  HermitianForm f(N, 0);
  f.at(0, 0) = 1.0;
  return f;
}

ExactHermitianForm unit_form_exact(int N) {
  ExactHermitianForm f(N, 0);
  f.at(0, 0) = QComplex(1);
  return f;
}

ExactHermitianForm norm_power_exact(int ell, int N) {
  if (ell < 0) throw std::invalid_argument("norm_power: ell >= 0 required");
  ExactHermitianForm f(N, ell);
  for (std::size_t i = 0; i < f.dim(); ++i)
    f.at(i, i) = QComplex(mpq_class(multinomial(ell, f.bas.indices[i])));
  return f;
}

HermitianForm norm_power(int ell, int N) { return to_floating(norm_power_exact(ell, N)); }

Complex eval_form(const HermitianForm& f, const CVector& v, const CVector& w) {
  if ((int)v.size() != f.N || (int)w.size() != f.N)
    throw std::invalid_argument("eval_form: vector length != N");
  const std::size_t n = f.dim();
  // Precompute monomial values on both arguments.
  CVector mv(n), mw(n);
  for (std::size_t i = 0; i < n; ++i) {
    mv[i] = pow_vec(v, f.bas.indices[i]);
    mw[i] = std::conj(pow_vec(w, f.bas.indices[i]));
  }
  Complex r = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (mv[i] == Complex(0)) continue;
    Complex row = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (f.at(i, j) != Complex(0)) row += f.at(i, j) * mw[j];
    r += mv[i] * row;
  }
  return r;
}

template <class Scalar>
static BasicHermitianForm<Scalar> multiply_impl(const BasicHermitianForm<Scalar>& f,
                                                const BasicHermitianForm<Scalar>& g) {
  if (f.N != g.N) throw std::invalid_argument("multiply: variable counts differ");
  BasicHermitianForm<Scalar> h(f.N, f.d + g.d);
  const auto zero = Scalar(0);
  for (std::size_t i1 = 0; i1 < f.dim(); ++i1)
    for (std::size_t j1 = 0; j1 < f.dim(); ++j1) {
      const Scalar& a = f.at(i1, j1);
      if (a == zero) continue;
      for (std::size_t i2 = 0; i2 < g.dim(); ++i2)
        for (std::size_t j2 = 0; j2 < g.dim(); ++j2) {
          const Scalar& b = g.at(i2, j2);
          if (b == zero) continue;
          h.at(add_indices(f.bas.indices[i1], g.bas.indices[i2]),
               add_indices(f.bas.indices[j1], g.bas.indices[j2])) += a * b;
        }
    }
  return h;
}

HermitianForm multiply(const HermitianForm& f, const HermitianForm& g) {
  return multiply_impl(f, g);
}
ExactHermitianForm multiply(const ExactHermitianForm& f, const ExactHermitianForm& g) {
  return multiply_impl(f, g);
}

HermitianForm pullback(const HermitianForm& f, const std::vector<CVector>& U) {
  if ((int)U.size() != f.N) throw std::invalid_argument("pullback: matrix size != N");
  // Expand (Uz)^alpha over the degree-d basis once per basis element.
  const std::size_t n = f.dim();
  std::vector<CVector> M(n, CVector(n, Complex(0)));  // M[a][gamma] = coeff of z^gamma in (Uz)^a
  for (std::size_t a = 0; a < n; ++a) {
    // Multiply the linear factors one exponent at a time over the graded bases.
    std::vector<std::pair<MultiIndex, Complex>> poly = {{MultiIndex(std::size_t(f.N), 0), 1.0}};
    for (int var = 0; var < f.N; ++var)
      for (int rep = 0; rep < f.bas.indices[a][std::size_t(var)]; ++rep) {
        std::map<MultiIndex, Complex> next;
        for (const auto& [mi, c] : poly)
          for (int j = 0; j < f.N; ++j) {
            if (U[std::size_t(var)][std::size_t(j)] == Complex(0)) continue;
            MultiIndex m2 = mi;
            m2[std::size_t(j)] += 1;
            next[m2] += c * U[std::size_t(var)][std::size_t(j)];
          }
        poly.assign(next.begin(), next.end());
      }
    for (const auto& [mi, c] : poly) M[a][f.bas.index_of(mi)] = c;
  }
  HermitianForm h(f.N, f.d);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (f.at(a, b) == Complex(0)) continue;
      for (std::size_t g1 = 0; g1 < n; ++g1) {
        if (M[a][g1] == Complex(0)) continue;
        for (std::size_t g2 = 0; g2 < n; ++g2)
          h.at(g1, g2) += f.at(a, b) * M[a][g1] * std::conj(M[b][g2]);
      }
    }
  return h;
}

double cauchy_schwarz(const HermitianForm& f, const CVector& x, const CVector& y) {
  const Complex fxx = eval_form(f, x, x);
  const Complex fyy = eval_form(f, y, y);
  if (std::abs(fxx) < 1e-300 || std::abs(fyy) < 1e-300)
    throw std::domain_error("cauchy_schwarz: argument on the zero set of f");
  const Complex fxy = eval_form(f, x, y);
  const Complex fyx = eval_form(f, y, x);
  return std::real(fxy * fyx / (fxx * fyy));
}

Complex d_zbar(const HermitianForm& f, const CVector& z, int i) {
  Complex r = 0.0;
  const std::size_t n = f.dim();
  for (std::size_t a = 0; a < n; ++a) {
    Complex va = 1.0;
    {
      const MultiIndex& mi = f.bas.indices[a];
      for (std::size_t t = 0; t < mi.size(); ++t)
        for (int k = 0; k < mi[t]; ++k) va *= z[t];
    }
    if (va == Complex(0)) continue;
    for (std::size_t b = 0; b < n; ++b) {
      if (f.at(a, b) == Complex(0)) continue;
      const MultiIndex& mb = f.bas.indices[b];
      if (mb[std::size_t(i)] == 0) continue;
      Complex der = double(mb[std::size_t(i)]);
      for (std::size_t t = 0; t < mb.size(); ++t) {
        const int e = mb[t] - (int(t) == i ? 1 : 0);
        for (int k = 0; k < e; ++k) der *= std::conj(z[t]);
      }
      r += f.at(a, b) * va * der;
    }
  }
  return r;
}

SymmetryReport hermitian_symmetry_check(const HermitianForm& f, int sample_pairs,
                                        std::uint64_t seed) {
  Rng rng(seed);
  SymmetryReport rep;
  for (int k = 0; k < sample_pairs; ++k) {
    CVector v = sphere_point(f.N, rng);
    CVector w = sphere_point(f.N, rng);
    const double defect = std::abs(eval_form(f, v, w) - std::conj(eval_form(f, w, v)));
    if (defect > rep.max_defect) {
      rep.max_defect = defect;
      rep.witness_v = v;
      rep.witness_w = w;
    }
  }
  return rep;
}

// --- JSON -------------------------------------------------------------------

namespace {

Complex json_scalar(const nlohmann::json& v) {
  if (v.is_string()) return {parse_rational(v.get<std::string>()).get_d(), 0.0};
  return {v.get<double>(), 0.0};
}

}  // namespace

HermitianForm form_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("form JSON: ") + e.what());
  }
  const int N = j.at("N").get<int>();
  const int d = j.at("d").get<int>();
  if (N < 1 || d < 0) throw std::invalid_argument("form JSON: need N >= 1, d >= 0");
  HermitianForm f(N, d);
  std::vector<bool> seen(f.dim() * f.dim(), false);
  for (const auto& e : j.at("entries")) {
    const MultiIndex a = e.at("alpha").get<MultiIndex>();
    const MultiIndex b = e.at("beta").get<MultiIndex>();
    if ((int)a.size() != N || (int)b.size() != N || degree(a) != d || degree(b) != d)
      throw std::invalid_argument("form JSON: entry index of wrong length or degree");
    const Complex c(json_scalar(e.at("re")).real(), json_scalar(e.at("im")).real());
    const std::size_t i = f.bas.index_of(a), k = f.bas.index_of(b);
    auto put = [&](std::size_t r, std::size_t s, Complex v) {
      if (seen[r * f.dim() + s] && std::abs(f.at(r, s) - v) > 1e-12 * (1.0 + std::abs(v)))
        throw std::invalid_argument("form JSON: inconsistent duplicate entry");
      f.at(r, s) = v;
      seen[r * f.dim() + s] = true;
    };
    put(i, k, c);
    put(k, i, std::conj(c));  // Hermitian closure
  }
  const double defect = hermitian_defect(f);
  if (defect > 1e-12) throw std::invalid_argument("form JSON: matrix not Hermitian");
  return f;
}

HermitianForm load_form(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return form_from_json(ss.str());
}

std::string form_to_json(const HermitianForm& f) {
  nlohmann::json entries = nlohmann::json::array();
  for (std::size_t i = 0; i < f.dim(); ++i)
    for (std::size_t j = i; j < f.dim(); ++j) {
      if (f.at(i, j) == Complex(0)) continue;
      entries.push_back({{"alpha", f.bas.indices[i]},
                         {"beta", f.bas.indices[j]},
                         {"re", f.at(i, j).real()},
                         {"im", f.at(i, j).imag()}});
    }
  nlohmann::json j = {{"N", f.N}, {"d", f.d}, {"entries", entries}};
  return j.dump(2);
}

}  // namespace hsq
