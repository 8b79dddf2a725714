#pragma once

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace hsq {

inline mpz_class factorial_z(unsigned long k) {
  mpz_class r;
  mpz_fac_ui(r.get_mpz_t(), k);
  return r;
}

// Parses "p/q", "p", or a decimal literal into an exact rational.
inline mpq_class parse_rational(const std::string& s) {
  if (s.find('/') != std::string::npos) {
    mpq_class q;
    if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + s);
    q.canonicalize();
    return q;
  }
  const auto dot = s.find('.');
  const auto exp = s.find_first_of("eE");
  if (dot == std::string::npos && exp == std::string::npos) {
    mpq_class q;
    if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + s);
    q.canonicalize();
    return q;
  }
  // Decimal literal: exact conversion digit by digit.
  std::string mant = s;
  long e10 = 0;
  if (exp != std::string::npos) {
    e10 = std::stol(s.substr(exp + 1));
    mant = s.substr(0, exp);
  }
  const auto d = mant.find('.');
  if (d != std::string::npos) {
    e10 -= long(mant.size() - d - 1);
    mant.erase(d, 1);
  }
  mpq_class q(mpz_class(mant), 1);
  if (e10 > 0)
    for (long i = 0; i < e10; ++i) q *= 10;
  else
    for (long i = 0; i < -e10; ++i) q /= 10;
  q.canonicalize();
  return q;
}

// A rational multiple of an integer power of pi. The value type of exact
// projective integrals: additions never silently mix different pi powers.
struct ExactScalar {
  mpq_class q = 0;
  int pi_pow = 0;

  ExactScalar() = default;
  ExactScalar(mpq_class value, int pow) : q(std::move(value)), pi_pow(pow) {}
  static ExactScalar zero() { return {}; }
  static ExactScalar rational(mpq_class v) { return {std::move(v), 0}; }

  bool is_zero() const { return q == 0; }

  ExactScalar& operator+=(const ExactScalar& o) {
    if (o.is_zero()) return *this;
    if (is_zero()) {
      *this = o;
      return *this;
    }
    if (pi_pow != o.pi_pow)
      throw std::logic_error("ExactScalar: adding distinct pi powers (" +
                             std::to_string(pi_pow) + " vs " + std::to_string(o.pi_pow) + ")");
    q += o.q;
    return *this;
  }
  ExactScalar& operator-=(const ExactScalar& o) {
    ExactScalar n = o;
    n.q = -n.q;
    return *this += n;
  }
  friend ExactScalar operator+(ExactScalar a, const ExactScalar& b) { return a += b; }
  friend ExactScalar operator-(ExactScalar a, const ExactScalar& b) { return a -= b; }
  friend ExactScalar operator*(const ExactScalar& a, const ExactScalar& b) {
    if (a.is_zero() || b.is_zero()) return {};
    return {a.q * b.q, a.pi_pow + b.pi_pow};
  }
  friend ExactScalar operator/(const ExactScalar& a, const ExactScalar& b) {
    if (b.is_zero()) throw std::domain_error("ExactScalar: division by zero");
    if (a.is_zero()) return {};
    return {a.q / b.q, a.pi_pow - b.pi_pow};
  }
  friend bool operator==(const ExactScalar& a, const ExactScalar& b) {
    if (a.is_zero() && b.is_zero()) return true;
    return a.pi_pow == b.pi_pow && a.q == b.q;
  }

  double to_double() const {
    if (is_zero()) return 0.0;
    return q.get_d() * std::pow(3.14159265358979323846264338327950288, pi_pow);
  }

  // "p/q * pi^k" (exact dump format).
  std::string str() const {
    if (is_zero()) return "0";
    return q.get_str() + " * pi^" + std::to_string(pi_pow);
  }
};

// Complex number with exact rational real/imaginary parts; the coefficient
// scalar of the exact form backend.
struct QComplex {
  mpq_class re = 0, im = 0;

  QComplex() = default;
  QComplex(mpq_class r, mpq_class i = 0) : re(std::move(r)), im(std::move(i)) {}
  QComplex(long r) : re(r) {}

  bool is_zero() const { return re == 0 && im == 0; }
  QComplex conj() const { return {re, -im}; }

  QComplex& operator+=(const QComplex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  friend QComplex operator+(QComplex a, const QComplex& b) { return a += b; }
  friend QComplex operator-(const QComplex& a, const QComplex& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend QComplex operator*(const QComplex& a, const QComplex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend bool operator==(const QComplex& a, const QComplex& b) {
    return a.re == b.re && a.im == b.im;
  }

  std::complex<double> to_complex() const { return {re.get_d(), im.get_d()}; }
};

}  // namespace hsq
