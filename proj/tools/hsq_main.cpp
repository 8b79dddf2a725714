// Command-line front end: certification runs, exact operator computations,
// asymptotic sweeps, decomposition studies, Lemma-5.2 values, SGCS sampling.
//
// Exit codes: 0 success, 1 input error, 2 search exhausted, 3 hypothesis
// violation, 4 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "hsq/certify.hpp"
#include "hsq/forms.hpp"
#include "hsq/proj_operator.hpp"
#include "hsq/quad_lab.hpp"
#include "hsq/sgcs.hpp"

namespace {

using namespace hsq;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitExhausted = 2;
constexpr int kExitHypothesis = 3;
constexpr int kExitNumerical = 4;

void write_output(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::fputs(text.c_str(), stdout);
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::invalid_argument("cannot open output file " + out_path);
  out << text;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v + 0.0);
  return buf;
}

// "1", "fs:e", or a JSON file path.
HermitianForm parse_p_spec(const std::string& spec, int N) {
  if (spec == "1") return unit_form(N);
  if (spec.rfind("fs:", 0) == 0) return fs_power(std::stoi(spec.substr(3)), N);
  if (spec == "fs") return fubini_study(N);
  return load_form(spec);
}

struct MRange {
  std::vector<int> values;
};

// "4,16,64" or "1..60"
MRange parse_m_range(const std::string& text) {
  MRange out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const int lo = std::stoi(text.substr(0, dots));
    const int hi = std::stoi(text.substr(dots + 2));
    if (lo > hi) throw std::invalid_argument("empty m range " + text);
    for (int m = lo; m <= hi; ++m) out.values.push_back(m);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.values.push_back(std::stoi(item));
  if (out.values.empty()) throw std::invalid_argument("empty m range " + text);
  return out;
}

int parse_mono_spec(const std::string& spec, int N) {
  if (spec.rfind("mono:", 0) != 0)
    throw std::invalid_argument("section spec must be mono:VAR, got " + spec);
  const int var = std::stoi(spec.substr(5));
  if (var < 0 || var >= N) throw std::invalid_argument("section variable out of range");
  return var;
}

int cmd_certify(const std::string& form_path, int ell_max, double tol, std::uint64_t seed,
                const std::string& out) {
  const HermitianForm f = load_form(form_path);
  MinimalPowerResult res;
  try {
    res = minimal_power(f, ell_max, tol, seed);
  } catch (const HypothesisViolation& hv) {
    std::fprintf(stderr, "hypothesis violation: %s\nwitness:", hv.what());
    for (const auto& c : hv.witness) std::fprintf(stderr, " %.17g%+.17gi", c.real(), c.imag());
    std::fprintf(stderr, "\n");
    return kExitHypothesis;
  }
  if (!res.certificate) {
    std::fprintf(stderr, "no certificate up to ell_max=%d; min eigenvalue trajectory:\n",
                 res.ell_max);
    for (std::size_t i = 0; i < res.min_eig_trajectory.size(); ++i)
      std::fprintf(stderr, "  ell=%zu min_eig=%.17g\n", i, res.min_eig_trajectory[i]);
    return kExitExhausted;
  }
  write_output(out, certificate_to_json(*res.certificate) + "\n");
  return kExitOk;
}

int cmd_operator(int N, int m, int e, bool exact, const std::string& format,
                 const std::string& out) {
  const OperatorSetup setup{N, m, e};
  const ExactMatrix G = gram_matrix(setup);
  const ExactMatrix K = operator_matrix(setup);
  std::ostringstream os;
  if (format == "json") {
    os << "{\n  \"N\": " << N << ", \"m\": " << m << ", \"e\": " << e << ",\n";
    auto emit = [&](const char* name, const ExactMatrix& M) {
      os << "  \"" << name << "\": [";
      for (std::size_t i = 0; i < M.dim; ++i) {
        os << (i ? ", [" : "[");
        for (std::size_t j = 0; j < M.dim; ++j) {
          if (j) os << ", ";
          if (exact)
            os << '"' << M.at(i, j).str() << '"';
          else
            os << fmt17(M.at(i, j).to_double());
        }
        os << "]";
      }
      os << "]";
    };
    emit("gram", G);
    os << ",\n";
    emit("operator", K);
    os << "\n}\n";
  } else {
    os << "matrix,a,b,value" << (exact ? ",exact" : "") << "\n";
    auto emit = [&](const char* name, const ExactMatrix& M) {
      for (std::size_t i = 0; i < M.dim; ++i)
        for (std::size_t j = 0; j < M.dim; ++j) {
          if (M.at(i, j).is_zero() && i != j) continue;
          os << name << ',' << i << ',' << j << ',' << fmt17(M.at(i, j).to_double());
          if (exact) os << ',' << M.at(i, j).str();
          os << '\n';
        }
    };
    emit("gram", G);
    emit("operator", K);
  }
  write_output(out, os.str());
  return kExitOk;
}

int cmd_sweep(int N, const std::string& p_spec, const std::string& s_spec,
              const std::string& m_range, bool exact, const std::string& out) {
  int e = 0;
  if (p_spec == "1")
    e = 0;
  else if (p_spec.rfind("fs:", 0) == 0)
    e = std::stoi(p_spec.substr(3));
  else if (p_spec == "fs")
    e = 1;
  else
    throw std::invalid_argument("sweep supports P in {1, fs:e} (exact mode), got " + p_spec);
  const int var = parse_mono_spec(s_spec, N);
  const MRange range = parse_m_range(m_range);
  const int lo = *std::min_element(range.values.begin(), range.values.end());
  const int hi = *std::max_element(range.values.begin(), range.values.end());
  if (lo < 1) throw std::invalid_argument("sweep needs m >= 1");
  auto rows = asymptotic_sweep(N, e, var, lo, hi);
  // keep only requested m when a comma list was given
  std::vector<SweepRow> kept;
  for (const auto& row : rows)
    if (std::find(range.values.begin(), range.values.end(), row.m) != range.values.end())
      kept.push_back(row);
  write_output(out, sweep_to_csv(kept, exact));
  return kExitOk;
}

int cmd_decompose(const std::string& r_spec, const std::string& p_spec,
                  const std::string& s_spec, const std::string& m_range,
                  const std::string& radius_spec, int grid_order, double r9,
                  const std::string& out) {
  const int N = 2;
  const HermitianForm R = (r_spec == "fs") ? fubini_study(N) : load_form(r_spec);
  const HermitianForm P = parse_p_spec(p_spec, N);
  if (R.N != 2 || P.N != 2) throw std::invalid_argument("decompose runs on P^1 (N = 2) data");
  const int var = parse_mono_spec(s_spec, N);
  const MRange range = parse_m_range(m_range);
  QuadratureGrid grid;
  grid.chart_order = grid_order;

  // exact references are available for FS-power data
  const bool exact_ok = (r_spec == "fs") && (p_spec == "1" || p_spec == "fs" ||
                                             p_spec.rfind("fs:", 0) == 0);
  const int e = !exact_ok ? 0 : (p_spec == "1" ? 0 : (p_spec == "fs" ? 1 : std::stoi(p_spec.substr(3))));

  std::ostringstream os;
  os << "m,r,I_re,I_im,II_re,II_im,III_re,III_im,K_re,K_im,norm_sq,defect\n";
  for (int m : range.values) {
    double radius = 0.0;
    if (radius_spec.rfind("fixed:", 0) == 0) {
      radius = std::stod(radius_spec.substr(6));
    } else if (radius_spec == "auto") {
      const auto sched = radius_schedule(double(m), N - 1, r9);
      if (!sched.feasible) {
        std::fprintf(stderr,
                     "radius schedule infeasible at m=%d (lower %.6g > upper %.6g); "
                     "smallest feasible m0 ~ %.6g for r9_hat=%.6g; use --radius fixed:VALUE\n",
                     m, sched.lower, sched.upper, sched.m0, r9);
        return kExitInput;
      }
      radius = sched.r;
    } else {
      throw std::invalid_argument("radius spec must be auto or fixed:VALUE");
    }
    const Section s = Section::monomial(N, m + (exact_ok ? e : P.d), var);
    std::optional<std::pair<double, double>> refs;
    if (exact_ok) {
      const OperatorSetup setup{N, m, e};
      const ExactMatrix K = operator_matrix(setup);
      const ExactMatrix G = gram_matrix(setup);
      MultiIndex alpha(std::size_t(N), 0);
      alpha[std::size_t(var)] = m + e;
      const std::size_t idx = MonomialBasis(N, m + e).index_of(alpha);
      refs = std::make_pair(K.at(idx, idx).to_double(), G.at(idx, idx).to_double());
    }
    const DecompositionReport rep = decompose(R, P, m, s, radius, grid, refs);
    os << rep.m << ',' << fmt17(rep.r) << ',' << fmt17(rep.I.real()) << ','
       << fmt17(rep.I.imag()) << ',' << fmt17(rep.II.real()) << ',' << fmt17(rep.II.imag())
       << ',' << fmt17(rep.III.real()) << ',' << fmt17(rep.III.imag()) << ','
       << fmt17(rep.K_ss.real()) << ',' << fmt17(rep.K_ss.imag()) << ',' << fmt17(rep.norm_sq)
       << ',' << fmt17(rep.closure_defect) << '\n';
  }
  write_output(out, os.str());
  return kExitOk;
}

int cmd_lemma52(int n, int k, const std::string& a_text, int m, bool check,
                const std::string& out) {
  const mpq_class a = parse_rational(a_text);
  const ExactScalar value = lemma52(n, k, a, m);
  std::ostringstream os;
  os << value.str() << "\n" << fmt17(value.to_double()) << "\n";
  if (check) {
    const double quad = lemma52_quadrature(n, k, a.get_d(), m);
    const double rel = std::abs(value.to_double() - quad) / std::max(1e-300, std::abs(quad));
    os << "quadrature " << fmt17(quad) << " rel_diff " << fmt17(rel) << "\n";
    if (rel > 1e-10) {
      write_output(out, os.str());
      return kExitNumerical;
    }
  }
  write_output(out, os.str());
  return kExitOk;
}

int cmd_sgcs_check(const std::string& form_path, int samples, std::uint64_t seed,
                   const std::string& out) {
  const HermitianForm R = load_form(form_path);
  const SgcsReport rep = sgcs_sample_check(R, samples, seed);
  std::ostringstream os;
  os << "pairs_checked," << rep.pairs_checked << "\n";
  os << "max_psi," << fmt17(rep.max_psi) << "\n";
  os << "sgcs1_violated," << (rep.sgcs1_violated ? 1 : 0) << "\n";
  os << "min_hessian_eig," << fmt17(rep.min_hessian_eig) << "\n";
  os << "min_affine_hessian_eig," << fmt17(rep.min_affine_hessian_eig) << "\n";
  if (rep.sgcs1_violated) {
    os << "witness_x";
    for (const auto& c : rep.psi_witness_x) os << ',' << fmt17(c.real()) << ',' << fmt17(c.imag());
    os << "\nwitness_y";
    for (const auto& c : rep.psi_witness_y) os << ',' << fmt17(c.real()) << ',' << fmt17(c.imag());
    os << "\n";
  }
  write_output(out, os.str());
  return (rep.sgcs1_violated || rep.min_hessian_eig <= 0.0) ? kExitHypothesis : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hermitian sums of squares: certification and integral-operator asymptotics"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::uint64_t seed = 42;
  double tol = 1e-9;
  std::string out = "-";
  std::string format = "csv";
  bool exact = false;
  app.add_option("--seed", seed, "random seed (all randomness flows from it)");
  app.add_option("--tol", tol, "PSD tolerance")->check(CLI::PositiveNumber);
  app.add_option("--out", out, "output path (default stdout)");
  app.add_option("--format", format, "output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--exact", exact, "dump exact values as p/q * pi^k strings");

  auto* certify = app.add_subcommand("certify", "Quillen certification of a form");
  std::string form_path;
  int ell_max = 64;
  certify->add_option("form", form_path, "HermitianForm JSON file")->required();
  certify->add_option("--ell-max", ell_max, "largest norm power to try");

  auto* op = app.add_subcommand("operator", "exact gram and integral-operator matrices");
  int op_N = 2, op_m = 1, op_e = 0;
  op->add_option("--N", op_N, "ambient variable count")->required();
  op->add_option("--m", op_m, "power of R = FS")->required();
  op->add_option("--e", op_e, "P = FS^e twist");

  auto* sweep = app.add_subcommand("sweep", "exact asymptotic sweep over m");
  int sw_N = 2;
  std::string sw_P = "1", sw_s = "mono:0", sw_m = "1..60";
  sweep->add_option("--N", sw_N, "ambient variable count");
  sweep->add_option("--P", sw_P, "P spec: 1 or fs:e");
  sweep->add_option("--s", sw_s, "section spec: mono:VAR");
  sweep->add_option("--m", sw_m, "m range: lo..hi or comma list");

  auto* dec = app.add_subcommand("decompose", "near/far decomposition study on P^1");
  std::string dec_R = "fs", dec_P = "1", dec_s = "mono:0", dec_m = "4,16,64";
  std::string dec_radius = "fixed:0.4";
  int dec_order = 48;
  double dec_r9 = 0.5;
  dec->add_option("--R", dec_R, "R spec: fs or a JSON file");
  dec->add_option("--P", dec_P, "P spec: 1, fs:e, or a JSON file");
  dec->add_option("--s", dec_s, "section spec: mono:VAR");
  dec->add_option("--m", dec_m, "m list or range");
  dec->add_option("--radius", dec_radius, "auto or fixed:VALUE");
  dec->add_option("--grid-order", dec_order, "quadrature nodes per direction");
  dec->add_option("--r9", dec_r9, "fitted r9 for the auto radius schedule");

  auto* l52 = app.add_subcommand("lemma52", "closed-form ball integral");
  int l_n = 1, l_k = 0, l_m = 0;
  std::string l_a = "1";
  bool l_check = false;
  l52->add_option("n", l_n, "complex dimension")->required();
  l52->add_option("k", l_k, "|z|^{2k} exponent")->required();
  l52->add_option("a", l_a, "a > 0 (rational like 1/2 accepted)")->required();
  l52->add_option("m", l_m, "(1 - a|z|^2)^m exponent")->required();
  l52->add_flag("--check", l_check, "cross-check against radial quadrature");

  auto* sgcs = app.add_subcommand("sgcs-check", "sample the strong Cauchy-Schwarz condition");
  std::string sgcs_form;
  int sgcs_samples = 10000;
  sgcs->add_option("form", sgcs_form, "HermitianForm JSON file")->required();
  sgcs->add_option("--samples", sgcs_samples, "number of sampled pairs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (certify->parsed()) return cmd_certify(form_path, ell_max, tol, seed, out);
    if (op->parsed()) return cmd_operator(op_N, op_m, op_e, exact, format, out);
    if (sweep->parsed()) return cmd_sweep(sw_N, sw_P, sw_s, sw_m, exact, out);
    if (dec->parsed())
      return cmd_decompose(dec_R, dec_P, dec_s, dec_m, dec_radius, dec_order, dec_r9, out);
    if (l52->parsed()) return cmd_lemma52(l_n, l_k, l_a, l_m, l_check, out);
    if (sgcs->parsed()) return cmd_sgcs_check(sgcs_form, sgcs_samples, seed, out);
  } catch (const HypothesisViolation& e) {
    std::fprintf(stderr, "hypothesis violation: %s\n", e.what());
    return kExitHypothesis;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInput;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitInput;
}
