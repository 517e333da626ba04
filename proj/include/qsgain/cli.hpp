// Copyright 2026 The qsgain Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. `run` is pure apart from reading input files and
// writing the optional CSV side file, so tests drive it in-process.
//
// Exit codes: 0 certified / all checks pass, 1 analysis finished with a
// negative verdict, 2 bad input or numerical failure.

#pragma once

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "qsgain/error.hpp"
#include "qsgain/fockcheck.hpp"
#include "qsgain/io.hpp"
#include "qsgain/moments.hpp"
#include "qsgain/opa.hpp"
#include "qsgain/smallgain.hpp"
#include "qsgain/uncertainty.hpp"

namespace qsgain::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNegative = 1;
inline constexpr int kExitError = 2;

enum class Format { kText, kJson, kCsv };

struct RunConfig {
  std::string command;  // certify | freqresp | uncertainty | moments | opa | fockcheck
  std::string input;    // model file, or uncertainty file for `uncertainty`
  std::optional<std::string> uncertainty_path;
  std::optional<std::string> csv_path;
  std::optional<Format> format;  // per-command default when unset

  // certify
  std::optional<double> gamma;
  std::optional<double> delta1;
  std::optional<double> delta2;
  std::optional<Complex> coupling;
  double hurwitz_tol = 1e-9;
  double hinf_rel_tol = 1e-10;

  // freqresp
  int points = 400;
  std::optional<double> omega_min;
  std::optional<double> omega_max;

  // moments
  std::optional<double> horizon;
  std::optional<double> dt;

  // opa
  OpaParams opa;
  int sweep = 0;
  double agreement_tol = 1e-6;

  // fockcheck
  long dim = 30;
  int trials = 10;

  std::uint64_t seed = 0;
};

struct RunResult {
  int exit_code = kExitOk;
  std::string out;
  std::string err;
};

namespace detail {

inline Complex parse_complex_arg(const std::string& s, const std::string& flag) {
  const auto comma = s.find(',');
  try {
    std::size_t used = 0;
    if (comma == std::string::npos) {
      const double re = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return {re, 0.0};
    }
    const std::string a = s.substr(0, comma), b = s.substr(comma + 1);
    const double re = std::stod(a, &used);
    if (used != a.size()) throw std::invalid_argument(s);
    const double im = std::stod(b, &used);
    if (used != b.size()) throw std::invalid_argument(s);
    return {re, im};
  } catch (const std::logic_error&) {
    throw ParseError(0, 0, flag + ": expected RE,IM but got \"" + s + "\"");
  }
}

inline CertifyOptions certify_options(const RunConfig& c) {
  if (!(c.hurwitz_tol > 0.0) || !(c.hinf_rel_tol > 0.0))
    throw PreconditionError("tolerances must be positive");
  CertifyOptions opt;
  opt.hurwitz_tol = c.hurwitz_tol;
  opt.hinf.rel_tol = c.hinf_rel_tol;
  return opt;
}

inline void write_side_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError(0, 0, path + ": cannot write file");
  f << text;
}

/// Robustness parameters for a certify run: explicit flags override the
/// values derived from --uncertainty or --coupling.
inline QsiqcParams resolve_qsiqc(const RunConfig& c, const QuantumModel& model,
                                 const CertifyOptions& opt) {
  QsiqcParams q;
  if (c.uncertainty_path && c.coupling)
    throw PreconditionError("--uncertainty and --coupling are mutually exclusive");
  if (c.uncertainty_path) q = qsiqc_params(io::load_uncertainty(*c.uncertainty_path), opt.hinf);
  if (c.coupling) q = qsiqc_params(uncertainty_from_model(model, *c.coupling), opt.hinf);
  if (c.gamma) q.gamma = *c.gamma;
  if (c.delta1) q.delta1 = *c.delta1;
  if (c.delta2) q.delta2 = *c.delta2;
  return q;
}

inline RunResult run_certify(const RunConfig& c) {
  const QuantumModel model = io::load_model(c.input);
  const CertifyOptions opt = certify_options(c);
  const QsiqcParams q = resolve_qsiqc(c, model, opt);
  const CertificationReport rep = certify(model, q.gamma, q.delta1, q.delta2, opt);
  RunResult r;
  r.out = c.format.value_or(Format::kJson) == Format::kText ? io::report_text(rep)
                                                           : io::dump(io::report_json(rep));
  r.exit_code = rep.verdict == Verdict::kCertified ? kExitOk : kExitNegative;
  return r;
}

inline RunResult run_freqresp(const RunConfig& c) {
  const QuantumModel model = io::load_model(c.input);
  const PlantMatrices plant = compute_F(model);
  if (c.points < 2) throw PreconditionError("--points must be >= 2");
  const double scale = std::max(spectral_norm(plant.F), 1e-300);
  const double lo = c.omega_min.value_or(1e-3 * scale);
  const double hi = c.omega_max.value_or(1e3 * scale);
  if (!(lo > 0.0) || !(hi > lo)) throw PreconditionError("need 0 < omega-min < omega-max");
  std::ostringstream os;
  os << "omega,re,im,magnitude\n";
  const double llo = std::log10(lo), lhi = std::log10(hi);
  for (int k = 0; k < c.points; ++k) {
    const double w = std::pow(10.0, llo + (lhi - llo) * k / (c.points - 1));
    const Complex h = freq_response(plant, w);
    os << io::fmt17(w) << "," << io::fmt17(h.real()) << "," << io::fmt17(h.imag()) << ","
       << io::fmt17(std::abs(h)) << "\n";
  }
  return {kExitOk, os.str(), {}};
}

inline RunResult run_uncertainty(const RunConfig& c) {
  const LinearUncertainty u = io::load_uncertainty(c.input);
  HinfOptions hopt;
  hopt.rel_tol = c.hinf_rel_tol;
  const QsiqcParams q = qsiqc_params(u, hopt);
  io::OrderedJson j;
  j["gamma"] = io::number(q.gamma);
  j["delta1"] = io::number(q.delta1);
  j["delta2"] = io::number(q.delta2);
  return {kExitOk, io::dump(j), {}};
}

inline RunResult run_moments(const RunConfig& c) {
  if (!c.coupling) throw PreconditionError("moments: --coupling RE,IM is required");
  const QuantumModel model = io::load_model(c.input);
  const CertifyOptions opt = certify_options(c);
  const ClosedLoopSystem sys = build_closed_loop(model, *c.coupling);

  io::OrderedJson j;
  bool stable = true;
  double ms = std::numeric_limits<double>::infinity();
  try {
    ms = steady_state_moments(sys).ms_value;
  } catch (const DivergenceError&) {
    stable = false;
  }
  std::optional<double> bound;
  const QsiqcParams q = qsiqc_params(uncertainty_from_model(model, *c.coupling), opt.hinf);
  const CertificationReport rep = certify(model, q.gamma, q.delta1, q.delta2, opt);
  if (rep.verdict == Verdict::kCertified) bound = rep.c_bound;

  const bool satisfied = stable && bound && ms <= *bound;
  j["ms_value"] = io::number(ms);
  j["c_bound"] = bound ? io::number(*bound) : io::OrderedJson(nullptr);
  j["satisfied"] = satisfied;
  j["verdict"] = to_string(rep.verdict);
  j["closed_loop_stable"] = stable;

  if (c.csv_path) {
    const double absc = spectral_abscissa(sys.A_cl);
    const double horizon =
        c.horizon.value_or(absc < 0.0 ? 100.0 / std::abs(absc) : 10.0);
    const double dt = c.dt.value_or(default_moment_step(sys));
    const MomentTrajectory tr = integrate_moments(sys, horizon, std::min(dt, horizon));
    std::ostringstream os;
    os << "t,ms_value\n";
    for (std::size_t k = 0; k < tr.t.size(); ++k)
      os << io::fmt17(tr.t[k]) << "," << io::fmt17(tr.ms_value[k]) << "\n";
    write_side_file(*c.csv_path, os.str());
    j["time_average"] = io::number(tr.time_average);
    j["diverged"] = tr.diverged;
  }
  return {satisfied ? kExitOk : kExitNegative, io::dump(j), {}};
}

inline io::OrderedJson agreement_json(const AgreementReport& a) {
  io::OrderedJson j;
  io::OrderedJson p;
  p["chi"] = io::number(a.params.chi);
  p["kappa_a"] = io::number(a.params.kappa_a);
  p["kappa_b"] = io::number(a.params.kappa_b);
  p["abar"] = io::complex(a.params.abar);
  p["bbar"] = io::complex(a.params.bbar);
  j["params"] = std::move(p);
  io::OrderedJson cf;
  cf["eigenvalues"] = {io::number(a.closed.eig_lo), io::number(a.closed.eig_hi)};
  cf["hurwitz"] = a.closed.hurwitz;
  cf["h0_mag"] = io::number(a.closed.h0_mag);
  cf["g_norm"] = io::number(a.closed.g_norm);
  cf["gamma"] = io::number(a.closed.gamma);
  cf["delta1"] = io::number(a.closed.delta1);
  cf["lhs"] = io::number(a.closed.lhs);
  cf["rhs"] = io::number(a.closed.rhs);
  cf["certified"] = a.closed.certified;
  j["closed_form"] = std::move(cf);
  j["generic"] = a.generic ? io::report_json(*a.generic) : io::OrderedJson(nullptr);
  j["generic_gamma"] = io::number(a.generic_gamma);
  j["generic_delta1"] = io::number(a.generic_delta1);
  j["in_boundary_band"] = a.in_boundary_band;
  j["verdict_match"] = a.verdict_match;
  j["mismatches"] = a.mismatches;
  j["agree"] = a.agree();
  return j;
}

inline std::string sweep_csv_header() {
  return "index,chi,kappa_a,kappa_b,abar_re,abar_im,bbar_re,bbar_im,closed_certified,"
         "generic_verdict,lhs,rhs,h0_mag,hinf,gamma_closed,gamma_generic,delta1_closed,"
         "delta1_generic,in_band,agree\n";
}

inline std::string sweep_csv_row(std::size_t index, const AgreementReport& a) {
  const auto f = [](double x) { return io::fmt17(x); };
  std::ostringstream os;
  os << index << "," << f(a.params.chi) << "," << f(a.params.kappa_a) << ","
     << f(a.params.kappa_b) << "," << f(a.params.abar.real()) << "," << f(a.params.abar.imag())
     << "," << f(a.params.bbar.real()) << "," << f(a.params.bbar.imag()) << ","
     << (a.closed.certified ? 1 : 0) << ","
     << (a.generic ? to_string(a.generic->verdict) : "error") << "," << f(a.closed.lhs) << ","
     << f(a.closed.rhs) << "," << f(a.closed.h0_mag) << ","
     << (a.generic && a.generic->hinf ? f(*a.generic->hinf) : std::string("")) << ","
     << f(a.closed.gamma) << "," << f(a.generic_gamma) << "," << f(a.closed.delta1) << ","
     << f(a.generic_delta1) << "," << (a.in_boundary_band ? 1 : 0) << ","
     << (a.agree() ? 1 : 0) << "\n";
  return os.str();
}

inline RunResult run_opa(const RunConfig& c) {
  const CertifyOptions opt = certify_options(c);
  if (!(c.agreement_tol > 0.0)) throw PreconditionError("--tol must be positive");
  RunResult r;
  if (c.sweep <= 0) {
    const AgreementReport a = cross_validate(c.opa, c.agreement_tol, opt);
    r.out = io::dump(agreement_json(a));
    if (c.csv_path) write_side_file(*c.csv_path, sweep_csv_header() + sweep_csv_row(0, a));
    r.exit_code = !a.agree() ? kExitError : (a.closed.certified ? kExitOk : kExitNegative);
    if (!a.agree()) r.err = "cross-validation failure\n";
    return r;
  }
  const auto params = sample_opa_params(static_cast<std::size_t>(c.sweep), c.seed);
  std::string csv = sweep_csv_header();
  std::size_t certified = 0, in_band = 0, disagreements = 0;
  io::OrderedJson failures = io::OrderedJson::array();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const AgreementReport a = cross_validate(params[i], c.agreement_tol, opt);
    csv += sweep_csv_row(i, a);
    certified += a.closed.certified ? 1 : 0;
    in_band += a.in_boundary_band ? 1 : 0;
    if (!a.agree()) {
      ++disagreements;
      io::OrderedJson fj;
      fj["index"] = i;
      fj["mismatches"] = a.mismatches;
      failures.push_back(std::move(fj));
    }
  }
  if (c.format.value_or(Format::kJson) == Format::kCsv) {
    r.out = csv;
  } else {
    io::OrderedJson j;
    j["count"] = params.size();
    j["seed"] = c.seed;
    j["closed_form_certified"] = certified;
    j["in_boundary_band"] = in_band;
    j["disagreements"] = disagreements;
    j["failures"] = std::move(failures);
    r.out = io::dump(j);
  }
  if (c.csv_path) write_side_file(*c.csv_path, csv);
  r.exit_code = disagreements == 0 ? kExitOk : kExitError;
  return r;
}

inline RunResult run_fockcheck(const RunConfig& c) {
  const auto rows = run_fock_suite(static_cast<Eigen::Index>(c.dim), c.seed, c.trials);
  bool all = true;
  RunResult r;
  if (c.format.value_or(Format::kText) == Format::kJson) {
    io::OrderedJson arr = io::OrderedJson::array();
    for (const auto& row : rows) {
      io::OrderedJson j;
      j["identity"] = row.name;
      j["worst_residual"] = io::number(row.worst);
      j["tolerance"] = io::number(row.tolerance);
      j["pass"] = row.pass;
      arr.push_back(std::move(j));
      all = all && row.pass;
    }
    r.out = io::dump(arr);
  } else {
    std::ostringstream os;
    char line[160];
    std::snprintf(line, sizeof line, "%-34s %-24s %-10s %s\n", "identity", "worst residual",
                  "tolerance", "result");
    os << line;
    for (const auto& row : rows) {
      std::snprintf(line, sizeof line, "%-34s %-24.17g %-10.1e %s\n", row.name.c_str(),
                    row.worst, row.tolerance, row.pass ? "pass" : "FAIL");
      os << line;
      all = all && row.pass;
    }
    r.out = os.str();
  }
  r.exit_code = all ? kExitOk : kExitNegative;
  return r;
}

}  // namespace detail

/// Dispatches one command. Library errors become exit code 2 with the
/// message on `err`.
inline RunResult run(const RunConfig& config) {
  try {
    if (config.command == "certify") return detail::run_certify(config);
    if (config.command == "freqresp") return detail::run_freqresp(config);
    if (config.command == "uncertainty") return detail::run_uncertainty(config);
    if (config.command == "moments") return detail::run_moments(config);
    if (config.command == "opa") return detail::run_opa(config);
    if (config.command == "fockcheck") return detail::run_fockcheck(config);
    return {kExitError, {}, "error: unknown command \"" + config.command + "\"\n"};
  } catch (const ParseError& e) {
    std::string where;
    if (e.line() > 0) where = " (line " + std::to_string(e.line()) + ", column " +
                              std::to_string(e.column()) + ")";
    return {kExitError, {}, std::string("error: ") + e.what() + where + "\n"};
  } catch (const ModelError& e) {
    return {kExitError, {}, std::string("error: invalid model: ") + e.what() + "\n"};
  } catch (const Error& e) {
    return {kExitError, {}, std::string("error: ") + e.what() + "\n"};
  }
}

/// Builds a RunConfig from argv. Returns an exit code instead when parsing
/// stops early (--help, bad flags); the message then goes to `err`.
inline std::variant<RunConfig, RunResult> parse_args(int argc, const char* const* argv) {
  RunConfig c;
  CLI::App app{"Small-gain robust mean-square stability certifier", "qsgain"};
  app.require_subcommand(1);
  std::string format;
  std::string coupling, abar = "0", bbar = "0";

  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"text", "json", "csv"}));
  };
  auto add_tols = [&](CLI::App* sub) {
    sub->add_option("--hurwitz-tol", c.hurwitz_tol, "Hurwitz margin tolerance");
    sub->add_option("--hinf-tol", c.hinf_rel_tol, "Relative H-inf bisection tolerance");
  };

  auto* cert = app.add_subcommand("certify", "Certify robust mean-square stability of a model");
  cert->add_option("model", c.input, "Model JSON file")->required();
  cert->add_option("--gamma", c.gamma, "Gain bound gamma (default inf)");
  cert->add_option("--delta1", c.delta1, "QSIQC constant delta1 (default 0)");
  cert->add_option("--delta2", c.delta2, "QSIQC constant delta2 (default 0)");
  cert->add_option("--coupling", coupling, "Bilinear coupling g as RE,IM");
  cert->add_option("--uncertainty", c.uncertainty_path, "Uncertainty JSON file");
  add_format(cert);
  add_tols(cert);

  auto* fr = app.add_subcommand("freqresp", "Frequency response of the nominal plant as CSV");
  fr->add_option("model", c.input, "Model JSON file")->required();
  fr->add_option("--points", c.points, "Number of log-spaced frequencies");
  fr->add_option("--omega-min", c.omega_min, "Lowest frequency");
  fr->add_option("--omega-max", c.omega_max, "Highest frequency");

  auto* un = app.add_subcommand("uncertainty", "Print (gamma, delta1, delta2) of an uncertainty");
  un->add_option("file", c.input, "Uncertainty JSON file")->required();
  un->add_option("--hinf-tol", c.hinf_rel_tol, "Relative H-inf bisection tolerance");

  auto* mo = app.add_subcommand("moments", "Closed-loop mean square vs. the certified bound");
  mo->add_option("model", c.input, "Model JSON file")->required();
  mo->add_option("--coupling", coupling, "Bilinear coupling g as RE,IM")->required();
  mo->add_option("--csv", c.csv_path, "Write the t,ms_value time series here");
  mo->add_option("--horizon", c.horizon, "Integration horizon T");
  mo->add_option("--dt", c.dt, "RK4 step");
  add_tols(mo);

  auto* op = app.add_subcommand("opa", "Cross-validate the OPA example against closed forms");
  op->add_option("--chi", c.opa.chi, "Coupling strength chi");
  op->add_option("--kappa-a", c.opa.kappa_a, "Decay rate of the fundamental mode");
  op->add_option("--kappa-b", c.opa.kappa_b, "Decay rate of the second-harmonic mode");
  op->add_option("--abar", abar, "Steady-state amplitude abar as RE,IM");
  op->add_option("--bbar", bbar, "Steady-state amplitude bbar as RE,IM");
  op->add_option("--sweep", c.sweep, "Number of random parameter tuples");
  op->add_option("--seed", c.seed, "Sweep seed");
  op->add_option("--tol", c.agreement_tol, "Relative agreement tolerance");
  op->add_option("--csv", c.csv_path, "Write sweep rows as CSV here");
  add_format(op);
  add_tols(op);

  auto* fc = app.add_subcommand("fockcheck", "Truncated Fock-space identity checks");
  fc->add_option("--dim", c.dim, "Truncation level N");
  fc->add_option("--seed", c.seed, "Seed");
  fc->add_option("--trials", c.trials, "Random trials per identity");
  add_format(fc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream out, err;
    const int code = app.exit(e, out, err);
    return RunResult{code == 0 ? kExitOk : kExitError, out.str(), err.str()};
  }

  c.command = app.get_subcommands().front()->get_name();
  try {
    if (!coupling.empty()) c.coupling = detail::parse_complex_arg(coupling, "--coupling");
    c.opa.abar = detail::parse_complex_arg(abar, "--abar");
    c.opa.bbar = detail::parse_complex_arg(bbar, "--bbar");
  } catch (const ParseError& e) {
    return RunResult{kExitError, {}, std::string("error: ") + e.what() + "\n"};
  }
  if (format == "text") c.format = Format::kText;
  if (format == "json") c.format = Format::kJson;
  if (format == "csv") c.format = Format::kCsv;
  return c;
}

/// argv -> run -> streams. Returns the process exit code.
inline int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  auto parsed = parse_args(argc, argv);
  RunResult r = std::holds_alternative<RunResult>(parsed)
                    ? std::get<RunResult>(parsed)
                    : run(std::get<RunConfig>(parsed));
  out << r.out;
  err << r.err;
  return r.exit_code;
}

}  // namespace qsgain::cli
