#ifndef COLEHOPF_CLI_HPP
#define COLEHOPF_CLI_HPP

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "colehopf/calculus.hpp"
#include "colehopf/catalog.hpp"
#include "colehopf/errors.hpp"
#include "colehopf/pairing.hpp"
#include "colehopf/parse.hpp"
#include "colehopf/problem_file.hpp"
#include "colehopf/verify.hpp"

namespace colehopf::cli {

enum ExitCode : int { kPass = 0, kFail = 1, kConfigError = 2, kNumericError = 3 };

namespace detail {

using colehopf::detail::format_number;
using colehopf::detail::parse_real;

inline ParamMap parse_params(const std::vector<std::string>& items) {
  ParamMap out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--param expects k=v, got '" + item + "'");
    const std::string name = colehopf::detail::trim(std::string_view(item).substr(0, eq));
    if (!is_valid_param_name(name)) throw std::invalid_argument("invalid parameter name '" + name + "'");
    out[name] = parse_real(std::string_view(item).substr(eq + 1), "--param " + name);
  }
  return out;
}

inline std::pair<double, double> parse_interval(const std::string& text) {
  const auto colon = text.find(':', 1);
  if (colon == std::string::npos) throw std::invalid_argument("--interval expects a:b, got '" + text + "'");
  const double a = parse_real(std::string_view(text).substr(0, colon), "--interval");
  const double b = parse_real(std::string_view(text).substr(colon + 1), "--interval");
  if (!(a < b)) throw std::invalid_argument("--interval needs a < b");
  return {a, b};
}

inline std::pair<double, double> parse_ic(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw std::invalid_argument("--ic expects v0,v1, got '" + text + "'");
  return {parse_real(std::string_view(text).substr(0, comma), "--ic"),
          parse_real(std::string_view(text).substr(comma + 1), "--ic")};
}

inline CoeffFn coeff(const std::string& text, const ParamMap& params) {
  return CoeffFn::symbolic(parse(text), params);
}

inline std::string params_text(const ParamMap& params) {
  std::string s;
  for (const auto& [k, v] : params) s += (s.empty() ? "" : ",") + k + "=" + format_number(v);
  return s.empty() ? "-" : s;
}

}  // namespace detail

/// Runs the command line `args` (without the program name). Output goes to
/// `out`, diagnostics to `err`. Returns 0 on pass, 1 when a check or
/// verification fails, 2 on parse or configuration errors and 3 on numeric
/// failures.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pair nonlinear second-order ODEs with linear ones through psi = P + Q phi'/phi", "colehopf"};
  app.require_subcommand(1);

  auto* expr = app.add_subcommand("expr", "Expression tools");
  expr->require_subcommand(1);
  std::string expr_text;
  std::vector<std::string> expr_params;
  double at_x = 0.0;
  auto* diff = expr->add_subcommand("diff", "Print the simplified derivative with respect to x");
  diff->add_option("expr", expr_text, "Expression")->required();
  diff->add_option("--param", expr_params, "Parameter binding k=v");
  auto* eval = expr->add_subcommand("eval", "Evaluate at a point");
  eval->add_option("expr", expr_text, "Expression")->required();
  eval->add_option("--at", at_x, "Value of x")->required();
  eval->add_option("--param", expr_params, "Parameter binding k=v");

  auto* pair = app.add_subcommand("pair", "Pairing synthesis, condition checks and verification");
  pair->require_subcommand(1);
  std::string p_text, q_text = "1", k_text = "0", u_text;
  std::string s_text, v_text, w_text, r_text;
  double lambda = 0.0;
  std::vector<std::string> pair_params;
  auto* synth = pair->add_subcommand("synth", "Print S, V, W, R for given P, Q, K, U, lambda");
  synth->add_option("--P", p_text, "Transform P(x)")->required();
  synth->add_option("--Q", q_text, "Transform Q(x)")->capture_default_str();
  synth->add_option("--K", k_text, "Linear K(x)")->capture_default_str();
  synth->add_option("--U", u_text, "Linear U(x)")->required();
  synth->add_option("--lambda", lambda, "Spectral parameter")->capture_default_str();
  synth->add_option("--param", pair_params, "Parameter binding k=v");

  std::string interval_text;
  std::size_t n_samples = 64;
  double check_tol = 1e-8;
  auto* check = pair->add_subcommand("check", "Test the intrinsic Q = 1, K = 0 condition on S, V, W");
  check->add_option("--S", s_text, "S(x)")->required();
  check->add_option("--V", v_text, "V(x)")->required();
  check->add_option("--W", w_text, "W(x)")->required();
  check->add_option("--R", r_text, "R(x), must equal 2 when given");
  check->add_option("--lambda", lambda, "Spectral parameter")->capture_default_str();
  check->add_option("--interval", interval_text, "Sampling interval a:b")->required();
  check->add_option("--n", n_samples, "Chebyshev sample count")->capture_default_str();
  check->add_option("--tol", check_tol, "Relative tolerance")->capture_default_str();
  check->add_option("--param", pair_params, "Parameter binding k=v");

  std::string file_path, case_name, ic_text, csv_path;
  double verify_tol = 1e-6;
  VerifyOptions vopts;
  auto* verify = pair->add_subcommand("verify", "Integrate, map and check the nonlinear residual");
  auto* file_opt = verify->add_option("--file", file_path, "Problem file");
  auto* case_opt = verify->add_option("--case", case_name, "Catalog case name");
  file_opt->excludes(case_opt);
  verify->add_option("--param", pair_params, "Case parameter k=v");
  verify->add_option("--interval", interval_text, "Interval a:b (initial data at a)");
  verify->add_option("--ic", ic_text, "Initial data phi(a),phi'(a)");
  verify->add_option("--tol", verify_tol, "Residual tolerance")->capture_default_str();
  verify->add_option("--eps-pole", vopts.eps_pole, "Mask |phi| below this fraction of sqrt(phi^2 + (L phi')^2)")
      ->capture_default_str();
  verify->add_option("--samples", vopts.samples, "Uniform sample count")->capture_default_str();
  verify->add_option("--csv", csv_path, "Write samples as CSV");

  auto* catalog = app.add_subcommand("catalog", "Registered pairing cases");
  catalog->require_subcommand(1);
  auto* list = catalog->add_subcommand("list", "List cases");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kPass;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kPass;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kConfigError;
  }

  using detail::format_number;
  try {
    if (*diff) {
      out << to_string(differentiate(substitute(parse(expr_text), detail::parse_params(expr_params)))) << '\n';
      return kPass;
    }
    if (*eval) {
      out << format_number(evaluate(parse(expr_text), Bindings{at_x, detail::parse_params(expr_params)})) << '\n';
      return kPass;
    }
    if (*synth) {
      const ParamMap params = detail::parse_params(pair_params);
      const NonlinearODE nl = synth_nonlinear(detail::coeff(p_text, params), detail::coeff(q_text, params),
                                              detail::coeff(k_text, params), detail::coeff(u_text, params), lambda);
      out << "S = " << nl.S.describe() << '\n'
          << "V = " << nl.V.describe() << '\n'
          << "W = " << nl.W.describe() << '\n'
          << "R = " << nl.R.describe() << '\n';
      return kPass;
    }
    if (*check) {
      const ParamMap params = detail::parse_params(pair_params);
      const auto [a, b] = detail::parse_interval(interval_text);
      std::optional<CoeffFn> R;
      if (!r_text.empty()) R = detail::coeff(r_text, params);
      const TheoremCertificate cert =
          theorem_check(detail::coeff(s_text, params), detail::coeff(v_text, params), detail::coeff(w_text, params),
                        lambda, a, b, n_samples, check_tol, R);
      out << "satisfied: " << (cert.satisfied ? "true" : "false") << '\n'
          << "max_delta: " << format_number(cert.max_delta) << '\n'
          << "max_S: " << format_number(cert.max_S) << '\n'
          << "tol: " << format_number(cert.tol) << '\n'
          << "samples: " << cert.x.size() << '\n';
      if (!cert.note.empty()) out << "note: " << cert.note << '\n';
      if (!cert.satisfied) return kFail;
      out << "U = " << cert.U->describe() << '\n'
          << "P = " << cert.P->describe() << '\n'
          << "K = " << cert.K->describe() << '\n';
      return kPass;
    }
    if (*verify) {
      if (file_path.empty() == case_name.empty()) throw std::invalid_argument("pair verify needs --file or --case");
      PairingProblem problem;
      if (!file_path.empty()) {
        std::ifstream in(file_path);
        if (!in) throw std::invalid_argument("cannot open problem file '" + file_path + "'");
        if (!pair_params.empty()) throw std::invalid_argument("--param applies to --case; use param.<k> in files");
        problem = to_problem(read_problem_file(in));
      } else {
        problem = build_case(case_name, detail::parse_params(pair_params));
      }
      IVP ivp = problem.ivp(0);
      if (!interval_text.empty()) std::tie(ivp.a, ivp.b) = detail::parse_interval(interval_text);
      if (!ic_text.empty()) {
        const auto [v0, v1] = detail::parse_ic(ic_text);
        ivp.y0 = {v0, v1};
      }
      const VerificationReport rep = verify_pair(problem.lin, problem.transform, problem.nl, ivp, verify_tol, vopts);
      if (!csv_path.empty()) {
        std::ofstream csv(csv_path, std::ios::binary);
        if (!csv) throw std::invalid_argument("cannot write CSV to '" + csv_path + "'");
        write_csv(rep, csv);
      }
      out << "case: " << problem.name << '\n'
          << "params: " << detail::params_text(problem.params) << '\n'
          << "interval: " << format_number(ivp.a) << ':' << format_number(ivp.b) << '\n'
          << "ic: " << format_number(ivp.y0[0]) << ',' << format_number(ivp.y0[1]) << '\n'
          << "samples: " << rep.samples.size() << '\n'
          << "masked: " << rep.masked_count << " (" << format_number(rep.masked_fraction) << "; " << rep.mask_reason
          << ")\n"
          << "max_residual: " << format_number(rep.max_residual) << '\n'
          << "rms_residual: " << format_number(rep.rms_residual) << '\n'
          << "tol: " << format_number(rep.tol) << '\n'
          << "result: " << (rep.passed ? "pass" : rep.inconclusive ? "inconclusive" : "fail") << '\n';
      return rep.passed ? kPass : kFail;
    }
    if (*list) {
      for (const auto& info : list_cases()) {
        const PairingProblem p = build_case(info.name);
        out << info.name << "  params: " << detail::params_text(info.defaults) << "  interval: "
            << format_number(p.a) << ':' << format_number(p.b) << "  " << info.summary << '\n';
      }
      return kPass;
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kNumericError;
  } catch (const EvalError& e) {
    err << "evaluation error: " << e.what() << '\n';
    return kNumericError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericError;
  }
  return kConfigError;
}

}  // namespace colehopf::cli

#endif  // COLEHOPF_CLI_HPP
