#ifndef COLEHOPF_PROBLEM_FILE_HPP
#define COLEHOPF_PROBLEM_FILE_HPP

#include <charconv>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "colehopf/catalog.hpp"
#include "colehopf/coeff.hpp"
#include "colehopf/eval.hpp"
#include "colehopf/pairing.hpp"
#include "colehopf/parse.hpp"

namespace colehopf {

/// Flat `key = value` problem description. Lines starting with `#` and text
/// after a `#` are comments. Recognized keys:
///
///   name, case, lambda, linear.U, linear.K, transform.P, transform.Q,
///   nonlinear.S, nonlinear.V, nonlinear.W, nonlinear.R, nonlinear.V1,
///   domain.a, domain.b, ic.phi, ic.dphi, param.<name>
///
/// With `case`, the named catalog entry supplies everything except the
/// domain and initial data, which may be overridden.
struct ProblemFile {
  std::map<std::string, std::string, std::less<>> entries;
  ParamMap params;

  [[nodiscard]] std::optional<std::string> get(std::string_view key) const {
    auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    return it->second;
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_real(std::string_view text, std::string_view what) {
  const std::string t = trim(text);
  double v = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (!t.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (t.empty() || ec != std::errc{} || ptr != last) {
    throw std::invalid_argument(std::string(what) + ": '" + t + "' is not a number");
  }
  return v;
}

inline bool known_key(std::string_view key) {
  static const std::vector<std::string_view> keys = {
      "name",        "case",        "lambda",      "linear.U",    "linear.K",     "transform.P",
      "transform.Q", "nonlinear.S", "nonlinear.V", "nonlinear.W", "nonlinear.R",  "nonlinear.V1",
      "domain.a",    "domain.b",    "ic.phi",      "ic.dphi"};
  for (auto k : keys) {
    if (k == key) return true;
  }
  return false;
}

}  // namespace detail

/// Reads a problem file. Throws std::invalid_argument with the line number on
/// malformed lines, unknown or duplicate keys, and bad parameter values.
[[nodiscard]] inline ProblemFile read_problem_file(std::istream& in) {
  ProblemFile pf;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = detail::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = "line " + std::to_string(lineno);
    if (eq == std::string::npos) throw std::invalid_argument(where + ": expected 'key = value'");
    const std::string key = detail::trim(std::string_view(body).substr(0, eq));
    const std::string value = detail::trim(std::string_view(body).substr(eq + 1));
    if (value.empty()) throw std::invalid_argument(where + ": empty value for '" + key + "'");
    if (key.starts_with("param.")) {
      const std::string name = key.substr(6);
      if (!is_valid_param_name(name)) throw std::invalid_argument(where + ": invalid parameter name '" + name + "'");
      if (pf.params.contains(name)) throw std::invalid_argument(where + ": duplicate parameter '" + name + "'");
      pf.params[name] = detail::parse_real(value, where);
      continue;
    }
    if (!detail::known_key(key)) throw std::invalid_argument(where + ": unknown key '" + key + "'");
    if (pf.entries.contains(key)) throw std::invalid_argument(where + ": duplicate key '" + key + "'");
    pf.entries.emplace(key, value);
  }
  return pf;
}

[[nodiscard]] inline ProblemFile read_problem_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_problem_file(in);
}

namespace detail {

inline CoeffFn problem_expr(const ProblemFile& pf, std::string_view key, std::string_view fallback) {
  const auto text = pf.get(key);
  const Expr e = parse(text ? *text : std::string(fallback));
  const Expr bound = substitute(e, pf.params);
  std::vector<std::string> free;
  collect_params(bound, free);
  if (!free.empty()) {
    throw std::invalid_argument(std::string(key) + ": unbound parameter '" + free.front() + "'");
  }
  return CoeffFn::symbolic(bound);
}

}  // namespace detail

/// Turns a problem file into a PairingProblem. Missing nonlinear
/// coefficients are synthesized from the linear equation and the transform.
[[nodiscard]] inline PairingProblem to_problem(const ProblemFile& pf) {
  PairingProblem p;
  if (const auto c = pf.get("case")) {
    for (const char* k : {"linear.U", "linear.K", "transform.P", "transform.Q", "lambda", "nonlinear.S",
                          "nonlinear.V", "nonlinear.W", "nonlinear.R", "nonlinear.V1"}) {
      if (pf.get(k)) throw std::invalid_argument(std::string(k) + " cannot be combined with 'case'");
    }
    p = build_case(*c, pf.params);
    const double a = pf.get("domain.a") ? detail::parse_real(*pf.get("domain.a"), "domain.a") : p.a;
    const double b = pf.get("domain.b") ? detail::parse_real(*pf.get("domain.b"), "domain.b") : p.b;
    p.a = a;
    p.b = b;
    if (pf.get("ic.phi") || pf.get("ic.dphi")) {
      if (!pf.get("ic.phi") || !pf.get("ic.dphi")) throw std::invalid_argument("ic.phi and ic.dphi go together");
      p.ivps.insert(p.ivps.begin(), CaseIVP{"from file", detail::parse_real(*pf.get("ic.phi"), "ic.phi"),
                                            detail::parse_real(*pf.get("ic.dphi"), "ic.dphi")});
    }
  } else {
    for (const char* k : {"linear.U", "transform.P", "domain.a", "domain.b", "ic.phi", "ic.dphi"}) {
      if (!pf.get(k)) throw std::invalid_argument(std::string("missing key '") + k + "'");
    }
    p.name = pf.get("name").value_or("problem");
    p.params = pf.params;
    p.lin.lambda = pf.get("lambda") ? detail::parse_real(*pf.get("lambda"), "lambda") : 0.0;
    p.lin.U = detail::problem_expr(pf, "linear.U", "0");
    p.lin.K = detail::problem_expr(pf, "linear.K", "0");
    p.transform.P = detail::problem_expr(pf, "transform.P", "0");
    p.transform.Q = detail::problem_expr(pf, "transform.Q", "1");
    p.a = detail::parse_real(*pf.get("domain.a"), "domain.a");
    p.b = detail::parse_real(*pf.get("domain.b"), "domain.b");
    p.ivps = {{"from file", detail::parse_real(*pf.get("ic.phi"), "ic.phi"),
               detail::parse_real(*pf.get("ic.dphi"), "ic.dphi")}};
    if (!(p.a < p.b)) throw std::invalid_argument("domain.a must be less than domain.b");
    if (detail::vanishes_on(p.transform.Q, p.a, p.b)) throw std::invalid_argument("transform.Q vanishes on the domain");
    p.nl = synth_nonlinear(p.transform.P, p.transform.Q, p.lin.K, p.lin.U, p.lin.lambda);
    if (pf.get("nonlinear.S")) p.nl.S = detail::problem_expr(pf, "nonlinear.S", "");
    if (pf.get("nonlinear.V")) p.nl.V = detail::problem_expr(pf, "nonlinear.V", "");
    if (pf.get("nonlinear.W")) p.nl.W = detail::problem_expr(pf, "nonlinear.W", "");
    if (pf.get("nonlinear.R")) p.nl.R = detail::problem_expr(pf, "nonlinear.R", "");
    if (pf.get("nonlinear.V1")) p.nl.V1 = detail::problem_expr(pf, "nonlinear.V1", "");
    p.notes = "read from problem file";
  }
  if (!(p.a < p.b)) throw std::invalid_argument("domain.a must be less than domain.b");
  return p;
}

}  // namespace colehopf

#endif  // COLEHOPF_PROBLEM_FILE_HPP
