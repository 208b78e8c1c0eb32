#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "colehopf/cli.hpp"

using namespace colehopf;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "colehopf-cli-tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path write_file(const std::string& name, const std::string& text) {
  const auto p = temp_path(name);
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST(CliExpr, Diff) {
  const auto r = run({"expr", "diff", "x^2"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "2*x\n");
}

TEST(CliExpr, DiffWithParam) {
  const auto r = run({"expr", "diff", "a*x^2", "--param", "a=3"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(equivalent(parse(r.out.substr(0, r.out.size() - 1)), parse("6*x"), 0.0, 1.0, 8, 1e-14));
}

TEST(CliExpr, Eval) {
  const auto r = run({"expr", "eval", "sin(x)^2 + cos(x)^2", "--at", "0.7"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "1\n");
}

TEST(CliExpr, ParseErrorIsConfigError) {
  const auto r = run({"expr", "diff", "x +* 2"});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(r.err.empty());
}

TEST(CliExpr, EvaluationErrorIsNumeric) { EXPECT_EQ(run({"expr", "eval", "ln(x)", "--at", "-1"}).code, 3); }

TEST(CliPair, SynthBessel) {
  const auto r = run({"pair", "synth", "--P", "1/(2*x)", "--K", "-1/x", "--U", "-1"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::vector<std::pair<std::string, std::string>> parts;
  while (std::getline(in, line)) parts.emplace_back(line.substr(0, 4), line.substr(4));
  ASSERT_EQ(parts.size(), 4u);
  EXPECT_EQ(parts[0].first, "S = ");
  EXPECT_TRUE(equivalent(parse(parts[0].second), parse("1/(2*x^3)"), 0.5, 5.0, 32, 1e-12));
  EXPECT_TRUE(equivalent(parse(parts[1].second), parse("2 + 1/(2*x^2)"), 0.5, 5.0, 32, 1e-12));
  EXPECT_TRUE(equivalent(parse(parts[2].second), parse("0"), 0.5, 5.0, 32, 1e-12));
  EXPECT_TRUE(equivalent(parse(parts[3].second), parse("2"), 0.5, 5.0, 32, 1e-12));
}

TEST(CliPair, SynthVanishingQ) {
  EXPECT_EQ(run({"pair", "synth", "--P", "0", "--Q", "0", "--K", "0", "--U", "0"}).code, 2);
}

TEST(CliPair, CheckPainleve) {
  const auto r = run({"pair", "check", "--S", " -0.5", "--V", "x", "--W", "0", "--lambda", "0", "--interval", "0:2"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("satisfied: true"), std::string::npos);
  EXPECT_NE(r.out.find("U = -x/2"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("P = "), std::string::npos);
}

TEST(CliPair, CheckScan) {
  for (double a : {-1.0, -0.75, -0.5, 0.0, 0.5}) {
    const auto r = run({"pair", "check", "--S", std::to_string(a), "--V", "x", "--W", "0", "--interval", "0:2"});
    EXPECT_EQ(r.code, a == -0.5 ? 0 : 1) << a;
    const auto pos = r.out.find("max_delta: ");
    ASSERT_NE(pos, std::string::npos);
    EXPECT_NEAR(std::stod(r.out.substr(pos + 11)), std::abs(a + 0.5), 1e-10);
  }
}

TEST(CliPair, CheckBadInterval) {
  EXPECT_EQ(run({"pair", "check", "--S", "0", "--V", "x", "--W", "0", "--interval", "2:0"}).code, 2);
  EXPECT_EQ(run({"pair", "check", "--S", "0", "--V", "x", "--W", "0", "--interval", "0-2"}).code, 2);
}

TEST(CliVerify, BesselCsv) {
  const auto csv = temp_path("bessel.csv");
  const auto r = run({"pair", "verify", "--case", "bessel0", "--csv", csv.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("result: pass"), std::string::npos);
  EXPECT_NE(r.out.find("interval: 0.5:5"), std::string::npos);
  const std::string first = read_file(csv);
  EXPECT_EQ(first.substr(0, first.find('\n')), "x,phi,dphi,psi,dpsi,residual,masked");
  EXPECT_EQ(std::count(first.begin(), first.end(), '\n'), 402);

  ASSERT_EQ(run({"pair", "verify", "--case", "bessel0", "--csv", csv.string()}).code, 0);
  EXPECT_EQ(read_file(csv), first);
}

TEST(CliVerify, SampleCountAndOverrides) {
  const auto csv = temp_path("painleve.csv");
  const auto r = run({"pair", "verify", "--case", "painleve2", "--interval", "0:1.5", "--ic", "2,0.5", "--samples",
                      "51", "--tol", "1e-7", "--csv", csv.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("ic: 2,0.5"), std::string::npos);
  const std::string text = read_file(csv);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 52);
}

TEST(CliVerify, CaseParameters) {
  EXPECT_EQ(run({"pair", "verify", "--case", "legendre", "--param", "n=3"}).code, 0);
  EXPECT_EQ(run({"pair", "verify", "--case", "legendre", "--param", "n=1"}).code, 2);
  EXPECT_EQ(run({"pair", "verify", "--case", "nope"}).code, 2);
  EXPECT_EQ(run({"pair", "verify", "--case", "bessel0", "--param", "n"}).code, 2);
}

TEST(CliVerify, ProblemFileExplicit) {
  const auto file = write_file("example1.problem", R"(# power-law pairing
name = power
linear.U = b*(b+1)/x^2
transform.P = b/x
param.b = 1
domain.a = 1
domain.b = 3
ic.phi = 1
ic.dphi = 2
)");
  const auto r = run({"pair", "verify", "--file", file.string(), "--tol", "1e-7"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("case: power"), std::string::npos);
}

TEST(CliVerify, ProblemFileNonlinearOverride) {
  const auto file = write_file("override.problem", R"(linear.U = 2/x^2
transform.P = 1/x
nonlinear.R = 3
domain.a = 1
domain.b = 3
ic.phi = 1
ic.dphi = 2
)");
  const auto r = run({"pair", "verify", "--file", file.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("result: fail"), std::string::npos);
}

TEST(CliVerify, ProblemFileWithCase) {
  const auto file = write_file("case.problem", "case = example1\nparam.b = 2\ndomain.b = 2.5\n");
  const auto r = run({"pair", "verify", "--file", file.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("interval: 1:2.5"), std::string::npos);
  EXPECT_NE(r.out.find("params: b=2"), std::string::npos);
}

TEST(CliVerify, ProblemFileErrors) {
  EXPECT_EQ(run({"pair", "verify", "--file", temp_path("missing.problem").string()}).code, 2);
  const auto unknown = write_file("unknown.problem", "linear.X = 1\n");
  const auto r = run({"pair", "verify", "--file", unknown.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 1"), std::string::npos);
  const auto q = write_file("q.problem",
                            "linear.U = 0\ntransform.P = 0\ntransform.Q = x\ndomain.a = -1\ndomain.b = 1\n"
                            "ic.phi = 1\nic.dphi = 0\n");
  EXPECT_EQ(run({"pair", "verify", "--file", q.string()}).code, 2);
  const auto mixed = write_file("mixed.problem", "case = bessel0\nlinear.U = 1\n");
  EXPECT_EQ(run({"pair", "verify", "--file", mixed.string()}).code, 2);
  const auto unbound = write_file("unbound.problem",
                                  "linear.U = c\ntransform.P = 0\ndomain.a = 0\ndomain.b = 1\nic.phi = 1\nic.dphi = 0\n");
  EXPECT_EQ(run({"pair", "verify", "--file", unbound.string()}).code, 2);
}

TEST(CliVerify, NeedsExactlyOneSource) {
  EXPECT_EQ(run({"pair", "verify"}).code, 2);
  EXPECT_EQ(run({"pair", "verify", "--case", "bessel0", "--file", "x"}).code, 2);
}

TEST(CliVerify, NumericFailureExitCode) {
  // phi = 0 everywhere masks every sample.
  const auto r = run({"pair", "verify", "--case", "straightline", "--ic", "0,0"});
  EXPECT_EQ(r.code, 3);
  EXPECT_FALSE(r.err.empty());
}

TEST(CliCatalog, List) {
  const auto r = run({"catalog", "list"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("painleve2"), std::string::npos);
  EXPECT_NE(r.out.find("bessel0"), std::string::npos);
  EXPECT_GE(std::count(r.out.begin(), r.out.end(), '\n'), 12);
}

TEST(CliUsage, MissingOrUnknownCommands) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"pair"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}
