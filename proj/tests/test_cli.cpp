#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "gdpkit/error.hpp"
#include "gdpkit/lp_format.hpp"
#include "gdpkit/milp.hpp"
#include "gdpkit/reformulate.hpp"
#include "model_file.hpp"
#include "support/oracles.hpp"

namespace gdpkit {
namespace {

namespace fs = std::filesystem;
using namespace gdpkit::tools;

const fs::path kData = GDPKIT_TEST_DATA;
const fs::path kGolden = GDPKIT_GOLDEN_DIR;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

/// Writes `text` to a fresh file under the temp directory.
fs::path scratch(const std::string& name, const std::string& text) {
  const fs::path path = fs::temp_directory_path() / ("gdpkit_cli_" + name);
  std::ofstream(path, std::ios::binary) << text;
  return path;
}

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome check(const fs::path& path) {
  std::ostringstream out, err;
  const int code = cmd_check(path, out, err);
  return {code, out.str(), err.str()};
}

Outcome solve(const fs::path& path, const SolveArgs& args) {
  std::ostringstream out, err;
  const int code = cmd_solve(path, args, out, err);
  return {code, out.str(), err.str()};
}

Outcome compare(const fs::path& path) {
  std::ostringstream out, err;
  const int code = cmd_compare(path, {}, out, err);
  return {code, out.str(), err.str()};
}

/// Runs the installed binary through the shell and returns its exit code.
int run_binary(const std::string& args, const std::string& env = {}) {
  const std::string command =
      env + " \"" + std::string(GDPKIT_CLI) + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kTwoVar = "[variables]\nx1 0 10\nx2 0 10\n";

TEST(CliCheck, SuperstructureIsClean) {
  const Outcome r = check(kData / "superstructure.gdp");
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("ok:"), std::string::npos);
}

TEST(CliCheck, ReversedBounds) {
  const Outcome r = check(scratch("reversed.gdp", "[variables]\nflow 5 1\n[objective]\nminimize flow\n"));
  EXPECT_EQ(r.code, kExitInvalid);
  EXPECT_NE(r.err.find("flow"), std::string::npos);
  EXPECT_NE(r.err.find("line 2"), std::string::npos);
}

TEST(CliCheck, UndeclaredIndicatorInProposition) {
  const std::string text = std::string(kTwoVar) +
                           "[disjunction D]\ndisjunct Y1:\n  x1 <= 2\ndisjunct Y2:\n  x1 >= 3\n"
                           "[propositions]\np: Y1 implies Y9\n";
  const Outcome r = check(scratch("undeclared.gdp", text));
  EXPECT_EQ(r.code, kExitInvalid);
  EXPECT_NE(r.err.find("Y9"), std::string::npos);
}

TEST(CliCheck, ParseErrorsCarryPosition) {
  for (const char* body : {"[variables]\nx 0\n", "[bogus]\n", "[variables]\nx 0 1\n[constraints]\nc: x <> 1\n",
                           "[variables]\nx 0 1\n[objective]\nmaximize x +\n"}) {
    const Outcome r = check(scratch("parse.gdp", body));
    EXPECT_EQ(r.code, kExitInvalid) << body;
    EXPECT_NE(r.err.find("line "), std::string::npos) << r.err;
  }
}

TEST(CliCheck, MissingFile) {
  EXPECT_EQ(check(kData / "no_such_file.gdp").code, kExitInvalid);
}

TEST(CliReformulate, BigMMatchesGolden) {
  const fs::path out = fs::temp_directory_path() / "gdpkit_cli_bigm.lp";
  ReformulateArgs args;
  args.out = out;
  std::ostringstream so, se;
  ASSERT_EQ(cmd_reformulate(kData / "two_rectangle.gdp", args, so, se), kExitOk);
  EXPECT_EQ(slurp(out), slurp(kGolden / "two_rectangle_bigm.lp"));
  EXPECT_NE(so.str().find("disjunct: 8"), std::string::npos);
  EXPECT_NE(so.str().find("selection: 1"), std::string::npos);
}

TEST(CliReformulate, HullCountsCopies) {
  ReformulateArgs args;
  args.method = "hull";
  args.out = fs::temp_directory_path() / "gdpkit_cli_hull.lp";
  std::ostringstream so, se;
  ASSERT_EQ(cmd_reformulate(kData / "two_rectangle.gdp", args, so, se), kExitOk);
  EXPECT_NE(so.str().find("disaggregated: 4"), std::string::npos);
  const MilpModel lp = read_lp_file(*args.out);
  EXPECT_EQ(lp.variables.size(), 8u);
}

TEST(CliReformulate, StdoutCarriesLp) {
  std::ostringstream so, se;
  ASSERT_EQ(cmd_reformulate(kData / "two_rectangle.gdp", {}, so, se), kExitOk);
  EXPECT_EQ(so.str(), slurp(kGolden / "two_rectangle_bigm.lp"));
  EXPECT_NE(se.str().find("rows: 9"), std::string::npos);
}

TEST(CliReformulate, EpsilonOutOfRange) {
  for (double eps : {0.0, 1.0, -0.5}) {
    ReformulateArgs args;
    args.method = "hull";
    args.epsilon = eps;
    std::ostringstream so, se;
    EXPECT_EQ(cmd_reformulate(kData / "two_rectangle.gdp", args, so, se), kExitInvalid);
  }
  EXPECT_EQ(run_binary("reformulate \"" + (kData / "two_rectangle.gdp").string() + "\" --epsilon 0"),
            kExitInvalid);
}

TEST(CliReformulate, NonlinearNeedsM) {
  const std::string text = "[variables]\nx 0 3\n[disjunction D]\ndisjunct Y1:\n  q: x^2 <= 4\n"
                           "disjunct Y2:\n  l: x >= 2.5\n[objective]\nmaximize x\n";
  const fs::path path = scratch("nonlinear.gdp", text);
  std::ostringstream so, se;
  EXPECT_EQ(cmd_reformulate(path, {}, so, se), kExitInvalid);
  ReformulateArgs args;
  args.m = "constraint:q=5";
  args.out = fs::temp_directory_path() / "gdpkit_cli_nl.lp";
  std::ostringstream so2, se2;
  // the LP format has no nonlinear rows, so writing still fails
  EXPECT_EQ(cmd_reformulate(path, args, so2, se2), kExitInvalid);
}

TEST(CliMSpec, Parsing) {
  EXPECT_FALSE(parse_m_spec("auto").global.has_value());
  EXPECT_EQ(*parse_m_spec("100").global, 100.0);
  const MSpec s = parse_m_spec("7,disjunction:D=1,disjunct:Y1=2,constraint:a2=3");
  EXPECT_EQ(*s.global, 7.0);
  EXPECT_EQ(s.per_disjunction.at("D"), 1.0);
  EXPECT_EQ(s.per_disjunct.at("Y1"), 2.0);
  EXPECT_EQ(s.per_constraint.at("a2"), 3.0);
  for (const char* bad : {"", "x", "disjunct:Y1", "bogus:a=1", "constraint:a=-1"}) {
    EXPECT_THROW(parse_m_spec(bad), Error) << bad;
  }
}

TEST(CliSolve, SuperstructureBigMMip) {
  const Outcome r = solve(kData / "superstructure.gdp", {});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("objective: 8\n"), std::string::npos);
  EXPECT_NE(r.out.find("selected: Y_R1\n"), std::string::npos);
}

TEST(CliSolve, TwoRectangleAllPaths) {
  for (const char* method : {"bigm", "hull"}) {
    for (const char* algo : {"mip", "dbb", "cuts"}) {
      SolveArgs args;
      args.method = method;
      args.algo = algo;
      const Outcome r = solve(kData / "two_rectangle.gdp", args);
      EXPECT_EQ(r.code, kExitOk) << method << " " << algo;
      EXPECT_NE(r.out.find("objective: 7\n"), std::string::npos) << r.out;
      EXPECT_NE(r.out.find("selected: Y2\n"), std::string::npos);
    }
  }
}

TEST(CliSolve, CardinalityOverOneElementIsInvalid) {
  const std::string text = std::string(kTwoVar) +
                           "[disjunction D]\ndisjunct Y1:\n  x1 <= 2\ndisjunct Y2:\n  x1 >= 3\n"
                           "[cardinality]\nbad: exactly 2 of Y1\n[objective]\nmaximize x1\n";
  EXPECT_EQ(solve(scratch("card.gdp", text), {}).code, kExitInvalid);
}

TEST(CliSolve, InfeasibleAndUnbounded) {
  const std::string infeasible = std::string(kTwoVar) +
                                 "[constraints]\nc: x1 + x2 >= 30\n[objective]\nmaximize x1\n";
  EXPECT_EQ(solve(scratch("infeasible.gdp", infeasible), {}).code, kExitInfeasible);
  const std::string unbounded = "[variables]\nx 0 inf\n[objective]\nmaximize x\n";
  EXPECT_EQ(solve(scratch("unbounded.gdp", unbounded), {}).code, kExitUnbounded);
}

TEST(CliSolve, BadFlags) {
  SolveArgs args;
  args.algo = "simulated-annealing";
  EXPECT_EQ(solve(kData / "two_rectangle.gdp", args).code, kExitInvalid);
  EXPECT_EQ(run_binary("solve"), kExitInvalid);
  EXPECT_EQ(run_binary("frobnicate x"), kExitInvalid);
  EXPECT_EQ(run_binary("--help"), kExitOk);
}

TEST(CliSolve, LogFile) {
  SolveArgs args;
  args.algo = "cuts";
  args.log = fs::temp_directory_path() / "gdpkit_cli_solve.log";
  ASSERT_EQ(solve(kData / "two_rectangle.gdp", args).code, kExitOk);
  const std::string log = slurp(*args.log);
  EXPECT_NE(log.find("cut"), std::string::npos);
  EXPECT_FALSE(log.empty());
}

TEST(CliSolve, ReportsAreByteIdentical) {
  for (const char* algo : {"mip", "dbb", "cuts"}) {
    SolveArgs args;
    args.algo = algo;
    EXPECT_EQ(solve(kData / "superstructure.gdp", args).out,
              solve(kData / "superstructure.gdp", args).out);
  }
  EXPECT_EQ(compare(kData / "superstructure.gdp").out, compare(kData / "superstructure.gdp").out);
}

TEST(CliSolve, BinaryHonoursLogLevel) {
  const std::string file = "\"" + (kData / "two_rectangle.gdp").string() + "\"";
  EXPECT_EQ(run_binary("solve " + file, "GDPKIT_LOG=debug"), kExitOk);
  EXPECT_EQ(run_binary("solve " + file + " --algo dbb --method hull"), kExitOk);
}

TEST(CliCompare, TwoRectangleOrdering) {
  const Outcome r = compare(kData / "two_rectangle.gdp");
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("bigm relaxation: 12 (9 rows, 4 columns)"), std::string::npos);
  EXPECT_NE(r.out.find("hull relaxation: 7 (15 rows, 8 columns)"), std::string::npos);
  EXPECT_NE(r.out.find("ordering: ok"), std::string::npos);
}

TEST(CliCompare, DegenerateGapIsZero) {
  // every disjunct constraint is implied by the bounds, so M = 0
  const std::string text = "[variables]\nx 0 10\n[disjunction D]\ndisjunct Y1:\n  x <= 10\n"
                           "disjunct Y2:\n  x >= 0\n[objective]\nmaximize x\n";
  const Outcome r = compare(scratch("degenerate.gdp", text));
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("gap: 0\n"), std::string::npos) << r.out;
}

TEST(CliCompare, HullIsLarger) {
  const Outcome r = compare(kData / "superstructure.gdp");
  EXPECT_EQ(r.code, kExitOk);
  const GdpModel m = read_model_file(kData / "superstructure.gdp");
  const MilpModel big = reformulate_bigm(m).milp;
  const MilpModel hull = reformulate_hull(m).milp;
  EXPECT_GT(hull.rows.size(), big.rows.size());
  EXPECT_GT(hull.variables.size(), big.variables.size());
  EXPECT_NE(r.out.find("(" + std::to_string(big.rows.size()) + " rows, " +
                       std::to_string(big.variables.size()) + " columns)"),
            std::string::npos);
}

TEST(ModelFile, DataFilesRoundTrip) {
  for (const char* name : {"two_rectangle.gdp", "superstructure.gdp"}) {
    const GdpModel m = read_model_file(kData / name);
    const std::string once = emit_model(m);
    EXPECT_EQ(emit_model(parse_model(once)), once) << name;
  }
}

TEST(ModelFile, MatchesBuiltFixtures) {
  const GdpModel file = read_model_file(kData / "superstructure.gdp");
  EXPECT_EQ(emit_model(file), emit_model(testing::superstructure()));
  EXPECT_EQ(emit_model(read_model_file(kData / "two_rectangle.gdp")),
            emit_model(testing::two_rectangle()));
}

TEST(ModelFile, Expressions) {
  const GdpModel m = read_model_file(kData / "two_rectangle.gdp");
  const Expr e = parse_expression("2 * (x1 - 3) + 0.25 * x2", m);
  ASSERT_TRUE(std::holds_alternative<AffineExpr>(e));
  const AffineExpr& a = std::get<AffineExpr>(e);
  EXPECT_EQ(a.coefficient(VarId{0}), 2.0);
  EXPECT_EQ(a.coefficient(VarId{1}), 0.25);
  EXPECT_EQ(a.constant(), -6.0);
  const Expr q = parse_expression("x1^2 - x1 * x2", m);
  EXPECT_TRUE(std::holds_alternative<NlExpr>(q));
  EXPECT_EQ(format_expression(parse_expression(format_expression(q, m), m), m),
            format_expression(q, m));
  EXPECT_THROW(parse_expression("x1 + y", m), Error);
  EXPECT_THROW(parse_expression("x1 / 2", m), Error);
  EXPECT_EQ(format_real(0.1), "0.1");
}

// Property: emit -> parse -> emit is stable on the corpus and preserves the
// optimum.
TEST(ModelFileProperty, CorpusRoundTrip) {
  for (const auto& m : testing::corpus()) {
    const std::string once = emit_model(m);
    const GdpModel back = parse_model(once);
    ASSERT_EQ(emit_model(back), once);
    const MipSolution a = solve_mip(reformulate_bigm(m).milp);
    const MipSolution b = solve_mip(reformulate_bigm(back).milp);
    ASSERT_EQ(a.status, b.status);
    if (a.status == SolveStatus::kOptimal) EXPECT_NEAR(a.objective, b.objective, 1e-9);
  }
}

}  // namespace
}  // namespace gdpkit
