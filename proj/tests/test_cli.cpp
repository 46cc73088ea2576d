#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "rqm/cli/commands.hpp"

using namespace rqm;
using namespace rqm::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kSpecs = RQMKIT_EXAMPLES;

struct Invocation {
  int status = -1;
  std::string stdout_text;
  std::string stderr_text;
  Json report;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "rqmkit-cli-tests";
  fs::create_directories(dir);
  return dir / name;
}

Invocation run_cli(const std::string& args, const std::string& tag) {
  const fs::path out = scratch(tag + ".json");
  const fs::path so = scratch(tag + ".out");
  const fs::path se = scratch(tag + ".err");
  fs::remove(out);
  const std::string cmd = std::string("\"") + RQMKIT_BINARY + "\" " + args + " --out \"" + out.string() + "\" >\"" +
                          so.string() + "\" 2>\"" + se.string() + "\"";
  Invocation inv;
  const int raw = std::system(cmd.c_str());
  inv.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  inv.stdout_text = slurp(so);
  inv.stderr_text = slurp(se);
  if (fs::exists(out)) inv.report = Json::parse(slurp(out));
  return inv;
}

std::string spec(const std::string& name) { return "\"" + (kSpecs / name).string() + "\""; }

Problem parse(const std::string& text, Overrides o = {}) { return parse_problem(text, "inline", o); }

}  // namespace

TEST_CASE("every shipped example passes") {
  for (const char* name : {"constant_transition.json", "classical_walk.json", "probe_m2.json", "random_chain.json"}) {
    Invocation inv = run_cli("all " + spec(name), std::string("example-") + name);
    INFO(name << "\n" << inv.stdout_text << inv.stderr_text);
    CHECK(inv.status == kExitPass);
    CHECK(inv.report.at("pass").get<bool>());
    CHECK(inv.report.at("schema_version") == kReportSchemaVersion);
  }
}

TEST_CASE("invariant command on the constant-transition RQM") {
  Invocation inv = run_cli("invariant " + spec("constant_transition.json"), "invariant");
  REQUIRE(inv.status == kExitPass);
  const Json& results = inv.report.at("results");
  REQUIRE(results.size() == 1);
  const Json& out = results[0].at("outputs");
  CHECK(out.at("fixed_dim") == 1);
  // Densities are written as nested [re, im] pairs.
  const Json& rho = out.at("canonical").at("densities")[0];
  CHECK(rho[0][0][0].get<double>() == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(rho[1][1][0].get<double>() == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(std::abs(rho[0][1][0].get<double>()) < 1e-10);
}

TEST_CASE("reports are byte-identical across runs") {
  for (const char* name : {"random_chain.json", "probe_m2.json"}) {
    run_cli("all " + spec(name) + " --seed 9", "det-a");
    const std::string a = slurp(scratch("det-a.json"));
    run_cli("all " + spec(name) + " --seed 9", "det-b");
    const std::string b = slurp(scratch("det-b.json"));
    CHECK_FALSE(a.empty());
    CHECK(a == b);
  }
}

TEST_CASE("command-line options reach the report") {
  Invocation inv = run_cli("chain " + spec("random_chain.json") + " --seed 77 --tolerance 1e-7 --depth 2", "opts");
  CHECK(inv.status == kExitPass);
  const Json& o = inv.report.at("options");
  CHECK(o.at("seed") == 77);
  CHECK(o.at("tolerance").get<double>() == 1e-7);
  CHECK(o.at("depth") == 2);
  for (const Json& r : inv.report.at("results")) CHECK(r.at("outputs").at("levels").size() == 3);
  CHECK_FALSE(inv.report.at("results")[0].contains("elapsed_ms"));

  Invocation timed = run_cli("validate " + spec("constant_transition.json") + " --timing", "timing");
  CHECK(timed.report.at("results")[0].contains("elapsed_ms"));
}

TEST_CASE("a transpose declared as a morphism is rejected naming multiplicativity") {
  Invocation inv = run_cli("validate " + spec("invalid/transpose_morphism.json"), "transpose");
  CHECK(inv.status == kExitSpecError);
  CHECK(inv.report.at("error").at("check_id") == "morphism.multiplicative");
  CHECK(inv.stderr_text.find("/maps/transpose") != std::string::npos);
}

TEST_CASE("a non-stochastic kernel is rejected with its row") {
  Invocation inv = run_cli("all " + spec("invalid/bad_kernel.json"), "kernel");
  CHECK(inv.status == kExitSpecError);
  CHECK(inv.report.at("error").at("check_id") == "kernel.row-sum");
  CHECK(inv.report.at("error").at("message").get<std::string>().find("row 1") != std::string::npos);
}

TEST_CASE("unresolved references and unknown commands") {
  Invocation inv = run_cli("all " + spec("invalid/unresolved.json"), "unresolved");
  CHECK(inv.status == kExitSpecError);
  CHECK(inv.stdout_text.find("missing") != std::string::npos);

  Invocation bad = run_cli("frobnicate " + spec("constant_transition.json"), "unknown");
  CHECK(bad.status == kExitSpecError);

  Invocation absent = run_cli("skew " + spec("invalid/unresolved.json"), "absent");
  CHECK(absent.status == kExitSpecError);
}

TEST_CASE("a failed check exits with status 1") {
  Invocation inv = run_cli("all " + spec("invalid/failing_check.json"), "failing");
  CHECK(inv.status == kExitCheckFailure);
  const Json& checks = inv.report.at("results")[0].at("checks");
  auto it = std::find_if(checks.begin(), checks.end(), [](const Json& c) { return c.at("id") == "invariant.state"; });
  REQUIRE(it != checks.end());
  CHECK_FALSE(it->at("pass").get<bool>());
  CHECK(inv.stdout_text.find("[FAIL]") != std::string::npos);
}

TEST_CASE("probe-implementability gives a witness or a structured failure") {
  Invocation inv = run_cli("probe-implementability " + spec("probe_m2.json"), "probe");
  REQUIRE(inv.status == kExitPass);
  const Json& results = inv.report.at("results");
  REQUIRE(results.size() == 4);
  CHECK(results[0].at("outputs").at("witness").at("parameter").at("blocks").size() == 1);
  CHECK(results[2].at("outputs").at("k_dim") == 3);
  CHECK(results[2].at("outputs").at("witness").at("copies") == 3);
  CHECK(results[3].at("outputs").at("witness").is_null());
  CHECK(results[3].at("outputs").at("failure").at("unreachable_padding") == Json::array({1}));
}

TEST_CASE("minimal spec with M2 and the normalized trace loads") {
  Problem p = parse(R"({"algebras": {"M2": {"blocks": [2]}},
                        "states": {"tr": {"maximally_mixed": "M2"}},
                        "commands": [{"command": "validate"}]})");
  CHECK(p.algebras.get("M2", "", "algebra") == Algebra::full_matrix(2));
  CHECK(p.states.get("tr", "", "state").evaluate(Element::unit(Algebra::full_matrix(2))) == Complex(1.0));
  RunResult r = run_problem(p, {});
  CHECK(r.exit_code == kExitPass);
}

TEST_CASE("spec errors carry a location") {
  try {
    parse("{\"algebras\": {\"M2\": {\"blocks\": [2]}},\n \"commands\": [}");
    FAIL("parse error not reported");
  } catch (const SpecError& e) {
    CHECK(std::string(e.what()).find("parse error") != std::string::npos);
  }
  try {
    parse(R"({"algebra": {}})");
    FAIL("unknown section accepted");
  } catch (const SpecError& e) {
    CHECK(std::string(e.what()).find("algebra") != std::string::npos);
  }
  try {
    parse(R"({"states": {"s": {"algebra": {"blocks": [2]}, "densities": [[[1, 0], [0, 1]]]}}})");
    FAIL("trace-two density accepted");
  } catch (const SpecError& e) {
    CHECK(e.where() == "/states/s");
  }
  try {
    parse(R"({"rqms": {"a": {"implement": {"construction": "compose", "outer": "b", "inner": "b"}},
                       "b": {"implement": {"construction": "compose", "outer": "a", "inner": "a"}}}})");
    FAIL("cycle accepted");
  } catch (const SpecError& e) {
    CHECK(std::string(e.what()).find("circular") != std::string::npos);
  }
}

TEST_CASE("overrides win over spec options") {
  const std::string text = R"({"options": {"seed": 3, "tolerance": 1e-6, "depth": 4}, "commands": []})";
  Problem a = parse(text);
  CHECK(a.options.seed == 3);
  CHECK(a.options.tolerance == 1e-6);
  CHECK(a.options.depth == std::optional<std::size_t>(4));
  Overrides o;
  o.seed = 5;
  o.depth = 1;
  Problem b = parse(text, o);
  CHECK(b.options.seed == 5);
  CHECK(b.options.depth == std::optional<std::size_t>(1));
  CHECK(b.options.tolerance == 1e-6);
}

TEST_CASE("filtered runs still build earlier named products") {
  Problem p = load_problem((kSpecs / "probe_m2.json").string(), {});
  RunOptions run;
  run.command = "induce";
  RunResult r = run_problem(p, run);
  CHECK(r.exit_code == kExitPass);
  REQUIRE(r.report.at("results").size() == 1);
  CHECK(r.report.at("results")[0].at("command") == "induce");

  Problem q = load_problem((kSpecs / "probe_m2.json").string(), {});
  run.command = "markov";
  CHECK_THROWS_AS(run_problem(q, run), SpecError);
}
