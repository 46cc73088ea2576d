#include "rqm/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "rqm/invariant.hpp"
#include "rqm/random.hpp"

namespace rqm::cli {

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"validate", "induce",    "compose",      "implement",
                                                 "chain",    "markov",    "stationarity", "invariant",
                                                 "skew",     "classical", "probe-implementability"};
  return names;
}

namespace {

std::string child(const std::string& where, const std::string& key) { return where + "/" + key; }

struct Outcome {
  Json checks = Json::array();
  Json outputs = Json::object();
  bool pass = true;

  void check(const std::string& id, double residual, double tolerance, Json detail = Json::object()) {
    add(id, residual, tolerance, residual <= tolerance, std::move(detail));
  }
  /// A check whose outcome must match `expect` (true: residual within tolerance).
  void expect(const std::string& id, double residual, double tolerance, bool expected, Json detail = Json::object()) {
    detail["expect_within_tolerance"] = expected;
    add(id, residual, tolerance, (residual <= tolerance) == expected, std::move(detail));
  }
  void add(const std::string& id, double residual, double tolerance, bool ok, Json detail) {
    Json c = {{"id", id}, {"residual", residual}, {"tolerance", tolerance}, {"pass", ok}};
    for (auto& item : detail.items()) c[item.key()] = item.value();
    checks.push_back(std::move(c));
    pass = pass && ok;
  }
};

double choi_defect(const LinearMap& f) { return std::max(0.0, -cp_diagnostics(f).min_choi_eigenvalue); }

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

bool flag(const Json& j, const char* key, bool fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) throw SpecError(child(where, key), "expected a boolean");
  return j.at(key).get<bool>();
}

std::size_t size_or(const Json& j, const char* key, std::size_t fallback, const std::string& where) {
  return j.contains(key) ? read_size(j.at(key), child(where, key)) : fallback;
}

class Runner {
 public:
  explicit Runner(Problem& p) : p_(p), r_(p), tol_(p.options.tolerance) {}

  Outcome run(const std::string& cmd, const Json& j, const std::string& at) {
    Outcome o;
    if (cmd == "validate") validate(o);
    else if (cmd == "induce") induce(o, j, at);
    else if (cmd == "compose") compose_cmd(o, j, at);
    else if (cmd == "implement") implement(o, j, at);
    else if (cmd == "chain") chain_cmd(o, j, at);
    else if (cmd == "markov") markov(o, j, at);
    else if (cmd == "stationarity") stationarity(o, j, at);
    else if (cmd == "invariant") invariant(o, j, at);
    else if (cmd == "skew") skew(o, j, at);
    else if (cmd == "classical") classical(o, j, at);
    else if (cmd == "probe-implementability") probe(o, j, at);
    else throw SpecError(child(at, "command"), "unknown command '" + cmd + "'");
    return o;
  }

 private:
  std::string name_of(const Json& j, const char* key, const std::string& at) {
    return read_string(field(j, key, at), child(at, key));
  }
  const RandomQuantumMap& rqm_of(const Json& j, const char* key, const std::string& at) {
    return r_.rqm(name_of(j, key, at), child(at, key));
  }
  std::string store_name(const Json& j, const std::string& at) {
    return j.contains("as") ? read_string(j.at("as"), child(at, "as")) : std::string();
  }

  const TruncatedChain& chain_of(const Json& j, const std::string& at) {
    if (j.contains("chain")) return p_.chains.get(name_of(j, "chain", at), child(at, "chain"), "chain");
    ChainSpec spec = read_chain_spec(r_, j, at);
    scratch_.put("", build_chain(spec));
    return scratch_.get("", at, "chain");
  }

  void validate(Outcome& o) {
    Json algebras = Json::object();
    for (const auto& n : p_.algebras.names()) {
      const Algebra& a = p_.algebras.get(n, "", "algebra");
      algebras[n] = {{"blocks", a.blocks()}, {"dim", a.dim()}};
    }
    Json maps = Json::object();
    for (const auto& n : p_.maps.names()) {
      const LinearMap& f = p_.maps.get(n, "", "map");
      maps[n] = {{"kind", to_string(f.kind())}, {"domain", f.domain().blocks()}, {"codomain", f.codomain().blocks()}};
      const Json detail = {{"object", n}};
      if (f.kind() == MapKind::Morphism) {
        MorphismDefects d = morphism_defects(f);
        o.check("morphism.multiplicative", d.multiplicative, tol_, detail);
        o.check("morphism.star", d.star, tol_, detail);
        o.check("morphism.unital", d.unital, tol_, detail);
      }
      if (f.kind() != MapKind::Raw) o.check("cp.choi-positive", choi_defect(f), tol_, detail);
    }
    Json rqms = Json::object();
    for (const auto& n : p_.rqms.names()) {
      const RandomQuantumMap& q = p_.rqms.get(n, "", "rqm");
      rqms[n] = {{"source", q.source().blocks()}, {"target", q.target().blocks()}, {"parameter", q.parameter().blocks()}};
      MorphismDefects d = morphism_defects(q.phi());
      const Json detail = {{"object", n}};
      o.check("morphism.multiplicative", d.multiplicative, tol_, detail);
      o.check("morphism.star", d.star, tol_, detail);
      o.check("morphism.unital", d.unital, tol_, detail);
    }
    Json chains = Json::object();
    for (const auto& n : p_.chains.names()) {
      const TruncatedChain& c = p_.chains.get(n, "", "chain");
      chains[n] = {{"depth", c.depth()}, {"top_dim", c.level(c.depth()).dim()}, {"homogeneous", c.homogeneous()}};
    }
    o.outputs = {{"algebras", algebras},
                 {"elements", p_.elements.names()},
                 {"states", p_.states.names()},
                 {"maps", maps},
                 {"rqms", rqms},
                 {"kernels", p_.kernels.names()},
                 {"random_maps", p_.random_maps.names()},
                 {"chains", chains}};
  }

  void induce(Outcome& o, const Json& j, const std::string& at) {
    const RandomQuantumMap& q = rqm_of(j, "rqm", at);
    LinearMap f = induced_nfmo(q);
    Transition direct = induced_transition(q);
    Transition dual = adjoint_transition(f);
    o.check("induce.transition-duality", max_abs(direct.dual() - dual.dual()), tol_);
    o.check("cp.choi-positive", choi_defect(f), tol_);
    o.outputs["nfmo"] = write_map(f);
    if (auto n = store_name(j, at); !n.empty()) p_.maps.put(n, f);
  }

  void compose_cmd(Outcome& o, const Json& j, const std::string& at) {
    const RandomQuantumMap& outer = rqm_of(j, "outer", at);
    const RandomQuantumMap& inner = rqm_of(j, "inner", at);
    if (inner.target() != outer.source()) {
      throw SpecError(at, "inner target " + describe(inner.target()) + " differs from outer source " +
                              describe(outer.source()));
    }
    RandomQuantumMap composed = implement_compose(outer, inner);
    LinearMap product = compose(induced_nfmo(outer), induced_nfmo(inner));
    o.check("chapman-kolmogorov.nfmo", basis_distance(induced_nfmo(composed), product), tol_);

    Transition tc = induced_transition(composed);
    Transition to = induced_transition(outer);
    Transition ti = induced_transition(inner);
    Rng rng(p_.options.seed);
    double worst = 0.0;
    const std::size_t samples = size_or(j, "states", 10, at);
    for (std::size_t s = 0; s < samples; ++s) {
      State rho = random_state(outer.target(), rng);
      auto lhs = tc.apply_densities(rho.densities());
      auto rhs = ti.apply_densities(to.apply_densities(rho.densities()));
      worst = std::max(worst, distance(lhs, rhs));
    }
    o.check("chapman-kolmogorov.transition", worst, tol_, {{"states", samples}});
    o.outputs["parameter"] = write_algebra(composed.parameter());
    if (auto n = store_name(j, at); !n.empty()) p_.rqms.put(n, composed);
  }

  void implement(Outcome& o, const Json& j, const std::string& at) {
    Construction c = build_construction(r_, j, at);
    LinearMap f = induced_nfmo(c.rqm);
    o.check("implement.reproduction", basis_distance(f, c.target), tol_);
    o.check("cp.choi-positive", choi_defect(f), tol_);
    o.outputs["parameter"] = write_algebra(c.rqm.parameter());
    o.outputs["nu"] = write_state(c.rqm.nu());
    o.outputs["nfmo"] = write_map(f);
    if (auto n = store_name(j, at); !n.empty()) p_.rqms.put(n, c.rqm);
  }

  void chain_cmd(Outcome& o, const Json& j, const std::string& at) {
    const TruncatedChain& c = chain_of(j, at);
    const std::size_t depth = c.depth();
    Json levels = Json::array();
    for (std::size_t n = 0; n <= depth; ++n) levels.push_back({{"blocks", c.level(n).blocks()}, {"dim", c.level(n).dim()}});
    o.outputs["levels"] = levels;

    double psi_defect = 0.0;
    for (std::size_t n = 0; n <= depth; ++n) {
      MorphismDefects d = morphism_defects(c.psi(n));
      psi_defect = std::max({psi_defect, d.multiplicative, d.star, d.unital});
    }
    o.check("chain.psi-morphism", psi_defect, tol_);

    // μ_N(x ⊗ 1) = μ_n(x), on bases while cheap and on seeded samples beyond.
    Rng rng(p_.options.seed);
    const std::size_t top = c.level(depth).dim();
    double consistency = 0.0;
    for (std::size_t n = 0; n < depth; ++n) {
      const Algebra& b = c.level(n);
      const bool exhaustive = b.dim() * top <= (std::size_t{1} << 22);
      const std::size_t count = exhaustive ? b.dim() : 64;
      for (std::size_t k = 0; k < count; ++k) {
        Element x = exhaustive ? Element::basis(b, k) : random_element(b, rng);
        consistency = std::max(consistency, std::abs(c.mu(depth).evaluate(c.embed(x, n)) - c.mu(n).evaluate(x)));
      }
    }
    o.check("chain.consistency", consistency, tol_);

    SemiCommutativityReport sc = check_semi_commutative(c, tol_);
    o.outputs["semi_commutativity"] = {{"sufficient_condition_holds", sc.sufficient_condition_holds},
                                       {"max_commutator", sc.max_commutator},
                                       {"worst_pair", sc.worst_pair},
                                       {"note", "distinct-time commutation is sufficient, not necessary"}};
    if (auto n = store_name(j, at); !n.empty()) p_.chains.put(n, c);
  }

  void markov(Outcome& o, const Json& j, const std::string& at) {
    const TruncatedChain& c = chain_of(j, at);
    VerifyOptions v;
    v.tolerance = tol_;
    v.seed = p_.options.seed;
    v.random_samples = size_or(j, "samples", v.random_samples, at);
    std::vector<std::size_t> levels;
    if (j.contains("level")) levels.push_back(read_size(j.at("level"), child(at, "level")));
    for (std::size_t n = 0; !j.contains("level") && n < c.depth(); ++n) levels.push_back(n);
    for (std::size_t n : levels) {
      MarkovReport m = verify_markov(c, n, v);
      for (const CheckResult* cr : {&m.module_property, &m.state_compatibility, &m.containment}) {
        o.check(cr->id, cr->residual, cr->tolerance, {{"level", n}});
      }
    }
  }

  void stationarity(Outcome& o, const Json& j, const std::string& at) {
    const TruncatedChain& c = chain_of(j, at);
    StationarityOptions s;
    s.tolerance = tol_;
    s.seed = p_.options.seed;
    const std::size_t r_max = size_or(j, "r_max", 2, at);
    const std::size_t l_max = size_or(j, "l_max", 1, at);
    StationarityReport rep = check_stationarity(c, r_max, l_max, s);
    o.expect("stationarity.shift", rep.max_violation, tol_, flag(j, "expect", true, at),
             {{"r_max", r_max}, {"l_max", l_max}, {"sampled", rep.sampled}});
    Json table = Json::array();
    for (const ShiftViolation& v : rep.by_length_and_shift) {
      table.push_back({{"r", v.r}, {"shift", v.shift}, {"max_violation", v.max_violation}, {"words", v.words}});
    }
    o.outputs["violations"] = table;
    o.outputs["worst_word"] = rep.worst_word;
    o.outputs["sigma_invariance_residual"] = verify_invariant(c.step(1), c.sigma());
  }

  void invariant(Outcome& o, const Json& j, const std::string& at) {
    const RandomQuantumMap& q = rqm_of(j, "rqm", at);
    InvariantOptions opt;
    opt.tolerance = tol_;
    InvariantReport rep = invariant_states(q, opt);
    o.check("invariant.residual", rep.residual, tol_);
    if (j.contains("expect_fixed_dim")) {
      const std::size_t want = read_size(j.at("expect_fixed_dim"), child(at, "expect_fixed_dim"));
      o.check("invariant.fixed-dim", want == rep.fixed_dim ? 0.0 : 1.0, 0.0, {{"expected", want}});
    }
    if (j.contains("state")) {
      const State& s = r_.state(name_of(j, "state", at), child(at, "state"));
      o.expect("invariant.state", verify_invariant(q, s), tol_, flag(j, "expect", true, at));
    }
    o.outputs["fixed_dim"] = rep.fixed_dim;
    o.outputs["canonical"] = write_state(rep.canonical);
    o.outputs["cesaro_iterations"] = rep.cesaro_iterations;
    o.outputs["cesaro_residual"] = rep.cesaro_residual;
    if (auto n = store_name(j, at); !n.empty()) p_.states.put(n, rep.canonical);
  }

  void skew(Outcome& o, const Json& j, const std::string& at) {
    const RandomQuantumMap& q = rqm_of(j, "rqm", at);
    const State& s = r_.state(name_of(j, "state", at), child(at, "state"));
    const std::size_t depth = size_or(j, "depth", p_.options.depth.value_or(1), at);
    SkewReport rep = verify_skew_invariance(q, s, depth, tol_, p_.options.dim_cap);
    o.check("skew.identity", rep.identity_residual, tol_, {{"depth", depth}});
    o.expect("skew.invariance", rep.violation, tol_, flag(j, "expect", true, at), {{"depth", depth}});
    const bool agree = (rep.violation <= tol_) == (rep.invariance_residual <= tol_);
    o.check("skew.equivalence", agree ? 0.0 : 1.0, 0.0,
            {{"skew_within_tolerance", rep.violation <= tol_}, {"state_invariant", rep.invariance_residual <= tol_}});
    o.outputs["violation"] = rep.violation;
    o.outputs["invariance_residual"] = rep.invariance_residual;
  }

  void classical(Outcome& o, const Json& j, const std::string& at) {
    const bool has_map = j.contains("random_map");
    if (has_map == j.contains("kernel")) throw SpecError(at, "give exactly one of 'random_map' or 'kernel'");
    if (!has_map) {
      const Kernel& k = r_.kernel(name_of(j, "kernel", at), child(at, "kernel"));
      ClassicalRandomMap m = implement_kernel(k);
      o.check("classical.implementability", (kernel_of_random_map(m).matrix() - k.matrix()).cwiseAbs().maxCoeff(),
              tol_);
      o.check("classical.round-trip", (kernel_of_fmo(fmo_of_kernel(k)).matrix() - k.matrix()).cwiseAbs().maxCoeff(),
              tol_);
      o.outputs["implementing_map"] = {{"x", m.x.size}, {"y", m.y.size}, {"z", m.z.size}, {"table", m.table}, {"nu", m.nu}};
      if (auto n = store_name(j, at); !n.empty()) p_.random_maps.put(n, m);
      return;
    }
    const ClassicalRandomMap& m = r_.random_map(name_of(j, "random_map", at), child(at, "random_map"));
    Kernel k = kernel_of_random_map(m);
    RandomQuantumMap lifted = lift_random_map(m);
    o.check("classical.lift", basis_distance(induced_nfmo(lifted), fmo_of_kernel(k)), tol_);
    o.check("classical.round-trip", (kernel_of_fmo(fmo_of_kernel(k)).matrix() - k.matrix()).cwiseAbs().maxCoeff(),
            tol_);
    Json kernel = Json::array();
    for (Eigen::Index x = 0; x < k.matrix().rows(); ++x) {
      Json row = Json::array();
      for (Eigen::Index y = 0; y < k.matrix().cols(); ++y) row.push_back(k.matrix()(x, y));
      kernel.push_back(std::move(row));
    }
    o.outputs["kernel"] = kernel;
    if (m.x.size != m.y.size) return;

    std::vector<double> stat = stationary_distribution(k);
    InvariantOptions opt;
    opt.tolerance = tol_;
    InvariantReport inv = invariant_states(lifted, opt);
    std::vector<double> q = state_distribution(inv.canonical);
    Eigen::RowVectorXd qv = Eigen::Map<Eigen::RowVectorXd>(q.data(), static_cast<Eigen::Index>(q.size()));
    const double gap = (qv * k.matrix() - qv).cwiseAbs().maxCoeff();
    o.check("classical.stationary", gap, tol_, {{"fixed_dim", inv.fixed_dim}});
    if (inv.fixed_dim == 1) {
      double diff = 0.0;
      for (std::size_t x = 0; x < q.size(); ++x) diff = std::max(diff, std::abs(q[x] - stat[x]));
      o.check("classical.stationary-match", diff, tol_);
    }
    o.outputs["stationary_distribution"] = inv.fixed_dim == 1 ? Json(stat) : Json(q);

    if (!j.contains("sigma")) return;
    std::vector<double> sigma = read_doubles(j.at("sigma"), child(at, "sigma"));
    const std::size_t steps = size_or(j, "steps", p_.options.depth.value_or(1), at);
    if (steps == 0) throw SpecError(child(at, "steps"), "steps must be at least 1");
    std::vector<ClassicalRandomMap> maps(steps, m);
    TruncatedChain c = build_chain(lift_chain({m}, sigma, steps, p_.options.dim_cap));
    double worst = 0.0;
    Json marginals = Json::array();
    for (std::size_t n = 0; n <= steps; ++n) {
      std::vector<double> classical = classical_chain_marginals(maps, sigma, n);
      for (std::size_t x = 0; x < classical.size(); ++x) {
        Complex quantum = c.mu(n).evaluate(c.psi(n).image(x));
        worst = std::max(worst, std::abs(quantum - classical[x]));
      }
      marginals.push_back(classical);
    }
    o.check("classical.marginals", worst, tol_, {{"steps", steps}});
    o.outputs["marginals"] = marginals;
  }

  void probe(Outcome& o, const Json& j, const std::string& at) {
    const LinearMap& f = r_.map(name_of(j, "map", at), child(at, "map"));
    PaddingOptions opt;
    if (j.contains("extra_copies")) {
      if (!j.at("extra_copies").is_number_integer()) throw SpecError(child(at, "extra_copies"), "expected an integer");
      opt.extra_copies = j.at("extra_copies").get<int>();
    }
    StinespringImplementation s = implement_from_stinespring(f, opt);
    o.check("stinespring.isometry", s.dilation.isometry, tol_);
    o.check("stinespring.reproduction", s.dilation.reproduction, tol_);
    o.outputs["k_dim"] = s.k_dim;
    if (s.witness) {
      o.check("implement.reproduction", s.reproduction_residual, tol_);
      o.outputs["witness"] = {{"parameter", write_algebra(s.witness->parameter())},
                              {"copies", s.copies},
                              {"padding", s.padding},
                              {"padding_multiplicities", s.padding_multiplicities}};
      if (auto n = store_name(j, at); !n.empty()) p_.rqms.put(n, *s.witness);
    } else {
      const PaddingFailure& pf = *s.failure;
      o.outputs["witness"] = nullptr;
      o.outputs["failure"] = {{"k_dim", pf.k_dim}, {"h", pf.h}, {"unreachable_padding", pf.unreachable},
                              {"message", pf.message}};
    }
  }

  Problem& p_;
  ProblemResolver r_;
  double tol_;
  Registry<TruncatedChain> scratch_;
};

std::string describe_line(std::size_t index, const std::string& cmd, const Outcome& o) {
  std::ostringstream os;
  os << (o.pass ? "[PASS] " : "[FAIL] ") << '#' << index << ' ' << cmd;
  for (const Json& c : o.checks) {
    os << "  " << c.at("id").get<std::string>() << '=' << c.at("residual").get<double>();
    if (!c.at("pass").get<bool>()) os << '!';
  }
  return os.str();
}

}  // namespace

RunResult run_problem(Problem& problem, const RunOptions& options) {
  const auto& known = command_names();
  if (options.command != "all" && std::find(known.begin(), known.end(), options.command) == known.end()) {
    throw SpecError("command line", "unknown command '" + options.command + "'");
  }

  RunResult result;
  result.report = {{"schema_version", kReportSchemaVersion},
                   {"command", options.command},
                   {"options",
                    {{"tolerance", problem.options.tolerance},
                     {"seed", problem.options.seed},
                     {"dim_cap", problem.options.dim_cap},
                     {"depth", problem.options.depth ? Json(*problem.options.depth) : Json(nullptr)}}}};
  Json results = Json::array();
  Runner runner(problem);
  bool any_fail = false;
  bool numerical = false;

  std::vector<std::pair<std::size_t, Json>> work;
  for (std::size_t i = 0; i < problem.commands.size(); ++i) work.emplace_back(i, problem.commands[i]);
  const bool implicit_validate =
      options.command == "validate" &&
      std::none_of(work.begin(), work.end(), [](const auto& w) { return w.second.at("command") == "validate"; });
  if (implicit_validate) work.emplace_back(problem.commands.size(), Json{{"command", "validate"}});

  std::size_t reported = 0;
  for (const auto& [index, entry] : work) {
    const std::string at = "/commands/" + std::to_string(index);
    const std::string cmd = entry.at("command").get<std::string>();
    const bool selected = options.command == "all" || options.command == cmd;
    if (!selected && !entry.contains("as")) continue;

    Json record = {{"index", index}, {"command", cmd}};
    const auto start = std::chrono::steady_clock::now();
    try {
      Outcome o = runner.run(cmd, entry, at);
      if (!selected) continue;
      record["pass"] = o.pass;
      record["checks"] = o.checks;
      record["outputs"] = o.outputs;
      any_fail = any_fail || !o.pass;
      result.summary.push_back(describe_line(index, cmd, o));
    } catch (const SpecError& e) {
      record["pass"] = false;
      record["error"] = {{"kind", "spec-error"}, {"where", e.where()}, {"message", e.what()}, {"check_id", e.check_id()}};
      results.push_back(record);
      result.summary.push_back("[ERROR] #" + std::to_string(index) + ' ' + cmd + "  " + e.what());
      result.report["results"] = results;
      result.report["pass"] = false;
      result.exit_code = kExitSpecError;
      return result;
    } catch (const Error& e) {
      const bool num = e.code() == ErrorCode::NumericalFailure;
      record["pass"] = false;
      record["error"] = {{"kind", to_string(e.code())}, {"where", at}, {"message", e.what()}, {"check_id", e.check_id()}};
      result.summary.push_back(std::string(num ? "[NUMERICAL-FAILURE] #" : "[ERROR] #") + std::to_string(index) + ' ' +
                               cmd + "  " + e.what());
      if (!num) {
        results.push_back(record);
        result.report["results"] = results;
        result.report["pass"] = false;
        result.exit_code = kExitSpecError;
        return result;
      }
      numerical = true;
      if (!selected) continue;
    }
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (options.timing) record["elapsed_ms"] = ms;
    if (!result.summary.empty()) {
      std::ostringstream t;
      t << "  (" << static_cast<long long>(std::llround(ms)) << " ms)";
      result.summary.back() += t.str();
    }
    results.push_back(std::move(record));
    ++reported;
  }

  if (reported == 0 && options.command != "all") {
    throw SpecError("/commands", "spec has no '" + options.command + "' commands");
  }
  result.report["results"] = results;
  result.report["pass"] = !any_fail && !numerical;
  result.exit_code = numerical ? kExitNumericalFailure : any_fail ? kExitCheckFailure : kExitPass;
  return result;
}

}  // namespace rqm::cli
