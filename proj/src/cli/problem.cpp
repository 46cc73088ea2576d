#include "rqm/cli/problem.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "rqm/invariant.hpp"
#include "rqm/random.hpp"

namespace rqm::cli {

namespace {

std::string child(const std::string& where, const std::string& key) { return where + "/" + key; }
std::string child(const std::string& where, std::size_t i) { return where + "/" + std::to_string(i); }

const char* const kSections[] = {"algebras", "elements", "states",   "maps",  "rqms",
                                 "kernels",  "random_maps", "chains"};

void expect_object(const Json& j, const std::string& where) {
  if (!j.is_object()) throw SpecError(where, "expected an object");
}

void expect_array(const Json& j, const std::string& where) {
  if (!j.is_array()) throw SpecError(where, "expected an array");
}

/// The single recognised key present in a declaration.
std::string discriminator(const Json& j, const std::string& where, std::initializer_list<const char*> keys) {
  expect_object(j, where);
  std::string found;
  for (const char* k : keys) {
    if (j.contains(k)) {
      if (!found.empty()) throw SpecError(where, "both '" + found + "' and '" + k + "' given");
      found = k;
    }
  }
  if (found.empty()) {
    std::string list;
    for (const char* k : keys) list += (list.empty() ? "" : ", ") + std::string(k);
    throw SpecError(where, "expected one of: " + list);
  }
  return found;
}

template <typename Fn>
auto guarded(const std::string& where, Fn fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw SpecError(where, std::string(to_string(e.code())) + ": " + e.what(), e.check_id());
  }
}

LinearMap tag_map(const LinearMap& f, const std::string& kind, double eps, const std::string& where) {
  if (kind == "morphism") return make_morphism(f, eps);
  if (kind == "cp" || kind == "cp_unital") return validate_cp_unital(f, eps);
  if (kind == "raw") return f;
  throw SpecError(where, "unknown map kind '" + kind + "' (morphism, cp_unital, raw)");
}

/// The map b ↦ σ(b) from A to ℂ.
LinearMap state_map(const State& s) {
  CMatrix row = s.functional().transpose();
  return validate_cp_unital(LinearMap(s.algebra(), Algebra::complex_numbers(), std::move(row)));
}

FiniteSpace read_space(const Json& j, const std::string& where) {
  if (j.is_number_integer()) return guarded(where, [&] { return make_space(read_size(j, where)); });
  expect_object(j, where);
  std::vector<std::string> labels;
  if (j.contains("labels")) labels = read_names(j.at("labels"), child(where, "labels"));
  std::size_t n = read_size(field(j, "size", where), child(where, "size"));
  return guarded(where, [&] { return make_space(n, std::move(labels)); });
}

// Declarations are resolved on demand so sections may reference each other in
// any order; `pending_` catches reference cycles.
class Loader : public Resolver {
 public:
  Loader(Problem& p, const Json& root) : p_(p), root_(root) {}

  const GlobalOptions& options() const override { return p_.options; }

  const Algebra& algebra(const std::string& n, const std::string& w) override {
    return resolve(p_.algebras, "algebras", n, w, [&](const Json& j, const std::string& at) { return build_algebra(j, at); });
  }
  const Element& element(const std::string& n, const std::string& w) override {
    return resolve(p_.elements, "elements", n, w, [&](const Json& j, const std::string& at) { return build_element(j, at); });
  }
  const State& state(const std::string& n, const std::string& w) override {
    return resolve(p_.states, "states", n, w, [&](const Json& j, const std::string& at) { return build_state(j, at); });
  }
  const LinearMap& map(const std::string& n, const std::string& w) override {
    return resolve(p_.maps, "maps", n, w, [&](const Json& j, const std::string& at) { return build_map(j, at); });
  }
  const RandomQuantumMap& rqm(const std::string& n, const std::string& w) override {
    return resolve(p_.rqms, "rqms", n, w, [&](const Json& j, const std::string& at) { return build_rqm(j, at); });
  }
  const Kernel& kernel(const std::string& n, const std::string& w) override {
    return resolve(p_.kernels, "kernels", n, w, [&](const Json& j, const std::string& at) { return build_kernel(j, at); });
  }
  const ClassicalRandomMap& random_map(const std::string& n, const std::string& w) override {
    return resolve(p_.random_maps, "random_maps", n, w,
                   [&](const Json& j, const std::string& at) { return build_random_map(j, at); });
  }
  const TruncatedChain& chain(const std::string& n, const std::string& w) {
    return resolve(p_.chains, "chains", n, w, [&](const Json& j, const std::string& at) {
      ChainSpec spec = read_chain_spec(*this, j, at);
      return guarded(at, [&] { return build_chain(spec); });
    });
  }

  void load_all() {
    for (const char* section : kSections) {
      if (!root_.contains(section)) continue;
      const Json& s = root_.at(section);
      expect_object(s, std::string("/") + section);
      for (const auto& item : s.items()) {
        const std::string w = std::string("/") + section;
        const std::string n = item.key();
        const std::string sec = section;
        if (sec == "algebras") algebra(n, w);
        else if (sec == "elements") element(n, w);
        else if (sec == "states") state(n, w);
        else if (sec == "maps") map(n, w);
        else if (sec == "rqms") rqm(n, w);
        else if (sec == "kernels") kernel(n, w);
        else if (sec == "random_maps") random_map(n, w);
        else chain(n, w);
      }
    }
  }

 private:
  template <typename T, typename Build>
  const T& resolve(Registry<T>& reg, const char* section, const std::string& name, const std::string& where,
                   Build build) {
    if (reg.contains(name)) return reg.get(name, where, section);
    if (!root_.contains(section) || !root_.at(section).is_object() || !root_.at(section).contains(name)) {
      return reg.get(name, where, section);
    }
    const std::string at = std::string("/") + section + "/" + name;
    if (!pending_.insert(at).second) throw SpecError(at, "circular reference");
    T value = build(root_.at(section).at(name), at);
    pending_.erase(at);
    reg.put(name, std::move(value));
    return reg.get(name, where, section);
  }

  Algebra build_algebra(const Json& j, const std::string& at) {
    if (j.is_string()) return algebra(j.get<std::string>(), at);
    return read_algebra(*this, j, at);
  }

  Element build_element(const Json& j, const std::string& at) {
    Algebra a = read_algebra(*this, field(j, "algebra", at), child(at, "algebra"));
    auto blocks = read_blocks(a, field(j, "blocks", at), child(at, "blocks"));
    return guarded(at, [&] { return Element(a, std::move(blocks)); });
  }

  State build_state(const Json& j, const std::string& at) {
    const double eps = p_.options.tolerance;
    const std::string key =
        discriminator(j, at, {"densities", "maximally_mixed", "random", "distribution", "invariant_of", "tensor"});
    const std::string kat = child(at, key);
    const Json& v = j.at(key);
    if (key == "densities") {
      Algebra a = read_algebra(*this, field(j, "algebra", at), child(at, "algebra"));
      auto d = read_blocks(a, v, kat);
      return guarded(at, [&] { return State(a, std::move(d), eps); });
    }
    if (key == "maximally_mixed") return State::maximally_mixed(read_algebra(*this, v, kat));
    if (key == "random") {
      Algebra a = read_algebra(*this, field(v, "algebra", kat), child(kat, "algebra"));
      std::uint64_t seed = v.contains("seed") ? read_size(v.at("seed"), child(kat, "seed")) : p_.options.seed;
      return random_state(a, seed);
    }
    if (key == "distribution") {
      auto d = read_doubles(v, kat);
      return guarded(at, [&] { return distribution_state(d, eps); });
    }
    if (key == "invariant_of") {
      const RandomQuantumMap& r = rqm(read_string(v, kat), kat);
      return guarded(at, [&] {
        InvariantOptions o;
        o.tolerance = eps;
        return invariant_states(r, o).canonical;
      });
    }
    auto names = read_names(v, kat);
    if (names.empty()) throw SpecError(kat, "tensor needs at least one state");
    State s = state(names[0], child(kat, 0));
    for (std::size_t i = 1; i < names.size(); ++i) s = tensor_state(s, state(names[i], child(kat, i)));
    return s;
  }

  LinearMap build_map(const Json& j, const std::string& at) {
    const double eps = p_.options.tolerance;
    const std::string key = discriminator(
        j, at,
        {"images", "identity", "random_cp", "random_morphism", "kernel", "nfmo_of", "compose", "tensor", "direct_sum"});
    const std::string kat = child(at, key);
    const Json& v = j.at(key);
    if (key == "images") {
      Algebra dom = read_algebra(*this, field(j, "domain", at), child(at, "domain"));
      Algebra cod = read_algebra(*this, field(j, "codomain", at), child(at, "codomain"));
      std::string kind = j.contains("kind") ? read_string(j.at("kind"), child(at, "kind")) : "morphism";
      expect_object(v, kat);
      CMatrix m = CMatrix::Zero(cod.dim(), dom.dim());
      for (const auto& item : v.items()) {
        const std::string iat = child(kat, item.key());
        std::size_t b = 0, r = 0, c = 0;
        char dot1 = 0, dot2 = 0;
        std::istringstream is(item.key());
        if (!(is >> b >> dot1 >> r >> dot2 >> c) || dot1 != '.' || dot2 != '.' || !is.eof()) {
          throw SpecError(iat, "basis keys have the form block.row.col");
        }
        if (b >= dom.num_blocks() || r >= dom.block_size(b) || c >= dom.block_size(b)) {
          throw SpecError(iat, "basis element outside " + describe(dom));
        }
        Element img = guarded(iat, [&] { return Element(cod, read_blocks(cod, item.value(), iat)); });
        m.col(static_cast<Eigen::Index>(dom.index(b, r, c))) = img.flatten();
      }
      return guarded(at, [&] { return tag_map(LinearMap(dom, cod, std::move(m)), kind, eps, at); });
    }
    if (key == "identity") return LinearMap::identity(read_algebra(*this, v, kat));
    if (key == "random_cp" || key == "random_morphism") {
      Algebra dom = read_algebra(*this, field(v, "domain", kat), child(kat, "domain"));
      Algebra cod = read_algebra(*this, field(v, "codomain", kat), child(kat, "codomain"));
      Rng rng(v.contains("seed") ? read_size(v.at("seed"), child(kat, "seed")) : p_.options.seed);
      if (key == "random_morphism") return guarded(at, [&] { return random_morphism(dom, cod, rng); });
      std::size_t kraus = v.contains("kraus") ? read_size(v.at("kraus"), child(kat, "kraus")) : 2;
      return guarded(at, [&] { return random_cp_unital(dom, cod, rng, kraus); });
    }
    if (key == "kernel") {
      const Kernel& k = kernel(read_string(v, kat), kat);
      return guarded(at, [&] { return fmo_of_kernel(k); });
    }
    if (key == "nfmo_of") {
      const RandomQuantumMap& r = rqm(read_string(v, kat), kat);
      return guarded(at, [&] { return induced_nfmo(r); });
    }
    auto names = read_names(v, kat);
    if (names.size() != 2) throw SpecError(kat, "expected two map names");
    LinearMap f = map(names[0], child(kat, 0));
    LinearMap g = map(names[1], child(kat, 1));
    return guarded(at, [&] {
      if (key == "compose") return compose(f, g);
      if (key == "tensor") return tensor(f, g);
      return direct_sum(f, g);
    });
  }

  RandomQuantumMap build_rqm(const Json& j, const std::string& at) {
    const std::string key = discriminator(j, at, {"family", "trivial", "random", "lift", "implement"});
    const std::string kat = child(at, key);
    const Json& v = j.at(key);
    if (key == "family") {
      Algebra target = read_algebra(*this, field(v, "target", kat), child(kat, "target"));
      Algebra param = read_algebra(*this, field(v, "parameter", kat), child(kat, "parameter"));
      const LinearMap& phi = map(read_string(field(v, "phi", kat), child(kat, "phi")), child(kat, "phi"));
      const State& nu = state(read_string(field(v, "nu", kat), child(kat, "nu")), child(kat, "nu"));
      if (v.contains("source")) {
        Algebra source = read_algebra(*this, v.at("source"), child(kat, "source"));
        if (source != phi.domain()) throw SpecError(child(kat, "source"), "phi has domain " + describe(phi.domain()));
      }
      return guarded(at, [&] {
        return RandomQuantumMap(QuantumFamily(phi.domain(), target, param, make_morphism(phi, p_.options.tolerance)),
                                nu);
      });
    }
    if (key == "trivial") return RandomQuantumMap::trivial(read_algebra(*this, v, kat));
    if (key == "random") {
      Algebra a = read_algebra(*this, field(v, "algebra", kat), child(kat, "algebra"));
      Algebra c = read_algebra(*this, field(v, "parameter", kat), child(kat, "parameter"));
      Algebra b = v.contains("source") ? read_algebra(*this, v.at("source"), child(kat, "source")) : a;
      Rng rng(v.contains("seed") ? read_size(v.at("seed"), child(kat, "seed")) : p_.options.seed);
      return guarded(at, [&] {
        LinearMap phi = random_morphism(b, tensor_algebra(a, c), rng);
        State nu = random_state(c, rng);
        return RandomQuantumMap(QuantumFamily(b, a, c, phi), nu);
      });
    }
    if (key == "lift") {
      const ClassicalRandomMap& m = random_map(read_string(v, kat), kat);
      return guarded(at, [&] { return lift_random_map(m); });
    }
    return build_construction(*this, v, kat).rqm;
  }

  Kernel build_kernel(const Json& j, const std::string& at) {
    const Json& m = j.is_object() ? field(j, "matrix", at) : j;
    const std::string mat = j.is_object() ? child(at, "matrix") : at;
    expect_array(m, mat);
    if (m.empty()) throw SpecError(mat, "empty kernel");
    const std::size_t cols = m.at(0).is_array() ? m.at(0).size() : 0;
    Eigen::MatrixXd k(static_cast<Eigen::Index>(m.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t x = 0; x < m.size(); ++x) {
      auto row = read_doubles(m.at(x), child(mat, x));
      if (row.size() != cols) throw SpecError(child(mat, x), "ragged kernel row");
      for (std::size_t y = 0; y < cols; ++y) k(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = row[y];
    }
    return guarded(at, [&] { return Kernel(std::move(k), p_.options.tolerance); });
  }

  ClassicalRandomMap build_random_map(const Json& j, const std::string& at) {
    expect_object(j, at);
    if (j.contains("implements")) {
      const Kernel& k = kernel(read_string(j.at("implements"), child(at, "implements")), child(at, "implements"));
      return implement_kernel(k);
    }
    ClassicalRandomMap m;
    m.x = read_space(field(j, "x", at), child(at, "x"));
    m.y = read_space(field(j, "y", at), child(at, "y"));
    m.z = read_space(field(j, "z", at), child(at, "z"));
    const Json& t = field(j, "table", at);
    expect_array(t, child(at, "table"));
    for (std::size_t x = 0; x < t.size(); ++x) {
      const Json& row = t.at(x);
      expect_array(row, child(child(at, "table"), x));
      std::vector<std::size_t> r;
      for (std::size_t z = 0; z < row.size(); ++z) r.push_back(read_size(row.at(z), child(child(child(at, "table"), x), z)));
      m.table.push_back(std::move(r));
    }
    m.nu = read_doubles(field(j, "nu", at), child(at, "nu"));
    guarded(at, [&] { validate_random_map(m, p_.options.tolerance); });
    return m;
  }

  Problem& p_;
  const Json& root_;
  std::set<std::string> pending_;
};

GlobalOptions resolve_options(const Json& root, const Overrides& o) {
  GlobalOptions g;
  if (root.contains("options")) {
    const Json& j = root.at("options");
    expect_object(j, "/options");
    for (const auto& item : j.items()) {
      const std::string at = "/options/" + item.key();
      if (item.key() == "tolerance") g.tolerance = read_double(item.value(), at);
      else if (item.key() == "seed") g.seed = read_size(item.value(), at);
      else if (item.key() == "dim_cap") g.dim_cap = read_size(item.value(), at);
      else if (item.key() == "depth") g.depth = read_size(item.value(), at);
      else throw SpecError(at, "unknown option");
    }
  }
  if (o.tolerance) g.tolerance = *o.tolerance;
  if (o.seed) g.seed = *o.seed;
  if (o.dim_cap) g.dim_cap = *o.dim_cap;
  if (o.depth) g.depth = *o.depth;
  if (!(g.tolerance > 0.0)) throw SpecError("/options/tolerance", "tolerance must be positive");
  return g;
}

}  // namespace

// ---------------------------------------------------------------------------

const Json& field(const Json& j, const std::string& key, const std::string& where) {
  expect_object(j, where);
  auto it = j.find(key);
  if (it == j.end()) throw SpecError(where, "missing field '" + key + "'");
  return *it;
}

std::string read_string(const Json& j, const std::string& where) {
  if (!j.is_string()) throw SpecError(where, "expected a string");
  return j.get<std::string>();
}

std::size_t read_size(const Json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw SpecError(where, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

double read_double(const Json& j, const std::string& where) {
  if (!j.is_number()) throw SpecError(where, "expected a number");
  return j.get<double>();
}

std::vector<double> read_doubles(const Json& j, const std::string& where) {
  expect_array(j, where);
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(read_double(j.at(i), child(where, i)));
  return out;
}

std::vector<std::string> read_names(const Json& j, const std::string& where) {
  expect_array(j, where);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(read_string(j.at(i), child(where, i)));
  return out;
}

Algebra read_algebra(Resolver& r, const Json& j, const std::string& where) {
  if (j.is_string()) return r.algebra(j.get<std::string>(), where);
  const Json& blocks = j.is_object() ? field(j, "blocks", where) : j;
  const std::string at = j.is_object() ? child(where, "blocks") : where;
  expect_array(blocks, at);
  std::vector<std::size_t> sizes;
  for (std::size_t i = 0; i < blocks.size(); ++i) sizes.push_back(read_size(blocks.at(i), child(at, i)));
  return guarded(where, [&] { return make_algebra(sizes); });
}

Complex read_complex(const Json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j.at(0).is_number() && j.at(1).is_number()) {
    return {j.at(0).get<double>(), j.at(1).get<double>()};
  }
  throw SpecError(where, "expected a complex number [re, im]");
}

CMatrix read_matrix(const Json& j, const std::string& where) {
  expect_array(j, where);
  const std::size_t rows = j.size();
  if (rows == 0) throw SpecError(where, "empty matrix");
  std::size_t cols = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    expect_array(j.at(r), child(where, r));
    if (r == 0) cols = j.at(0).size();
    if (j.at(r).size() != cols) throw SpecError(child(where, r), "ragged matrix row");
  }
  CMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          read_complex(j.at(r).at(c), child(child(where, r), c));
    }
  }
  return m;
}

std::vector<CMatrix> read_blocks(const Algebra& a, const Json& j, const std::string& where) {
  expect_array(j, where);
  if (j.size() != a.num_blocks()) {
    throw SpecError(where, "expected " + std::to_string(a.num_blocks()) + " blocks for " + describe(a));
  }
  std::vector<CMatrix> out;
  for (std::size_t b = 0; b < j.size(); ++b) {
    CMatrix m = read_matrix(j.at(b), child(where, b));
    const auto n = static_cast<Eigen::Index>(a.block_size(b));
    if (m.rows() != n || m.cols() != n) {
      throw SpecError(child(where, b), "block " + std::to_string(b) + " must be " + std::to_string(n) + "x" +
                                           std::to_string(n));
    }
    out.push_back(std::move(m));
  }
  return out;
}

Construction build_construction(Resolver& r, const Json& j, const std::string& where) {
  const std::string kind = read_string(field(j, "construction", where), child(where, "construction"));
  const double eps = r.options().tolerance;
  auto nfmo = [&](const RandomQuantumMap& q, const std::string& at) {
    return guarded(at, [&] { return induced_nfmo(q); });
  };
  if (kind == "state") {
    const std::string at = child(where, "state");
    const State& s = r.state(read_string(field(j, "state", where), at), at);
    return guarded(where, [&] { return Construction{implement_state(s), state_map(s)}; });
  }
  if (kind == "morphism") {
    const std::string at = child(where, "map");
    const LinearMap& f = r.map(read_string(field(j, "map", where), at), at);
    return guarded(where, [&] { return Construction{implement_morphism(f), f}; });
  }
  if (kind == "compose") {
    const std::string oat = child(where, "outer");
    const std::string iat = child(where, "inner");
    const RandomQuantumMap& outer = r.rqm(read_string(field(j, "outer", where), oat), oat);
    const RandomQuantumMap& inner = r.rqm(read_string(field(j, "inner", where), iat), iat);
    LinearMap fo = nfmo(outer, oat);
    LinearMap fi = nfmo(inner, iat);
    return guarded(where, [&] { return Construction{implement_compose(outer, inner), compose(fo, fi)}; });
  }
  const std::string rat = child(where, "rqms");
  if (kind == "direct_sum" || kind == "tensor") {
    auto names = read_names(field(j, "rqms", where), rat);
    if (names.size() != 2) throw SpecError(rat, "expected two RQM names");
    const RandomQuantumMap& r1 = r.rqm(names[0], child(rat, 0));
    const RandomQuantumMap& r2 = r.rqm(names[1], child(rat, 1));
    LinearMap f1 = nfmo(r1, child(rat, 0));
    LinearMap f2 = nfmo(r2, child(rat, 1));
    return guarded(where, [&] {
      if (kind == "tensor") return Construction{implement_tensor(r1, r2), tensor(f1, f2)};
      return Construction{implement_direct_sum(r1, r2), direct_sum(f1, f2)};
    });
  }
  const std::string wat = child(where, "weights");
  if (kind == "convex_sum") {
    auto names = read_names(field(j, "rqms", where), rat);
    auto weights = read_doubles(field(j, "weights", where), wat);
    if (names.empty()) throw SpecError(rat, "at least one RQM is required");
    std::vector<RandomQuantumMap> rqms;
    for (std::size_t i = 0; i < names.size(); ++i) rqms.push_back(r.rqm(names[i], child(rat, i)));
    return guarded(where, [&] {
      RandomQuantumMap out = implement_convex_sum(weights, rqms, eps);
      CMatrix sum = CMatrix::Zero(out.target().dim(), out.source().dim());
      for (std::size_t i = 0; i < rqms.size(); ++i) sum += weights[i] * induced_nfmo(rqms[i]).matrix();
      return Construction{out, LinearMap(out.source(), out.target(), std::move(sum))};
    });
  }
  if (kind == "finite_family") {
    const std::string mat = child(where, "maps");
    auto names = read_names(field(j, "maps", where), mat);
    auto weights = read_doubles(field(j, "weights", where), wat);
    if (names.empty()) throw SpecError(mat, "at least one morphism is required");
    std::vector<LinearMap> maps;
    for (std::size_t i = 0; i < names.size(); ++i) maps.push_back(r.map(names[i], child(mat, i)));
    return guarded(where, [&] {
      RandomQuantumMap out = implement_finite_family(maps, weights, eps);
      CMatrix sum = CMatrix::Zero(out.target().dim(), out.source().dim());
      for (std::size_t i = 0; i < maps.size(); ++i) sum += weights[i] * maps[i].matrix();
      return Construction{out, LinearMap(out.source(), out.target(), std::move(sum))};
    });
  }
  throw SpecError(child(where, "construction"),
                  "unknown construction '" + kind +
                      "' (state, morphism, compose, direct_sum, tensor, convex_sum, finite_family)");
}

ChainSpec read_chain_spec(Resolver& r, const Json& j, const std::string& where) {
  expect_object(j, where);
  std::vector<std::string> names;
  if (j.contains("rqm")) names.push_back(read_string(j.at("rqm"), child(where, "rqm")));
  if (j.contains("rqms")) {
    auto more = read_names(j.at("rqms"), child(where, "rqms"));
    names.insert(names.end(), more.begin(), more.end());
  }
  if (names.empty()) throw SpecError(where, "a chain needs 'rqm' or 'rqms'");
  std::vector<RandomQuantumMap> steps;
  for (std::size_t i = 0; i < names.size(); ++i) steps.push_back(r.rqm(names[i], child(where, "rqms")));
  bool homogeneous = names.size() == 1;
  if (j.contains("homogeneous")) {
    if (!j.at("homogeneous").is_boolean()) throw SpecError(child(where, "homogeneous"), "expected a boolean");
    homogeneous = j.at("homogeneous").get<bool>();
  }
  std::size_t depth = 0;
  if (r.options().depth) depth = *r.options().depth;
  else if (j.contains("depth")) depth = read_size(j.at("depth"), child(where, "depth"));
  else depth = homogeneous ? 1 : steps.size();
  const std::string sat = child(where, "sigma");
  State sigma = r.state(read_string(field(j, "sigma", where), sat), sat);
  Algebra a = steps.front().target();
  return ChainSpec{a, std::move(steps), homogeneous, std::move(sigma), depth, r.options().dim_cap};
}

Problem parse_problem(const std::string& text, const std::string& source, const Overrides& overrides) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SpecError(source, std::string("parse error: ") + e.what());
  }
  expect_object(root, "");
  static const std::set<std::string> known = {"schema",  "description", "options", "algebras",    "elements",
                                              "states",  "maps",        "rqms",    "kernels",     "random_maps",
                                              "chains",  "commands"};
  for (const auto& item : root.items()) {
    if (!known.count(item.key())) throw SpecError("/" + item.key(), "unknown top-level section");
  }

  Problem p;
  p.source = source;
  p.options = resolve_options(root, overrides);
  Loader loader(p, root);
  loader.load_all();
  if (root.contains("commands")) {
    const Json& cmds = root.at("commands");
    expect_array(cmds, "/commands");
    for (std::size_t i = 0; i < cmds.size(); ++i) {
      const std::string at = child("/commands", i);
      read_string(field(cmds.at(i), "command", at), child(at, "command"));
      p.commands.push_back(cmds.at(i));
    }
  }
  return p;
}

Problem load_problem(const std::string& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw SpecError(path, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str(), path, overrides);
}

// ---------------------------------------------------------------------------

Json write_complex(Complex z) { return Json::array({z.real(), z.imag()}); }

Json write_matrix(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(write_complex(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json write_blocks(const std::vector<CMatrix>& blocks) {
  Json out = Json::array();
  for (const CMatrix& b : blocks) out.push_back(write_matrix(b));
  return out;
}

Json write_algebra(const Algebra& a) { return Json{{"blocks", a.blocks()}}; }

Json write_map(const LinearMap& f) {
  Json images = Json::object();
  for (std::size_t k = 0; k < f.domain().dim(); ++k) {
    BasisIndex b = f.domain().locate(k);
    images[std::to_string(b.block) + "." + std::to_string(b.row) + "." + std::to_string(b.col)] =
        write_blocks(f.image(k).mats());
  }
  return Json{{"domain", write_algebra(f.domain())},
              {"codomain", write_algebra(f.codomain())},
              {"kind", to_string(f.kind())},
              {"images", std::move(images)}};
}

Json write_state(const State& s) {
  return Json{{"algebra", write_algebra(s.algebra())}, {"densities", write_blocks(s.densities())}};
}

}  // namespace rqm::cli
