#pragma once

// Problem-description files: a JSON object graph of algebras, elements,
// states, maps, RQMs, classical objects and chains, plus a command list.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rqm/chain.hpp"
#include "rqm/classical.hpp"
#include "rqm/rqm.hpp"

namespace rqm::cli {

using Json = nlohmann::json;

struct GlobalOptions {
  double tolerance = kDefaultTolerance;
  std::uint64_t seed = 0;
  std::size_t dim_cap = kDefaultDimCap;
  std::optional<std::size_t> depth;
};

/// Command-line flags; set fields take precedence over the problem file's "options".
struct Overrides {
  std::optional<double> tolerance;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> dim_cap;
  std::optional<std::size_t> depth;
};

/// A malformed or invalid spec. `where` is a JSON pointer or "line L, column C".
class SpecError : public std::runtime_error {
 public:
  SpecError(std::string where, const std::string& message, std::string check_id = {})
      : std::runtime_error(where + ": " + message), where_(std::move(where)), check_id_(std::move(check_id)) {}

  const std::string& where() const { return where_; }
  const std::string& check_id() const { return check_id_; }

 private:
  std::string where_;
  std::string check_id_;
};

template <typename T>
class Registry {
 public:
  bool contains(const std::string& name) const { return items_.count(name) > 0; }
  const T& get(const std::string& name, const std::string& where, const char* kind) const {
    auto it = items_.find(name);
    if (it == items_.end()) throw SpecError(where, std::string("unresolved ") + kind + " reference '" + name + "'");
    return it->second;
  }
  void put(const std::string& name, T value) {
    items_.erase(name);
    items_.emplace(name, std::move(value));
    if (std::find(order_.begin(), order_.end(), name) == order_.end()) order_.push_back(name);
  }
  const std::vector<std::string>& names() const { return order_; }

 private:
  std::map<std::string, T> items_;
  std::vector<std::string> order_;
};

struct Problem {
  std::string source;
  GlobalOptions options;
  Registry<Algebra> algebras;
  Registry<Element> elements;
  Registry<State> states;
  Registry<LinearMap> maps;
  Registry<RandomQuantumMap> rqms;
  Registry<Kernel> kernels;
  Registry<ClassicalRandomMap> random_maps;
  Registry<TruncatedChain> chains;
  std::vector<Json> commands;
};

/// Parses and validates every declaration. Throws SpecError.
Problem parse_problem(const std::string& text, const std::string& source, const Overrides& overrides = {});
Problem load_problem(const std::string& path, const Overrides& overrides = {});

/// Named-object lookup used while reading declarations and commands.
class Resolver {
 public:
  virtual ~Resolver() = default;
  virtual const GlobalOptions& options() const = 0;
  virtual const Algebra& algebra(const std::string& name, const std::string& where) = 0;
  virtual const Element& element(const std::string& name, const std::string& where) = 0;
  virtual const State& state(const std::string& name, const std::string& where) = 0;
  virtual const LinearMap& map(const std::string& name, const std::string& where) = 0;
  virtual const RandomQuantumMap& rqm(const std::string& name, const std::string& where) = 0;
  virtual const Kernel& kernel(const std::string& name, const std::string& where) = 0;
  virtual const ClassicalRandomMap& random_map(const std::string& name, const std::string& where) = 0;
};

/// Lookup in a fully loaded problem.
class ProblemResolver : public Resolver {
 public:
  explicit ProblemResolver(const Problem& p) : p_(p) {}
  const GlobalOptions& options() const override { return p_.options; }
  const Algebra& algebra(const std::string& n, const std::string& w) override { return p_.algebras.get(n, w, "algebra"); }
  const Element& element(const std::string& n, const std::string& w) override { return p_.elements.get(n, w, "element"); }
  const State& state(const std::string& n, const std::string& w) override { return p_.states.get(n, w, "state"); }
  const LinearMap& map(const std::string& n, const std::string& w) override { return p_.maps.get(n, w, "map"); }
  const RandomQuantumMap& rqm(const std::string& n, const std::string& w) override { return p_.rqms.get(n, w, "rqm"); }
  const Kernel& kernel(const std::string& n, const std::string& w) override { return p_.kernels.get(n, w, "kernel"); }
  const ClassicalRandomMap& random_map(const std::string& n, const std::string& w) override {
    return p_.random_maps.get(n, w, "random map");
  }

 private:
  const Problem& p_;
};

// Small typed accessors; all throw SpecError with the offending pointer.
const Json& field(const Json& j, const std::string& key, const std::string& where);
std::string read_string(const Json& j, const std::string& where);
std::size_t read_size(const Json& j, const std::string& where);
double read_double(const Json& j, const std::string& where);
std::vector<double> read_doubles(const Json& j, const std::string& where);
std::vector<std::string> read_names(const Json& j, const std::string& where);
/// A name of a declared algebra or an inline {"blocks": [...]} / [...].
Algebra read_algebra(Resolver& r, const Json& j, const std::string& where);

// Readers shared with the command layer. `where` is the JSON pointer of `j`.
Complex read_complex(const Json& j, const std::string& where);
CMatrix read_matrix(const Json& j, const std::string& where);
std::vector<CMatrix> read_blocks(const Algebra& a, const Json& j, const std::string& where);

/// Builds an RQM from an implementation-construction object
/// ({"construction": "state" | "morphism" | "compose" | ...}) and the map it
/// is meant to implement.
struct Construction {
  RandomQuantumMap rqm;
  LinearMap target;
};
Construction build_construction(Resolver& r, const Json& j, const std::string& where);

ChainSpec read_chain_spec(Resolver& r, const Json& j, const std::string& where);

Json write_complex(Complex z);
Json write_matrix(const CMatrix& m);
Json write_blocks(const std::vector<CMatrix>& blocks);
Json write_algebra(const Algebra& a);
Json write_map(const LinearMap& f);
Json write_state(const State& s);

}  // namespace rqm::cli
