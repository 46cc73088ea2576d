#pragma once

// Quantum Markov chains generated by a sequence of RQMs on A, truncated at a
// finite depth N: B_n = A ⊗ C_1 ⊗ ... ⊗ C_n, μ_n = σ ⊗ ν_1 ⊗ ... ⊗ ν_n and
// ψ_n = φ_1 ◇ ... ◇ φ_n: A -> B_n.

#include <cstdint>
#include <string>
#include <vector>

#include "rqm/rqm.hpp"

namespace rqm {

inline constexpr std::size_t kDefaultDimCap = std::size_t{1} << 24;

struct ChainSpec {
  Algebra a;
  /// One RQM per step, or a single RQM when `homogeneous` is set.
  std::vector<RandomQuantumMap> steps;
  bool homogeneous = false;
  State sigma;
  std::size_t depth = 1;
  std::size_t dim_cap = kDefaultDimCap;
};

class TruncatedChain {
 public:
  std::size_t depth() const { return levels_.size() - 1; }
  bool homogeneous() const { return homogeneous_; }
  const Algebra& base() const { return levels_.front(); }
  const Algebra& level(std::size_t n) const { return levels_.at(n); }
  const State& mu(std::size_t n) const { return mus_.at(n); }
  /// ψ_n: A -> B_n, a validated morphism.
  const LinearMap& psi(std::size_t n) const { return psis_.at(n); }
  /// The RQM used for step n (1-based).
  const RandomQuantumMap& step(std::size_t n) const { return steps_.at(n - 1); }
  const State& sigma() const { return mus_.front(); }

  /// x ⊗ 1 ∈ B_N for x ∈ B_n.
  Element embed(const Element& x, std::size_t n) const;

 private:
  friend TruncatedChain build_chain(const ChainSpec& spec);

  bool homogeneous_ = false;
  std::vector<Algebra> levels_;
  std::vector<Algebra> tails_;  // tails_[n] = C_{n+1} ⊗ ... ⊗ C_N (unused for n = N)
  std::vector<State> mus_;
  std::vector<LinearMap> psis_;
  std::vector<RandomQuantumMap> steps_;
};

/// Throws ErrorCode::CapExceeded when dim(A)·Π dim(C_n) exceeds spec.dim_cap.
TruncatedChain build_chain(const ChainSpec& spec);

/// F̄_n: B_{n+1} -> B_n, x ⊗ c ↦ ν_{n+1}(c) x.
LinearMap conditional_expectation(const TruncatedChain& chain, std::size_t n);

struct CheckResult {
  std::string id;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

struct MarkovReport {
  std::size_t level = 0;
  CheckResult module_property;     // F̄_n(b_n x) = b_n F̄_n(x)
  CheckResult state_compatibility; // μ_n(F̄_n(x)) = μ_{n+1}(x)
  CheckResult containment;         // F̄_n(ψ_{n+1}(a)) = ψ_n((id ⊗ ν_{n+1})φ_{n+1}(a))
  std::size_t random_samples = 0;
  bool pass() const { return module_property.pass && state_compatibility.pass && containment.pass; }
};

struct VerifyOptions {
  double tolerance = kDefaultTolerance;
  std::uint64_t seed = 0;
  std::size_t random_samples = 16;
  /// Basis pairs for the module property are enumerated exhaustively when
  /// dim(B_n) * dim(B_{n+1}) is at most this, otherwise sampled.
  std::size_t exhaustive_limit = 1u << 16;
};

MarkovReport verify_markov(const TruncatedChain& chain, std::size_t n, const VerifyOptions& options = {});

/// μ_N(ψ_{t_1}(a_1) ⋯ ψ_{t_r}(a_r)).
Complex finite_dim_distribution(const TruncatedChain& chain, const std::vector<std::size_t>& times,
                                const std::vector<Element>& elements);

struct ShiftViolation {
  std::size_t r = 0;
  std::size_t shift = 0;
  double max_violation = 0.0;
  std::size_t words = 0;
};

struct StationarityReport {
  double max_violation = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  bool sampled = false;
  std::vector<ShiftViolation> by_length_and_shift;
  std::string worst_word;

  double violation(std::size_t r, std::size_t shift) const;
};

struct StationarityOptions {
  double tolerance = kDefaultTolerance;
  std::uint64_t seed = 0;
  /// Full basis words are used while dim(A)^r is at most this.
  std::size_t basis_word_limit = 4096;
  std::size_t sampled_words = 512;
};

/// Tests μ(ψ_{t_1}(a_1)⋯ψ_{t_r}(a_r)) = μ(ψ_{t_1+ℓ}(a_1)⋯ψ_{t_r+ℓ}(a_r)) for
/// r <= r_max, 1 <= ℓ <= l_max and all times with t_i + ℓ <= N.
/// Throws ErrorCode::InvalidSpec for nonhomogeneous chains and
/// ErrorCode::OutOfRange if l_max >= N + 1.
StationarityReport check_stationarity(const TruncatedChain& chain, std::size_t r_max, std::size_t l_max,
                                      const StationarityOptions& options = {});

struct SemiCommutativityReport {
  double max_commutator = 0.0;
  double tolerance = 0.0;
  /// Distinct-time images commute: a sufficient (not necessary) condition
  /// for semi-commutativity.
  bool sufficient_condition_holds = true;
  std::string worst_pair;
};

SemiCommutativityReport check_semi_commutative(const TruncatedChain& chain, double tolerance = kDefaultTolerance);

}  // namespace rqm
