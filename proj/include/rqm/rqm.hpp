#pragma once

// Quantum families of maps φ: B -> A ⊗ C and random quantum maps (C, φ, ν),
// with the constructions that implement a given NFMO by an RQM.

#include <optional>
#include <string>
#include <vector>

#include "rqm/linear_map.hpp"
#include "rqm/stinespring.hpp"

namespace rqm {

class QuantumFamily {
 public:
  /// `phi` must be a validated morphism source -> target ⊗ parameter.
  QuantumFamily(Algebra source, Algebra target, Algebra parameter, LinearMap phi);

  /// (ℂ, id: A -> A ⊗ ℂ).
  static QuantumFamily trivial(const Algebra& a);

  const Algebra& source() const { return source_; }        // B
  const Algebra& target() const { return target_; }        // A
  const Algebra& parameter() const { return parameter_; }  // C
  const LinearMap& phi() const { return phi_; }

 private:
  Algebra source_;
  Algebra target_;
  Algebra parameter_;
  LinearMap phi_;
};

class RandomQuantumMap {
 public:
  RandomQuantumMap(QuantumFamily family, State nu);

  static RandomQuantumMap trivial(const Algebra& a);

  const QuantumFamily& family() const { return family_; }
  const State& nu() const { return nu_; }
  const Algebra& source() const { return family_.source(); }
  const Algebra& target() const { return family_.target(); }
  const Algebra& parameter() const { return family_.parameter(); }
  const LinearMap& phi() const { return family_.phi(); }

 private:
  QuantumFamily family_;
  State nu_;
};

/// outer ◇ inner: a ↦ (φ_outer ⊗ id)φ_inner(a), parameter C_outer ⊗ C_inner.
/// Requires inner.target() == outer.source().
QuantumFamily diamond(const QuantumFamily& outer, const QuantumFamily& inner);

/// b ↦ (id ⊗ ν)φ(b), validated as unital CP.
LinearMap induced_nfmo(const RandomQuantumMap& r);

/// ρ ↦ (ρ ⊗ ν)∘φ, assembled by tensoring functionals and pulling back through φ.
Transition induced_transition(const RandomQuantumMap& r);

// ---------------------------------------------------------------------------
// Implementation constructions. Each returns an RQM whose induced NFMO equals
// the target map.

RandomQuantumMap implement_state(const State& sigma);
RandomQuantumMap implement_morphism(const LinearMap& phi);
/// Implements F_outer ∘ F_inner with (C_o ⊗ C_i, φ_o ◇ φ_i, ν_o ⊗ ν_i).
RandomQuantumMap implement_compose(const RandomQuantumMap& outer, const RandomQuantumMap& inner);
RandomQuantumMap implement_direct_sum(const RandomQuantumMap& r1, const RandomQuantumMap& r2);
RandomQuantumMap implement_tensor(const RandomQuantumMap& r1, const RandomQuantumMap& r2);
/// Implements sum_i t_i F_i with parameter ℂ^n ⊗ C_1 ⊗ ... ⊗ C_n.
RandomQuantumMap implement_convex_sum(const std::vector<double>& weights,
                                      const std::vector<RandomQuantumMap>& rqms,
                                      double eps = kDefaultTolerance);
/// Implements b ↦ sum_x σ(x) f(x, b) with parameter ℂ^k.
RandomQuantumMap implement_finite_family(const std::vector<LinearMap>& morphisms,
                                         const std::vector<double>& weights,
                                         double eps = kDefaultTolerance);

struct PaddingFailure {
  std::size_t k_dim = 0;
  std::size_t h = 0;
  /// Padding dimensions n*h - K that admit no unital representation of B.
  std::vector<std::size_t> unreachable;
  std::string message;
};

struct StinespringImplementation {
  std::size_t k_dim = 0;
  std::size_t copies = 0;   // n, the parameter algebra is M_n
  std::size_t padding = 0;  // n*h - K
  std::vector<std::size_t> padding_multiplicities;
  std::optional<RandomQuantumMap> witness;
  std::optional<PaddingFailure> failure;
  DilationResiduals dilation;
  double reproduction_residual = 0.0;  // max_b ||F_{φ,ν}(b) - F(b)||
};

struct PaddingOptions {
  /// Values of n tried beyond the smallest n with n*h >= K (0 = only the smallest).
  /// A negative value tries up to the largest block size of B additional copies.
  int extra_copies = -1;
};

/// Dilates F: B -> M_h and realises K (padded by a unital representation of
/// B when K is not a multiple of h) as H ⊗ ℂ^n, giving (M_n, φ, m ↦ m_11).
StinespringImplementation implement_from_stinespring(const LinearMap& f, PaddingOptions options = {});

}  // namespace rqm
