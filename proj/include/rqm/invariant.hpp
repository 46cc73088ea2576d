#pragma once

// Invariant states of an RQM on A, the linearized transition, and the skew
// product φ† rendered levelwise.

#include <string>
#include <vector>

#include "rqm/chain.hpp"
#include "rqm/rqm.hpp"

namespace rqm {

/// Orthonormal (Hilbert-Schmidt) Hermitian basis of ⊕ M_{n_i}: per block the
/// normalized identity followed by the generalized Gell-Mann matrices.
class HermitianBasis {
 public:
  explicit HermitianBasis(Algebra a);

  const Algebra& algebra() const { return algebra_; }
  std::size_t size() const { return elements_.size(); }
  /// The k-th basis element as a full set of blocks (zero outside its block).
  std::vector<CMatrix> element(std::size_t k) const;

  /// x_k = tr(G_k ρ); real for Hermitian densities.
  Eigen::VectorXd coordinates(const std::vector<CMatrix>& densities) const;
  std::vector<CMatrix> densities(const Eigen::VectorXd& coords) const;

 private:
  struct Entry {
    std::size_t block;
    CMatrix matrix;
  };
  Algebra algebra_;
  std::vector<Entry> elements_;
};

/// Matrix of ρ ↦ (ρ ⊗ ν)φ in Hermitian coordinates. Requires an RQM on A.
Eigen::MatrixXd transition_matrix(const RandomQuantumMap& r);

struct InvariantOptions {
  double tolerance = kDefaultTolerance;
  std::size_t max_iterations = 100000;
  /// Singular values of (M - I) at or below this count toward the fixed subspace.
  double rank_tolerance = 1e-8;
};

struct InvariantReport {
  std::size_t fixed_dim = 0;
  State canonical;
  double residual = 0.0;
  std::size_t cesaro_iterations = 0;
  double cesaro_residual = 0.0;
};

/// Fixed-space dimension plus a canonical invariant state: the Cesàro limit of
/// the iterates of the maximally mixed state, obtained by averaging and then
/// projecting onto ker(M - I) along ran(M - I).
/// Throws ErrorCode::NumericalFailure if no valid invariant state results.
InvariantReport invariant_states(const RandomQuantumMap& r, const InvariantOptions& options = {});

/// ||T(σ) - σ|| (Hilbert-Schmidt over all blocks).
double verify_invariant(const RandomQuantumMap& r, const State& sigma);

/// A ⊗ C^{⊗n} for an RQM on A with parameter C.
Algebra skew_level(const RandomQuantumMap& r, std::size_t n);

/// φ† from level n to n+1: a ⊗ c_1 ⊗ ... ⊗ c_n ↦ φ(a) ⊗ c_1 ⊗ ... ⊗ c_n,
/// validated as a morphism. Throws ErrorCode::CapExceeded above `dim_cap`.
LinearMap skew_map(const RandomQuantumMap& r, std::size_t level, std::size_t dim_cap = kDefaultDimCap);
Element skew_apply(const RandomQuantumMap& r, std::size_t level, const Element& x,
                   std::size_t dim_cap = kDefaultDimCap);

struct SkewReport {
  std::size_t depth = 0;
  double violation = 0.0;           // max_x |μ_N(φ†x) - μ_{N-1}(x)|
  double identity_residual = 0.0;   // max_x |μ_N(φ†x) - ((Tσ) ⊗ ν^{⊗(N-1)})(x)|
  double invariance_residual = 0.0; // ||Tσ - σ||
  double tolerance = 0.0;
  bool pass = true;
};

SkewReport verify_skew_invariance(const RandomQuantumMap& r, const State& sigma, std::size_t depth,
                                  double tolerance = kDefaultTolerance, std::size_t dim_cap = kDefaultDimCap);

}  // namespace rqm
