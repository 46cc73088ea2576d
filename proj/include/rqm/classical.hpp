#pragma once

// Finite classical probability: stochastic kernels, Feller-Markov operators on
// ℂ^X, random maps X × Z -> Y, and their lift to RQMs between commutative
// algebras.

#include <string>
#include <vector>

#include "rqm/chain.hpp"
#include "rqm/rqm.hpp"

namespace rqm {

struct FiniteSpace {
  std::size_t size = 1;
  std::vector<std::string> labels;

  Algebra algebra() const { return Algebra::commutative(size); }
};

FiniteSpace make_space(std::size_t size, std::vector<std::string> labels = {});

/// Row-stochastic matrix, rows indexed by X and columns by Y.
class Kernel {
 public:
  /// Throws ErrorCode::NotStochastic naming the first offending row.
  explicit Kernel(Eigen::MatrixXd matrix, double eps = kDefaultTolerance);

  const Eigen::MatrixXd& matrix() const { return matrix_; }
  std::size_t rows() const { return static_cast<std::size_t>(matrix_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(matrix_.cols()); }
  double operator()(std::size_t x, std::size_t y) const {
    return matrix_(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
  }

 private:
  Eigen::MatrixXd matrix_;
};

/// K_1 K_2: first step K_1, then K_2.
Kernel compose_kernels(const Kernel& first, const Kernel& second);

struct ClassicalRandomMap {
  FiniteSpace x;
  FiniteSpace y;
  FiniteSpace z;
  std::vector<std::vector<std::size_t>> table;  // table[x][z] = φ(x, z)
  std::vector<double> nu;
};

/// Throws ErrorCode::InvalidSpec on a ragged or out-of-range table, or
/// ErrorCode::NotStochastic if ν is not a probability vector.
void validate_random_map(const ClassicalRandomMap& m, double eps = kDefaultTolerance);

/// K[x][y] = ν{z : φ(x, z) = y}.
Kernel kernel_of_random_map(const ClassicalRandomMap& m);

/// φ_second(φ_first(x, z_1), z_2) with parameter Z_1 × Z_2 (z_1 outer) and ν_1 × ν_2.
ClassicalRandomMap compose_random_maps(const ClassicalRandomMap& first, const ClassicalRandomMap& second);

/// f ↦ (x ↦ Σ_y K[x][y] f(y)) as a unital CP map ℂ^Y -> ℂ^X.
LinearMap fmo_of_kernel(const Kernel& k);
/// K[x][y] = F(δ_y)(x). Throws ErrorCode::UnsupportedShape for noncommutative
/// algebras and ErrorCode::NotStochastic if F is not unital and positive.
Kernel kernel_of_fmo(const LinearMap& f, double eps = kDefaultTolerance);

/// The RQM (ℂ^Z, δ_y ↦ Σ_{φ(x,z)=y} δ_x ⊗ δ_z, ν) from ℂ^Y to ℂ^X.
RandomQuantumMap lift_random_map(const ClassicalRandomMap& m);

/// The diagonal state with the given probabilities on ℂ^n.
State distribution_state(const std::vector<double>& p, double eps = kDefaultTolerance);
std::vector<double> state_distribution(const State& s);

/// σ K_1 K_2 ⋯ K_n for maps X × Z_i -> X.
std::vector<double> classical_chain_marginals(const std::vector<ClassicalRandomMap>& maps,
                                              const std::vector<double>& sigma, std::size_t n);

/// Chain spec on ℂ^X from lifted maps. A single map yields a homogeneous chain.
ChainSpec lift_chain(const std::vector<ClassicalRandomMap>& maps, const std::vector<double>& sigma,
                     std::size_t depth, std::size_t dim_cap = kDefaultDimCap);

/// A probability vector π with π K = π (least squares with the normalization row).
std::vector<double> stationary_distribution(const Kernel& k);

/// A random map implementing K by quantile coupling: Z enumerates the cells
/// cut out of [0, 1) by every row's cumulative sums, and φ(x, z) is the y whose
/// interval of row x contains cell z.
ClassicalRandomMap implement_kernel(const Kernel& k);

}  // namespace rqm
