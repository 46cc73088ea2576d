#pragma once

// Finite-dimensional C*-algebras in canonical form: a direct sum of full
// matrix blocks M_{n_1} + ... + M_{n_k}.
//
// Flattened coordinates: the matrix unit e^{(j)}_{pq} of block j has index
// offset(j) + p * n_j + q. Every linear map in the library is a dense matrix
// in these coordinates.

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "rqm/errors.hpp"

namespace rqm {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kDefaultTolerance = 1e-9;

struct BasisIndex {
  std::size_t block;
  std::size_t row;
  std::size_t col;
};

class Algebra {
 public:
  /// Throws ErrorCode::InvalidSpec on an empty list or a zero block.
  explicit Algebra(std::vector<std::size_t> blocks);

  static Algebra complex_numbers() { return Algebra({1}); }
  static Algebra full_matrix(std::size_t n) { return Algebra({n}); }
  static Algebra commutative(std::size_t points) {
    return Algebra(std::vector<std::size_t>(points, 1));
  }

  const std::vector<std::size_t>& blocks() const { return blocks_; }
  std::size_t num_blocks() const { return blocks_.size(); }
  std::size_t block_size(std::size_t j) const { return blocks_[j]; }
  std::size_t dim() const { return offsets_.back(); }
  std::size_t offset(std::size_t j) const { return offsets_[j]; }
  /// Sum of block sizes, i.e. the size of the defining representation.
  std::size_t rep_size() const;
  bool is_commutative() const;

  std::size_t index(std::size_t block, std::size_t row, std::size_t col) const {
    return offsets_[block] + row * blocks_[block] + col;
  }
  BasisIndex locate(std::size_t flat) const;

  friend bool operator==(const Algebra& a, const Algebra& b) { return a.blocks_ == b.blocks_; }
  friend bool operator!=(const Algebra& a, const Algebra& b) { return !(a == b); }

 private:
  std::vector<std::size_t> blocks_;
  std::vector<std::size_t> offsets_;  // size num_blocks + 1
};

std::string describe(const Algebra& a);

Algebra make_algebra(const std::vector<std::size_t>& blocks);

/// Blocks (n_i * m_j) in lexicographic order, left factor outer.
Algebra tensor_algebra(const Algebra& a, const Algebra& b);
Algebra direct_sum_algebra(const Algebra& a, const Algebra& b);

class Element {
 public:
  /// Throws ErrorCode::Dimension when block count or shapes disagree with `algebra`.
  Element(Algebra algebra, std::vector<CMatrix> mats);

  static Element zero(const Algebra& a);
  static Element unit(const Algebra& a);
  static Element matrix_unit(const Algebra& a, std::size_t block, std::size_t row, std::size_t col);
  static Element basis(const Algebra& a, std::size_t flat);
  static Element from_flat(const Algebra& a, const CVector& coords);

  const Algebra& algebra() const { return algebra_; }
  const std::vector<CMatrix>& mats() const { return mats_; }
  const CMatrix& block(std::size_t j) const { return mats_[j]; }

  CVector flatten() const;
  Element adjoint() const;
  /// Hilbert-Schmidt norm over all blocks.
  double norm() const;

  Element& operator+=(const Element& other);
  Element& operator-=(const Element& other);
  Element& operator*=(Complex s);

  friend Element operator+(Element a, const Element& b) { return a += b; }
  friend Element operator-(Element a, const Element& b) { return a -= b; }
  friend Element operator*(Complex s, Element a) { return a *= s; }
  friend Element operator*(const Element& a, const Element& b);

 private:
  Algebra algebra_;
  std::vector<CMatrix> mats_;
};

Element commutator(const Element& a, const Element& b);

/// Kronecker product of ordinary matrices.
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// a ⊗ b in tensor_algebra(a.algebra(), b.algebra()).
Element tensor_element(const Element& a, const Element& b);

Element embed_left(const Element& a, const Algebra& right);   // (a, 0)
Element embed_right(const Algebra& left, const Element& b);   // (0, b)

/// Every block Hermitian within eps with minimum eigenvalue >= -eps.
bool is_positive_element(const Element& a, double eps = kDefaultTolerance);
double min_eigenvalue(const Element& a);

/// Positive unital functional stored by density blocks: omega(a) = sum_i tr(rho_i a_i).
class State {
 public:
  /// Throws ErrorCode::InvalidState unless every density is Hermitian PSD and
  /// the total trace is 1 (within eps).
  State(Algebra algebra, std::vector<CMatrix> densities, double eps = kDefaultTolerance);

  static State maximally_mixed(const Algebra& a);
  /// The functional with omega(e_{pq}) = w[index(p, q)].
  static State from_functional(const Algebra& a, const CVector& w, double eps = kDefaultTolerance);

  const Algebra& algebra() const { return algebra_; }
  const std::vector<CMatrix>& densities() const { return densities_; }

  Complex evaluate(const Element& a) const;
  /// Values on the matrix-unit basis, w[index(j,p,q)] = (rho_j)_{qp}.
  CVector functional() const;
  Element density_element() const { return Element(algebra_, densities_); }

 private:
  Algebra algebra_;
  std::vector<CMatrix> densities_;
};

/// Values of a (not necessarily positive) functional given by densities.
CVector densities_to_functional(const Algebra& a, const std::vector<CMatrix>& densities);
std::vector<CMatrix> functional_to_densities(const Algebra& a, const CVector& w);

State make_state(const Algebra& a, std::vector<CMatrix> densities, double eps = kDefaultTolerance);
bool is_state(const Algebra& a, const std::vector<CMatrix>& densities, double eps = kDefaultTolerance);
State tensor_state(const State& a, const State& b);

/// Functional values of w_a ⊗ w_b on tensor_algebra(a, b).
CVector tensor_functional(const Algebra& a, const CVector& wa, const Algebra& b, const CVector& wb);

double distance(const std::vector<CMatrix>& x, const std::vector<CMatrix>& y);

}  // namespace rqm
