#pragma once

// Coordinate bookkeeping for tensor products of several algebras.
//
// The product of legs L_1,...,L_k has blocks indexed by tuples (j_1,...,j_k)
// in lexicographic order (first leg outermost), and within a block the row and
// column indices are mixed-radix numbers in the leg block sizes. This is the
// same layout tensor_algebra / tensor_element produce, and it does not depend
// on how the binary products are bracketed: (A⊗B)⊗C and A⊗(B⊗C) share their
// flattened coordinates.

#include <cstddef>
#include <vector>

#include "rqm/algebra.hpp"

namespace rqm {

class TensorLegs {
 public:
  explicit TensorLegs(std::vector<Algebra> legs);

  const std::vector<Algebra>& legs() const { return legs_; }
  const Algebra& product() const { return product_; }

  /// Flattened product index of e_{i_1} ⊗ ... ⊗ e_{i_k}, i_t a basis index of leg t.
  std::size_t flat(const std::vector<std::size_t>& leg_indices) const;
  /// Inverse of flat().
  std::vector<std::size_t> split(std::size_t flat) const;

 private:
  std::vector<Algebra> legs_;
  Algebra product_;
};

/// perm[f] is the index, in the product of legs reordered by `order`, of the
/// basis element with index f in the product of `legs` (the leg flip).
/// `order[t]` names which original leg sits at position t afterwards.
std::vector<std::size_t> leg_permutation(const std::vector<Algebra>& legs,
                                         const std::vector<std::size_t>& order);

}  // namespace rqm
