#include "rqm/tensor_legs.hpp"

#include <algorithm>

namespace rqm {

namespace {

Algebra product_of(const std::vector<Algebra>& legs) {
  if (legs.empty()) throw Error(ErrorCode::InvalidSpec, "tensor product needs at least one leg");
  Algebra out = legs.front();
  for (std::size_t t = 1; t < legs.size(); ++t) out = tensor_algebra(out, legs[t]);
  return out;
}

}  // namespace

TensorLegs::TensorLegs(std::vector<Algebra> legs) : legs_(std::move(legs)), product_(product_of(legs_)) {}

std::size_t TensorLegs::flat(const std::vector<std::size_t>& leg_indices) const {
  if (leg_indices.size() != legs_.size()) throw Error(ErrorCode::Dimension, "wrong number of leg indices");
  std::size_t block = 0, row = 0, col = 0;
  for (std::size_t t = 0; t < legs_.size(); ++t) {
    BasisIndex b = legs_[t].locate(leg_indices[t]);
    std::size_t n = legs_[t].block_size(b.block);
    block = block * legs_[t].num_blocks() + b.block;
    row = row * n + b.row;
    col = col * n + b.col;
  }
  return product_.index(block, row, col);
}

std::vector<std::size_t> TensorLegs::split(std::size_t flat) const {
  BasisIndex b = product_.locate(flat);
  std::size_t k = legs_.size();
  std::vector<std::size_t> blocks(k);
  std::size_t block = b.block;
  for (std::size_t t = k; t-- > 0;) {
    blocks[t] = block % legs_[t].num_blocks();
    block /= legs_[t].num_blocks();
  }
  std::vector<std::size_t> out(k);
  std::size_t row = b.row, col = b.col;
  for (std::size_t t = k; t-- > 0;) {
    std::size_t n = legs_[t].block_size(blocks[t]);
    out[t] = legs_[t].index(blocks[t], row % n, col % n);
    row /= n;
    col /= n;
  }
  return out;
}

std::vector<std::size_t> leg_permutation(const std::vector<Algebra>& legs,
                                         const std::vector<std::size_t>& order) {
  if (order.size() != legs.size()) throw Error(ErrorCode::Dimension, "leg order has wrong length");
  {
    std::vector<std::size_t> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t t = 0; t < sorted.size(); ++t)
      if (sorted[t] != t) throw Error(ErrorCode::InvalidSpec, "leg order is not a permutation");
  }
  TensorLegs source(legs);
  std::vector<Algebra> reordered;
  for (std::size_t t : order) reordered.push_back(legs[t]);
  TensorLegs target(std::move(reordered));

  std::vector<std::size_t> perm(source.product().dim());
  std::vector<std::size_t> moved(legs.size());
  for (std::size_t f = 0; f < perm.size(); ++f) {
    auto idx = source.split(f);
    for (std::size_t t = 0; t < order.size(); ++t) moved[t] = idx[order[t]];
    perm[f] = target.flat(moved);
  }
  return perm;
}

}  // namespace rqm
