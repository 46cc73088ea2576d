#include "rqm/stinespring.hpp"

namespace rqm {

StinespringDilation stinespring_dilate(const LinearMap& f, double cutoff) {
  if (f.codomain().num_blocks() != 1)
    throw Error(ErrorCode::UnsupportedShape,
                "Stinespring dilation needs a single-block codomain, got " + describe(f.codomain()));
  if (!f.is_cp_unital())
    throw Error(ErrorCode::NotCompletelyPositive, "Stinespring dilation needs a validated unital CP map");

  const Algebra& b_alg = f.domain();
  const std::size_t dim = b_alg.dim();
  const std::size_t h = f.codomain().block_size(0);
  const std::size_t big = dim * h;
  auto at = [h](std::size_t k, std::size_t s) { return static_cast<Eigen::Index>(k * h + s); };

  // Gram matrix on B ⊗ H: e_k* e_k' = δ_{jj'} δ_{pp'} e^{(j)}_{qq'} for e_k = e^{(j)}_{pq}.
  CMatrix gram = CMatrix::Zero(big, big);
  for (std::size_t k = 0; k < dim; ++k) {
    BasisIndex bk = b_alg.locate(k);
    for (std::size_t k2 = 0; k2 < dim; ++k2) {
      BasisIndex bk2 = b_alg.locate(k2);
      if (bk.block != bk2.block || bk.row != bk2.row) continue;
      auto col = f.matrix().col(static_cast<Eigen::Index>(b_alg.index(bk.block, bk.col, bk2.col)));
      for (std::size_t s = 0; s < h; ++s)
        for (std::size_t s2 = 0; s2 < h; ++s2) gram(at(k, s), at(k2, s2)) = col(s * h + s2);
    }
  }
  gram = (0.5 * (gram + gram.adjoint())).eval();

  Eigen::SelfAdjointEigenSolver<CMatrix> es(gram);
  const auto& lambda = es.eigenvalues();
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = lambda.size(); i-- > 0;)
    if (lambda(i) > cutoff) kept.push_back(i);
  const auto r = static_cast<Eigen::Index>(kept.size());
  if (r == 0) throw Error(ErrorCode::NumericalFailure, "Gram matrix of the dilation is numerically zero");

  // R = Λ^{1/2} U*, the quotient map onto K; R⁺ = U Λ^{-1/2}.
  CMatrix quotient(r, big), lift(big, r);
  for (Eigen::Index c = 0; c < r; ++c) {
    double l = lambda(kept[c]);
    auto u = es.eigenvectors().col(kept[c]);
    quotient.row(c) = std::sqrt(l) * u.adjoint();
    lift.col(c) = u / std::sqrt(l);
  }

  CMatrix v = CMatrix::Zero(r, h);
  for (std::size_t s = 0; s < h; ++s)
    for (std::size_t j = 0; j < b_alg.num_blocks(); ++j)
      for (std::size_t p = 0; p < b_alg.block_size(j); ++p)
        v.col(s) += quotient.col(at(b_alg.index(j, p, p), s));

  Algebra k_alg = Algebra::full_matrix(static_cast<std::size_t>(r));
  std::vector<Element> images;
  images.reserve(dim);
  for (std::size_t m = 0; m < dim; ++m) {
    // left multiplication by e^{(j)}_{ab}: e_{bq} -> e_{aq}
    BasisIndex bm = b_alg.locate(m);
    CMatrix ql = CMatrix::Zero(r, big);
    for (std::size_t q = 0; q < b_alg.block_size(bm.block); ++q) {
      std::size_t from = b_alg.index(bm.block, bm.col, q);
      std::size_t to = b_alg.index(bm.block, bm.row, q);
      for (std::size_t s = 0; s < h; ++s) ql.col(at(from, s)) = quotient.col(at(to, s));
    }
    images.emplace_back(k_alg, std::vector<CMatrix>{ql * lift});
  }
  LinearMap pi = LinearMap::from_images(b_alg, k_alg, images);
  try {
    pi = make_morphism(pi, 1e-8);
  } catch (const Error& e) {
    throw Error(ErrorCode::NumericalFailure, std::string("dilation representation is not a morphism: ") + e.what());
  }
  return {static_cast<std::size_t>(r), std::move(v), std::move(pi)};
}

DilationResiduals dilation_residuals(const StinespringDilation& d, const LinearMap& f) {
  DilationResiduals out;
  const auto h = static_cast<Eigen::Index>(f.codomain().block_size(0));
  out.isometry = (d.v.adjoint() * d.v - CMatrix::Identity(h, h)).norm();
  for (std::size_t k = 0; k < f.domain().dim(); ++k) {
    CMatrix lhs = d.v.adjoint() * d.pi.image(k).block(0) * d.v;
    CMatrix rhs = f.image(k).block(0);
    out.reproduction = std::max(out.reproduction, (lhs - rhs).norm());
  }
  return out;
}

}  // namespace rqm
