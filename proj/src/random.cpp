#include "rqm/random.hpp"

#include <functional>

namespace rqm {

CMatrix random_gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      double re = g(rng);
      double im = g(rng);
      m(i, j) = Complex(re, im);
    }
  return m;
}

CMatrix random_unitary(std::size_t n, Rng& rng) {
  CMatrix z = random_gaussian_matrix(n, n, rng);
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ();
  CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    Complex d = r(j, j);
    double a = std::abs(d);
    if (a > 0) q.col(j) *= d / a;
  }
  return q;
}

Element random_element(const Algebra& a, Rng& rng) {
  std::vector<CMatrix> mats;
  for (std::size_t n : a.blocks()) mats.push_back(random_gaussian_matrix(n, n, rng));
  return Element(a, std::move(mats));
}

State random_state(const Algebra& a, Rng& rng) {
  std::vector<CMatrix> d;
  double total = 0.0;
  for (std::size_t n : a.blocks()) {
    CMatrix g = random_gaussian_matrix(n, n, rng);
    CMatrix rho = g * g.adjoint();
    total += rho.trace().real();
    d.push_back(std::move(rho));
  }
  for (auto& rho : d) {
    rho /= total;
    rho = 0.5 * (rho + rho.adjoint()).eval();
  }
  return State(a, std::move(d));
}

State random_state(const Algebra& a, std::uint64_t seed) {
  Rng rng(seed);
  return random_state(a, rng);
}

std::vector<double> random_probability_vector(std::size_t n, Rng& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> t(n);
  double s = 0.0;
  for (auto& x : t) s += (x = e(rng));
  for (auto& x : t) x /= s;
  return t;
}

std::vector<std::vector<std::size_t>> multiplicity_solutions(const std::vector<std::size_t>& sizes,
                                                             std::size_t target) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> k(sizes.size(), 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t j, std::size_t remaining) {
    if (j == sizes.size()) {
      if (remaining == 0) out.push_back(k);
      return;
    }
    for (std::size_t c = 0; c * sizes[j] <= remaining; ++c) {
      k[j] = c;
      rec(j + 1, remaining - c * sizes[j]);
    }
    k[j] = 0;
  };
  rec(0, target);
  return out;
}

bool has_unital_morphism(const Algebra& domain, const Algebra& codomain) {
  for (std::size_t d : codomain.blocks())
    if (multiplicity_solutions(domain.blocks(), d).empty()) return false;
  return true;
}

namespace {

// Image of e^{(j)}_{pq} under b -> ⊕_j (I_{k_j} ⊗ b_j), as a d x d matrix.
CMatrix amplified_unit(const Algebra& domain, const std::vector<std::size_t>& k, std::size_t j,
                       std::size_t p, std::size_t q) {
  std::size_t d = 0;
  for (std::size_t t = 0; t < k.size(); ++t) d += k[t] * domain.block_size(t);
  CMatrix out = CMatrix::Zero(d, d);
  std::size_t start = 0;
  for (std::size_t t = 0; t < j; ++t) start += k[t] * domain.block_size(t);
  std::size_t m = domain.block_size(j);
  for (std::size_t copy = 0; copy < k[j]; ++copy) out(start + copy * m + p, start + copy * m + q) = 1.0;
  return out;
}

}  // namespace

LinearMap multiplicity_representation(const Algebra& domain, const std::vector<std::size_t>& multiplicities) {
  if (multiplicities.size() != domain.num_blocks())
    throw Error(ErrorCode::Dimension, "one multiplicity per block is required");
  std::size_t d = 0;
  for (std::size_t t = 0; t < multiplicities.size(); ++t) d += multiplicities[t] * domain.block_size(t);
  if (d == 0) throw Error(ErrorCode::UnsupportedShape, "representation of dimension zero");
  Algebra target = Algebra::full_matrix(d);
  std::vector<Element> images;
  for (std::size_t f = 0; f < domain.dim(); ++f) {
    BasisIndex b = domain.locate(f);
    images.emplace_back(target, std::vector<CMatrix>{amplified_unit(domain, multiplicities, b.block, b.row, b.col)});
  }
  LinearMap raw = LinearMap::from_images(domain, target, images);
  return LinearMap::trusted(domain, target, raw.matrix(), MapKind::Morphism);
}

LinearMap random_morphism(const Algebra& domain, const Algebra& codomain, Rng& rng) {
  std::vector<std::vector<std::size_t>> chosen;
  std::vector<CMatrix> unitaries;
  for (std::size_t d : codomain.blocks()) {
    auto sols = multiplicity_solutions(domain.blocks(), d);
    if (sols.empty())
      throw Error(ErrorCode::UnsupportedShape, "no unital morphism " + describe(domain) + " -> " + describe(codomain));
    std::uniform_int_distribution<std::size_t> pick(0, sols.size() - 1);
    chosen.push_back(sols[pick(rng)]);
    unitaries.push_back(random_unitary(d, rng));
  }
  std::vector<Element> images;
  for (std::size_t f = 0; f < domain.dim(); ++f) {
    BasisIndex b = domain.locate(f);
    std::vector<CMatrix> mats;
    for (std::size_t i = 0; i < codomain.num_blocks(); ++i) {
      CMatrix e = amplified_unit(domain, chosen[i], b.block, b.row, b.col);
      mats.push_back(unitaries[i] * e * unitaries[i].adjoint());
    }
    images.emplace_back(codomain, std::move(mats));
  }
  LinearMap raw = LinearMap::from_images(domain, codomain, images);
  return LinearMap::trusted(domain, codomain, raw.matrix(), MapKind::Morphism);
}

LinearMap random_cp_unital(const Algebra& domain, const Algebra& codomain, Rng& rng, std::size_t kraus_per_block) {
  if (kraus_per_block == 0) throw Error(ErrorCode::InvalidSpec, "need at least one Kraus operator");
  // kraus[i][j][r]: m_j x n_i, F_i(b) = sum_{j,r} K* b_j K
  std::vector<std::vector<std::vector<CMatrix>>> kraus(codomain.num_blocks());
  for (std::size_t i = 0; i < codomain.num_blocks(); ++i) {
    std::size_t n = codomain.block_size(i);
    CMatrix s = CMatrix::Zero(n, n);
    kraus[i].resize(domain.num_blocks());
    for (std::size_t j = 0; j < domain.num_blocks(); ++j)
      for (std::size_t r = 0; r < kraus_per_block; ++r) {
        CMatrix k = random_gaussian_matrix(domain.block_size(j), n, rng);
        s += k.adjoint() * k;
        kraus[i][j].push_back(std::move(k));
      }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (s + s.adjoint()));
    CMatrix inv_sqrt = es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                       es.eigenvectors().adjoint();
    for (auto& per_block : kraus[i])
      for (auto& k : per_block) k = (k * inv_sqrt).eval();
  }
  std::vector<Element> images;
  for (std::size_t f = 0; f < domain.dim(); ++f) {
    BasisIndex b = domain.locate(f);
    std::vector<CMatrix> mats;
    for (std::size_t i = 0; i < codomain.num_blocks(); ++i) {
      std::size_t n = codomain.block_size(i);
      CMatrix acc = CMatrix::Zero(n, n);
      for (const auto& k : kraus[i][b.block]) acc += k.row(b.row).adjoint() * k.row(b.col);
      mats.push_back(std::move(acc));
    }
    images.emplace_back(codomain, std::move(mats));
  }
  LinearMap raw = LinearMap::from_images(domain, codomain, images);
  return LinearMap::trusted(domain, codomain, raw.matrix(), MapKind::CpUnital);
}

}  // namespace rqm
