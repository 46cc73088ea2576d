#pragma once

// Shared fixtures and brute-force oracles. The oracles deliberately avoid the
// library's flattened-coordinate helpers and work with explicit index loops.

#include <cmath>
#include <vector>

#include "rqm/algebra.hpp"
#include "rqm/linear_map.hpp"
#include "rqm/random.hpp"
#include "rqm/rqm.hpp"

namespace fixtures {

using namespace rqm;

inline double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline double diff(const Element& a, const Element& b) { return (a - b).norm(); }

/// A random RQM from B to A with parameter C.
inline RandomQuantumMap random_rqm(const Algebra& b, const Algebra& a, const Algebra& c, Rng& rng) {
  LinearMap phi = random_morphism(b, tensor_algebra(a, c), rng);
  State nu = random_state(c, rng);
  return RandomQuantumMap(QuantumFamily(b, a, c, phi), nu);
}

inline RandomQuantumMap random_rqm_on(const Algebra& a, const Algebra& c, Rng& rng) { return random_rqm(a, a, c, rng); }

/// b ↦ σ(b) as a map A -> ℂ.
inline LinearMap state_as_map(const State& s) {
  CMatrix row(1, s.algebra().dim());
  for (std::size_t k = 0; k < s.algebra().dim(); ++k) row(0, k) = s.evaluate(Element::basis(s.algebra(), k));
  return LinearMap(s.algebra(), Algebra::complex_numbers(), row);
}

/// The map b ↦ tr(b)/n · 1 on M_n.
inline LinearMap depolarizing(std::size_t n) {
  Algebra a = Algebra::full_matrix(n);
  std::vector<Element> images;
  for (std::size_t k = 0; k < a.dim(); ++k) {
    BasisIndex b = a.locate(k);
    images.push_back(b.row == b.col ? Complex(1.0 / n) * Element::unit(a) : Element::zero(a));
  }
  return LinearMap::from_images(a, a, images);
}

/// The constant-transition RQM on M_n: (M_n, b ↦ 1 ⊗ b, tr/n), so that
/// (id ⊗ tr/n)(1 ⊗ b) = tr(b)/n · 1.
inline RandomQuantumMap constant_rqm(std::size_t n) {
  Algebra a = Algebra::full_matrix(n);
  Algebra aa = tensor_algebra(a, a);
  std::vector<Element> images;
  for (std::size_t k = 0; k < a.dim(); ++k) images.push_back(tensor_element(Element::unit(a), Element::basis(a, k)));
  LinearMap phi = make_morphism(a, aa, images);
  return RandomQuantumMap(QuantumFamily(a, a, a, phi), State::maximally_mixed(a));
}

/// Partial contraction with ν on the right tensor leg, by explicit indices:
/// F(b)_i = Σ_j Σ_{p,q,r,s} φ(b)_{(i,j)}[(p,r),(q,s)] ρ_j[s,r] e_{pq}.
inline Element contract_right(const Element& x, const Algebra& a, const State& nu) {
  const Algebra& c = nu.algebra();
  std::vector<CMatrix> out;
  for (std::size_t i = 0; i < a.num_blocks(); ++i) {
    const std::size_t n = a.block_size(i);
    CMatrix acc = CMatrix::Zero(n, n);
    for (std::size_t j = 0; j < c.num_blocks(); ++j) {
      const std::size_t m = c.block_size(j);
      const CMatrix& blk = x.block(i * c.num_blocks() + j);
      const CMatrix& rho = nu.densities()[j];
      for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q)
          for (std::size_t r = 0; r < m; ++r)
            for (std::size_t s = 0; s < m; ++s) acc(p, q) += blk(p * m + r, q * m + s) * rho(s, r);
    }
    out.push_back(acc);
  }
  return Element(a, out);
}

/// Induced NFMO by explicit contraction of every basis image.
inline CMatrix oracle_nfmo(const RandomQuantumMap& r) {
  CMatrix m(r.target().dim(), r.source().dim());
  for (std::size_t k = 0; k < r.source().dim(); ++k) {
    m.col(k) = contract_right(r.phi().image(k), r.target(), r.nu()).flatten();
  }
  return m;
}

/// ω(x) for a state given by densities, by explicit trace.
inline Complex oracle_evaluate(const std::vector<CMatrix>& rho, const Element& x) {
  Complex s = 0.0;
  for (std::size_t j = 0; j < rho.size(); ++j) s += (rho[j] * x.block(j)).trace();
  return s;
}

}  // namespace fixtures
