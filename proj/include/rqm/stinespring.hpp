#pragma once

#include "rqm/linear_map.hpp"

namespace rqm {

/// F(b) = V* pi(b) V with V: H -> K an isometry and pi: B -> M_K a morphism.
struct StinespringDilation {
  std::size_t k_dim = 0;
  CMatrix v;     // k_dim x h
  LinearMap pi;  // B -> M_{k_dim}
};

struct DilationResiduals {
  double isometry = 0.0;      // ||V*V - I||
  double reproduction = 0.0;  // max over basis b of ||V* pi(b) V - F(b)||
};

inline constexpr double kGramCutoff = 1e-10;

/// Minimal dilation by the GNS-type construction on B ⊗ H with semi-inner
/// product <b⊗ξ, b'⊗ξ'> = <ξ, F(b*b')ξ'>; Gram eigenvalues below `cutoff`
/// span the null space that is quotiented out.
///
/// Requires a validated unital CP map whose codomain is a single block M_h;
/// otherwise throws ErrorCode::UnsupportedShape.
StinespringDilation stinespring_dilate(const LinearMap& f, double cutoff = kGramCutoff);

DilationResiduals dilation_residuals(const StinespringDilation& d, const LinearMap& f);

}  // namespace rqm
