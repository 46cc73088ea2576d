#pragma once

// Linear maps between multi-matrix algebras, stored as dense matrices of size
// dim(codomain) x dim(domain) in flattened matrix-unit coordinates.

#include <string>
#include <vector>

#include "rqm/algebra.hpp"

namespace rqm {

enum class MapKind { Raw, Morphism, CpUnital };

const char* to_string(MapKind kind);

class LinearMap {
 public:
  /// An untagged (Raw) map. Throws ErrorCode::Dimension if the matrix shape is wrong.
  LinearMap(Algebra domain, Algebra codomain, CMatrix matrix);

  static LinearMap from_images(const Algebra& domain, const Algebra& codomain,
                               const std::vector<Element>& basis_images);
  static LinearMap identity(const Algebra& a);

  /// Tags a map whose structure is guaranteed by construction (closure results,
  /// maps assembled from validated pieces). Not a validator.
  static LinearMap trusted(Algebra domain, Algebra codomain, CMatrix matrix, MapKind kind);

  const Algebra& domain() const { return domain_; }
  const Algebra& codomain() const { return codomain_; }
  const CMatrix& matrix() const { return matrix_; }
  MapKind kind() const { return kind_; }
  bool is_cp_unital() const { return kind_ != MapKind::Raw; }

  Element apply(const Element& x) const;
  Element image(std::size_t basis_index) const;

 private:
  LinearMap(Algebra domain, Algebra codomain, CMatrix matrix, MapKind kind);

  Algebra domain_;
  Algebra codomain_;
  CMatrix matrix_;
  MapKind kind_ = MapKind::Raw;
};

/// Largest deviation over the basis: max_k ||F(e_k) - G(e_k)||.
double basis_distance(const LinearMap& f, const LinearMap& g);

// ---------------------------------------------------------------------------
// Morphisms

struct MorphismDefects {
  double multiplicative = 0.0;  // max ||φ(e_pq)φ(e_rs) - δ_qr φ(e_ps)||
  double star = 0.0;            // max ||φ(e_pq)* - φ(e_qp)||
  double unital = 0.0;          // ||φ(1) - 1||
};

MorphismDefects morphism_defects(const LinearMap& f);

/// Validates multiplicativity on all ordered basis pairs, star preservation and
/// unitality. Throws ErrorCode::NotAMorphism naming the first violated identity.
LinearMap make_morphism(const LinearMap& f, double eps = kDefaultTolerance);
LinearMap make_morphism(const Algebra& domain, const Algebra& codomain,
                        const std::vector<Element>& basis_images, double eps = kDefaultTolerance);

// ---------------------------------------------------------------------------
// Complete positivity

struct ChoiBlock {
  std::size_t codomain_block;
  std::size_t domain_block;
  CMatrix matrix;  // sum_pq F_ij(e_pq) ⊗ e_pq, size (n_i m_j)^2
};

std::vector<ChoiBlock> choi_blocks(const LinearMap& f);

struct CpDiagnostics {
  double min_choi_eigenvalue = 0.0;
  std::size_t worst_codomain_block = 0;
  std::size_t worst_domain_block = 0;
  double hermitian_defect = 0.0;
  double unital_defect = 0.0;
};

CpDiagnostics cp_diagnostics(const LinearMap& f);

/// Accepts iff every Choi block is PSD (min eigenvalue >= -eps) and F(1) = 1.
/// Throws ErrorCode::NotCompletelyPositive or ErrorCode::NotUnital.
LinearMap validate_cp_unital(const LinearMap& f, double eps = kDefaultTolerance);

// ---------------------------------------------------------------------------
// Closure operations. Kinds propagate: morphism∘morphism is a morphism,
// cp∘cp is cp; anything involving a Raw map is Raw.

/// outer ∘ inner; requires inner.codomain() == outer.domain().
LinearMap compose(const LinearMap& outer, const LinearMap& inner);
LinearMap direct_sum(const LinearMap& f, const LinearMap& g);
LinearMap tensor(const LinearMap& f, const LinearMap& g);

/// The *-isomorphism ⊗legs -> ⊗legs[order] moving tensor legs around.
LinearMap permute_legs(const std::vector<Algebra>& legs, const std::vector<std::size_t>& order);

/// (id_A ⊗ w): A⊗C -> A for a functional w on C (a state gives a unital CP map).
LinearMap slice_right(const Algebra& a, const Algebra& c, const CVector& w);
LinearMap slice_right(const Algebra& a, const State& nu);

// ---------------------------------------------------------------------------
// Transitions

/// The adjoint of an NFMO F: B -> A, acting on states of A and returning states
/// of B. Stored as the matrix D with w_B = D w_A on functional coordinates.
class Transition {
 public:
  Transition(Algebra source, Algebra target, CMatrix dual);

  const Algebra& source() const { return source_; }
  const Algebra& target() const { return target_; }
  const CMatrix& dual() const { return dual_; }

  CVector apply_functional(const CVector& w) const;
  std::vector<CMatrix> apply_densities(const std::vector<CMatrix>& densities) const;
  /// Throws ErrorCode::InvalidState if the image fails state validation.
  State apply(const State& rho, double eps = kDefaultTolerance) const;

 private:
  Algebra source_;
  Algebra target_;
  CMatrix dual_;
};

Transition adjoint_transition(const LinearMap& f);

}  // namespace rqm
